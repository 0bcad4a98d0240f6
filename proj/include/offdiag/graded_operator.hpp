#ifndef OFFDIAG_GRADED_OPERATOR_HPP
#define OFFDIAG_GRADED_OPERATOR_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "offdiag/graded_vector.hpp"
#include "offdiag/ladder.hpp"

namespace offdiag {

/// Exact banded operator on the graded basis. The action rule sends one basis
/// state to a finite list of (state, amplitude) pairs; amplitudes are exact up
/// to floating rounding and never truncated. `band` bounds the degree shift the
/// rule can produce, which the library asserts exactly on every application.
class GradedOperator {
public:
    using ActionFn = std::function<void(const MultiIndex&, std::vector<std::pair<MultiIndex, cplx>>&)>;

    GradedOperator(std::size_t k, std::uint64_t band, bool hermitian, std::string label, ActionFn action)
        : k_(k), band_(band), hermitian_(hermitian), label_(std::move(label)), action_(std::move(action)) {
        if (k == 0) throw domain_error("GradedOperator: mode count must be >= 1");
    }

    std::size_t modes() const { return k_; }
    std::uint64_t band() const { return band_; }
    bool hermitian() const { return hermitian_; }
    const std::string& label() const { return label_; }

    /// Image of a single basis state, duplicates merged, exact zeros dropped.
    GradedVector act(const MultiIndex& state) const {
        if (state.modes() != k_) throw domain_error("GradedOperator::act: mode count mismatch");
        scratch_.clear();
        action_(state, scratch_);
        GradedVector out(k_);
        for (const auto& [st, amp] : scratch_) out.add(st, amp);
        const std::uint64_t din = state.degree();
        for (const auto& [st, amp] : out.entries()) {
            const std::uint64_t dout = st.degree();
            const std::uint64_t shift = dout > din ? dout - din : din - dout;
            if (shift > band_)
                throw invariant_error("GradedOperator '" + label_ + "': action exceeded band order");
        }
        return out;
    }

    static GradedOperator identity(std::size_t k) {
        return GradedOperator(k, 0, true, "identity",
                              [](const MultiIndex& st, std::vector<std::pair<MultiIndex, cplx>>& out) {
                                  out.emplace_back(st, cplx(1.0, 0.0));
                              });
    }

    /// Real diagonal operator given by a degree rule (k = 1 convenience).
    static GradedOperator diagonal(std::function<double(std::uint64_t)> value, std::string label) {
        return GradedOperator(1, 0, true, std::move(label),
                              [value = std::move(value)](const MultiIndex& st,
                                                         std::vector<std::pair<MultiIndex, cplx>>& out) {
                                  out.emplace_back(st, cplx(value(st.degree()), 0.0));
                              });
    }

    /// Operator composition a(b(.)). Hermitian only when the caller knows it is.
    static GradedOperator compose(const GradedOperator& a, const GradedOperator& b,
                                  bool hermitian, std::string label) {
        if (a.modes() != b.modes()) throw domain_error("compose: mode count mismatch");
        return GradedOperator(
            a.modes(), a.band() + b.band(), hermitian, std::move(label),
            [a, b](const MultiIndex& st, std::vector<std::pair<MultiIndex, cplx>>& out) {
                const GradedVector mid = b.act(st);
                for (const auto& [ms, mamp] : mid.entries()) {
                    const GradedVector fin = a.act(ms);
                    for (const auto& [fs, famp] : fin.entries()) out.emplace_back(fs, mamp * famp);
                }
            });
    }

    static GradedOperator sum(std::vector<GradedOperator> terms, bool hermitian, std::string label) {
        if (terms.empty()) throw domain_error("sum: need at least one term");
        std::uint64_t band = 0;
        for (const auto& t : terms) {
            if (t.modes() != terms.front().modes()) throw domain_error("sum: mode count mismatch");
            band = std::max(band, t.band());
        }
        return GradedOperator(
            terms.front().modes(), band, hermitian, std::move(label),
            [terms = std::move(terms)](const MultiIndex& st,
                                       std::vector<std::pair<MultiIndex, cplx>>& out) {
                for (const auto& t : terms) {
                    const GradedVector v = t.act(st);
                    for (const auto& [s, amp] : v.entries()) out.emplace_back(s, amp);
                }
            });
    }

private:
    std::size_t k_;
    std::uint64_t band_;
    bool hermitian_;
    std::string label_;
    ActionFn action_;
    mutable std::vector<std::pair<MultiIndex, cplx>> scratch_;
};

/// Exact application to a finitely supported vector.
inline GradedVector apply(const GradedOperator& op, const GradedVector& v) {
    if (op.modes() != v.modes()) throw domain_error("apply: mode count mismatch");
    GradedVector out(v.modes());
    for (const auto& [st, amp] : v.entries()) {
        const GradedVector img = op.act(st);
        for (const auto& [os, oamp] : img.entries()) out.add(os, amp * oamp);
    }
    return out;
}

/// Single matrix element <row| op |col>.
inline cplx element(const GradedOperator& op, const MultiIndex& row, const MultiIndex& col) {
    return op.act(col).at(row);
}

/// Dense finite section over the degree < n basis.
inline Eigen::MatrixXcd truncate(const GradedOperator& op, std::uint64_t n) {
    if (n == 0) throw domain_error("truncate: cutoff must be >= 1");
    const std::uint64_t dim = graded_basis_size(op.modes(), n);
    if (dim > 100000) throw domain_error("truncate: dimension overflow (" + std::to_string(dim) + ")");
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                                                static_cast<Eigen::Index>(dim));
    for (std::uint64_t c = 0; c < dim; ++c) {
        const MultiIndex col = global_unrank(op.modes(), c);
        const GradedVector img = op.act(col);
        for (const auto& [st, amp] : img.entries()) {
            if (st.degree() >= n) continue;
            m(static_cast<Eigen::Index>(global_rank(st)), static_cast<Eigen::Index>(c)) = amp;
        }
    }
    if (op.hermitian()) {
        const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
        if (dev > 1e-14 * std::max(1.0, m.cwiseAbs().maxCoeff()))
            throw invariant_error("truncate: section of '" + op.label() + "' is not Hermitian");
    }
    return m;
}

/// The block of the operator mapping states below level j's cutoff to states at
/// or above it. Rows cover degrees [n_j, n_j + band): higher rows are zero by
/// the band contract.
inline Eigen::MatrixXcd offdiag_block(const GradedOperator& op, const ProjectionLadder& ladder,
                                      std::uint64_t j) {
    if (j == 0) throw domain_error("offdiag_block: levels start at 1");
    const std::uint64_t nj = ladder.cutoff(j);
    const std::uint64_t cols = graded_basis_size(op.modes(), nj);
    const std::uint64_t row_lo = graded_basis_size(op.modes(), nj);
    const std::uint64_t row_hi = graded_basis_size(op.modes(), nj + op.band());
    const std::uint64_t rows = row_hi - row_lo;
    Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(rows),
                                                static_cast<Eigen::Index>(cols));
    if (rows == 0 || cols == 0) return b;
    // only columns within band reach of the cutoff can contribute
    const std::uint64_t first_col_deg = nj > op.band() ? nj - op.band() : 0;
    for (std::uint64_t c = graded_basis_size(op.modes(), first_col_deg); c < cols; ++c) {
        const MultiIndex col = global_unrank(op.modes(), c);
        const GradedVector img = op.act(col);
        for (const auto& [st, amp] : img.entries()) {
            if (st.degree() < nj) continue;
            const std::uint64_t r = global_rank(st);
            b(static_cast<Eigen::Index>(r - row_lo), static_cast<Eigen::Index>(c)) = amp;
        }
    }
    return b;
}

namespace detail {

/// Largest singular value by power iteration on B^H B, deterministic start.
inline double power_iteration_norm(const Eigen::MatrixXcd& b, double rel_tol = 1e-10,
                                   int max_iter = 10000) {
    if (b.rows() == 0 || b.cols() == 0) return 0.0;
    if (b.cwiseAbs().maxCoeff() == 0.0) return 0.0;
    std::mt19937_64 rng(0x0ffd1a6ULL);
    std::normal_distribution<double> dist(0.0, 1.0);
    Eigen::VectorXcd v(b.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(dist(rng), dist(rng));
    v.normalize();
    double sigma = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXcd w = b * v;
        const double s = w.norm();
        if (s == 0.0) {
            // started orthogonal to the row space; re-randomize
            for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(dist(rng), dist(rng));
            v.normalize();
            continue;
        }
        v = b.adjoint() * w;
        const double t = v.norm();
        if (t == 0.0) return s;
        v /= t;
        // with unit v: ||Bv|| -> sigma and ||B^H B v|| -> sigma^2, so t/s -> sigma
        const double snew = t / s;
        if (it > 0 && std::abs(snew - sigma) <= rel_tol * snew) return snew;
        sigma = snew;
    }
    return sigma;
}

} // namespace detail

/// Operator norm of the level-j off-diagonal block.
inline double block_norm(const GradedOperator& op, const ProjectionLadder& ladder, std::uint64_t j) {
    return detail::power_iteration_norm(offdiag_block(op, ladder, j));
}

} // namespace offdiag

#endif
