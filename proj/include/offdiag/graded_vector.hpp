#ifndef OFFDIAG_GRADED_VECTOR_HPP
#define OFFDIAG_GRADED_VECTOR_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <optional>

#include "offdiag/multi_index.hpp"

namespace offdiag {

using cplx = std::complex<double>;

/// Finitely supported element of the graded Hilbert space: a map from basis
/// states to complex amplitudes. Zero amplitudes are never stored.
///
/// Vectors produced by truncating an l^2 rule carry the evaluation horizon and
/// an upper bound on the discarded tail mass, so norms quoted downstream are
/// explicit about truncation.
class GradedVector {
public:
    GradedVector() : k_(1) {}
    explicit GradedVector(std::size_t k) : k_(k) {
        if (k == 0) throw domain_error("GradedVector: mode count must be >= 1");
    }

    std::size_t modes() const { return k_; }

    const std::map<MultiIndex, cplx>& entries() const { return entries_; }

    bool empty() const { return entries_.empty(); }

    /// Accumulate an amplitude; erases the entry when the sum cancels to zero.
    void add(const MultiIndex& state, cplx amplitude) {
        if (state.modes() != k_) throw domain_error("GradedVector::add: mode count mismatch");
        if (amplitude == cplx(0.0, 0.0)) return;
        auto it = entries_.find(state);
        if (it == entries_.end()) {
            entries_.emplace(state, amplitude);
        } else {
            it->second += amplitude;
            if (it->second == cplx(0.0, 0.0)) entries_.erase(it);
        }
    }

    void set(const MultiIndex& state, cplx amplitude) {
        if (state.modes() != k_) throw domain_error("GradedVector::set: mode count mismatch");
        if (amplitude == cplx(0.0, 0.0))
            entries_.erase(state);
        else
            entries_[state] = amplitude;
    }

    cplx at(const MultiIndex& state) const {
        auto it = entries_.find(state);
        return it == entries_.end() ? cplx(0.0, 0.0) : it->second;
    }

    /// Highest degree carrying a nonzero amplitude; 0 for the zero vector.
    std::uint64_t max_degree() const {
        std::uint64_t d = 0;
        for (const auto& [st, amp] : entries_) d = std::max(d, st.degree());
        return d;
    }

    double norm_sq() const {
        double s = 0.0;
        for (const auto& [st, amp] : entries_) s += std::norm(amp);
        return s;
    }

    double norm() const { return std::sqrt(norm_sq()); }

    /// Mass held at degrees < n.
    double mass_below(std::uint64_t n) const {
        double s = 0.0;
        for (const auto& [st, amp] : entries_) {
            if (st.degree() < n) s += std::norm(amp);
        }
        return s;
    }

    /// Projection onto degrees < n.
    GradedVector truncated_below(std::uint64_t n) const {
        GradedVector out(k_);
        for (const auto& [st, amp] : entries_) {
            if (st.degree() < n) out.entries_.emplace(st, amp);
        }
        return out;
    }

    /// Complementary projection: degrees >= n.
    GradedVector truncated_at_or_above(std::uint64_t n) const {
        GradedVector out(k_);
        for (const auto& [st, amp] : entries_) {
            if (st.degree() >= n) out.entries_.emplace(st, amp);
        }
        out.horizon_ = horizon_;
        out.tail_bound_sq_ = tail_bound_sq_;
        return out;
    }

    GradedVector& operator*=(cplx s) {
        if (s == cplx(0.0, 0.0)) {
            entries_.clear();
            return *this;
        }
        for (auto& [st, amp] : entries_) amp *= s;
        if (tail_bound_sq_) *tail_bound_sq_ *= std::norm(s);
        return *this;
    }

    GradedVector& operator+=(const GradedVector& other) {
        if (other.k_ != k_) throw domain_error("GradedVector: mode count mismatch in sum");
        for (const auto& [st, amp] : other.entries_) add(st, amp);
        return *this;
    }

    friend cplx inner(const GradedVector& a, const GradedVector& b) {
        if (a.k_ != b.k_) throw domain_error("inner: mode count mismatch");
        // iterate over the smaller support
        const GradedVector& s = a.entries_.size() <= b.entries_.size() ? a : b;
        const GradedVector& t = a.entries_.size() <= b.entries_.size() ? b : a;
        cplx acc(0.0, 0.0);
        for (const auto& [st, amp] : s.entries_) {
            auto it = t.entries_.find(st);
            if (it == t.entries_.end()) continue;
            // convention: conjugate-linear in the first slot
            if (&s == &a)
                acc += std::conj(amp) * it->second;
            else
                acc += std::conj(it->second) * amp;
        }
        return acc;
    }

    /// Declared materialization horizon for rule-defined vectors (nullopt for
    /// genuinely finite vectors).
    std::optional<std::uint64_t> horizon() const { return horizon_; }

    /// Upper bound on the squared norm of the discarded tail, when known.
    std::optional<double> tail_bound_sq() const { return tail_bound_sq_; }

    void declare_truncation(std::uint64_t horizon, double tail_bound_sq) {
        horizon_ = horizon;
        tail_bound_sq_ = tail_bound_sq;
    }

private:
    std::size_t k_;
    std::map<MultiIndex, cplx> entries_;
    std::optional<std::uint64_t> horizon_;
    std::optional<double> tail_bound_sq_;
};

/// Materialize a coefficient rule up to (and excluding) the given degree
/// horizon. `tail_bound_sq` is the caller's bound on the discarded mass.
inline GradedVector materialize_rule(std::size_t k,
                                     const std::function<cplx(const MultiIndex&)>& rule,
                                     std::uint64_t degree_horizon,
                                     double tail_bound_sq) {
    GradedVector v(k);
    for (std::uint32_t t = 0; t < degree_horizon; ++t) {
        for (const auto& st : enumerate_degree(k, t)) {
            v.add(st, rule(st));
        }
    }
    v.declare_truncation(degree_horizon, tail_bound_sq);
    return v;
}

/// The default probe: amplitudes 2^{-|alpha|}, normalized. All degrees are
/// populated, so off-diagonal sequences never terminate artificially.
inline GradedVector geometric_probe(std::size_t k, std::uint64_t degree_horizon) {
    // Exact tail mass: sum over t >= H of #states(k,t) * 4^{-t}, bounded by
    // ratio comparison with a geometric series.
    auto rule = [](const MultiIndex& a) {
        return cplx(std::pow(2.0, -static_cast<double>(a.degree())), 0.0);
    };
    double tail = 0.0;
    {
        double term = static_cast<double>(states_at_degree(k, degree_horizon)) *
                      std::pow(4.0, -static_cast<double>(degree_horizon));
        // #states grows polynomially; 4^{-t} dominates. Sum a safe geometric majorant.
        for (int i = 0; i < 200 && term > 0.0; ++i) {
            tail += term;
            term *= 0.5;
        }
    }
    GradedVector v = materialize_rule(k, rule, degree_horizon, tail);
    const double n = std::sqrt(v.norm_sq());
    v *= cplx(1.0 / n, 0.0);
    return v;
}

} // namespace offdiag

#endif
