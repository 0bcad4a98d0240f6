#ifndef OFFDIAG_MULTI_INDEX_HPP
#define OFFDIAG_MULTI_INDEX_HPP

#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <vector>

#include "offdiag/errors.hpp"

namespace offdiag {

/// A point of the graded basis: a k-tuple of occupation numbers.
/// The grading is by total degree |alpha| = sum of components.
class MultiIndex {
public:
    MultiIndex() = default;

    explicit MultiIndex(std::size_t k) : comp_(k, 0) {
        if (k == 0) throw domain_error("MultiIndex: mode count must be >= 1");
    }

    MultiIndex(std::initializer_list<std::uint32_t> init) : comp_(init) {
        if (comp_.empty()) throw domain_error("MultiIndex: mode count must be >= 1");
    }

    explicit MultiIndex(std::vector<std::uint32_t> comps) : comp_(std::move(comps)) {
        if (comp_.empty()) throw domain_error("MultiIndex: mode count must be >= 1");
    }

    std::size_t modes() const { return comp_.size(); }

    std::uint32_t operator[](std::size_t i) const { return comp_[i]; }

    std::uint64_t degree() const {
        std::uint64_t d = 0;
        for (auto c : comp_) d += c;
        return d;
    }

    /// Copy with component i shifted by +1.
    MultiIndex raised(std::size_t i) const {
        MultiIndex r = *this;
        r.comp_[i] += 1;
        return r;
    }

    /// Copy with component i shifted by -1. Caller must ensure comp[i] > 0.
    MultiIndex lowered(std::size_t i) const {
        MultiIndex r = *this;
        r.comp_[i] -= 1;
        return r;
    }

    friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.comp_ == b.comp_; }
    friend bool operator!=(const MultiIndex& a, const MultiIndex& b) { return !(a == b); }

    /// Graded order, ties broken by descending lexicographic comparison of the
    /// tuple, so that e.g. for k=2 the degree-2 level reads (2,0),(1,1),(0,2).
    friend bool operator<(const MultiIndex& a, const MultiIndex& b) {
        const auto da = a.degree(), db = b.degree();
        if (da != db) return da < db;
        for (std::size_t i = 0; i < a.comp_.size(); ++i) {
            if (a.comp_[i] != b.comp_[i]) return a.comp_[i] > b.comp_[i];
        }
        return false;
    }

    friend std::ostream& operator<<(std::ostream& os, const MultiIndex& m) {
        os << '(';
        for (std::size_t i = 0; i < m.comp_.size(); ++i) {
            if (i) os << ',';
            os << m.comp_[i];
        }
        return os << ')';
    }

private:
    std::vector<std::uint32_t> comp_;
};

namespace detail {

inline std::uint64_t checked_add(std::uint64_t a, std::uint64_t b, const char* what) {
    std::uint64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw domain_error(std::string(what) + ": count overflow");
    return r;
}

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, const char* what) {
    std::uint64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw domain_error(std::string(what) + ": count overflow");
    return r;
}

/// binomial(n, r) with overflow detection.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t r, const char* what = "binomial") {
    if (r > n) return 0;
    if (r > n - r) r = n - r;
    std::uint64_t acc = 1;
    for (std::uint64_t i = 1; i <= r; ++i) {
        // acc * (n - r + i) is divisible by i at each step
        acc = checked_mul(acc, n - r + i, what);
        acc /= i;
    }
    return acc;
}

} // namespace detail

/// Number of basis states with degree strictly below n (k modes).
inline std::uint64_t graded_basis_size(std::size_t k, std::uint64_t n) {
    if (k == 0) throw domain_error("graded_basis_size: mode count must be >= 1");
    if (n == 0) return 0;
    return detail::binomial(n - 1 + k, k, "graded_basis_size");
}

/// Number of basis states with degree exactly t (k modes).
inline std::uint64_t states_at_degree(std::size_t k, std::uint64_t t) {
    return detail::binomial(t + k - 1, k - 1, "states_at_degree");
}

/// All states of a given degree, in the session basis order.
inline std::vector<MultiIndex> enumerate_degree(std::size_t k, std::uint32_t t) {
    std::vector<MultiIndex> out;
    std::vector<std::uint32_t> cur(k, 0);
    // descending-lex generation: place the largest feasible leading entries first
    auto rec = [&](auto&& self, std::size_t pos, std::uint32_t rem) -> void {
        if (pos + 1 == k) {
            cur[pos] = rem;
            out.emplace_back(cur);
            return;
        }
        for (std::int64_t j = rem; j >= 0; --j) {
            cur[pos] = static_cast<std::uint32_t>(j);
            self(self, pos + 1, rem - static_cast<std::uint32_t>(j));
        }
    };
    rec(rec, 0, t);
    return out;
}

/// Position of a state inside its own degree level.
inline std::uint64_t rank_in_degree(const MultiIndex& alpha) {
    const std::size_t k = alpha.modes();
    std::uint64_t rank = 0;
    std::uint64_t rem = alpha.degree();
    for (std::size_t i = 0; i + 1 < k; ++i) {
        // states whose component i exceeds alpha[i] come first
        for (std::uint64_t j = rem; j > alpha[i]; --j) {
            rank = detail::checked_add(rank, states_at_degree(k - i - 1, rem - j), "rank_in_degree");
        }
        rem -= alpha[i];
    }
    return rank;
}

/// Global index of a state in the graded basis order.
inline std::uint64_t global_rank(const MultiIndex& alpha) {
    return detail::checked_add(graded_basis_size(alpha.modes(), alpha.degree()),
                               rank_in_degree(alpha), "global_rank");
}

/// Inverse of global_rank for a fixed mode count.
inline MultiIndex global_unrank(std::size_t k, std::uint64_t index) {
    if (k == 0) throw domain_error("global_unrank: mode count must be >= 1");
    std::uint64_t t = 0;
    while (graded_basis_size(k, t + 1) <= index) ++t;
    std::uint64_t within = index - graded_basis_size(k, t);
    std::vector<std::uint32_t> comps(k, 0);
    std::uint64_t rem = t;
    for (std::size_t i = 0; i + 1 < k; ++i) {
        for (std::uint64_t j = rem;; --j) {
            const std::uint64_t block = states_at_degree(k - i - 1, rem - j);
            if (within < block) {
                comps[i] = static_cast<std::uint32_t>(j);
                rem -= j;
                break;
            }
            within -= block;
            if (j == 0) throw invariant_error("global_unrank: rank out of range");
        }
    }
    comps[k - 1] = static_cast<std::uint32_t>(rem);
    return MultiIndex(std::move(comps));
}

} // namespace offdiag

#endif
