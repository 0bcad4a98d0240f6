#ifndef OFFDIAG_LADDER_HPP
#define OFFDIAG_LADDER_HPP

#include <cstdint>
#include <functional>
#include <string>

#include "offdiag/errors.hpp"

namespace offdiag {

/// An increasing family of degree cutoffs n_1 < n_2 < ...; level j corresponds
/// to the orthogonal projection onto states of degree < n_j. Every cutoff rule
/// here is strictly increasing and unbounded, so the projections exhaust the
/// space.
class ProjectionLadder {
public:
    /// Unit ladder: n_j = j.
    static ProjectionLadder unit() {
        return ProjectionLadder([](std::uint64_t j) { return j; }, "unit");
    }

    /// Stride ladder: n_j = stride * j. Relabeling a unit ladder this way turns
    /// an operator of band order <= stride into a shift-one smooth operator.
    static ProjectionLadder stride(std::uint64_t s) {
        if (s == 0) throw domain_error("ProjectionLadder::stride: stride must be >= 1");
        return ProjectionLadder([s](std::uint64_t j) { return s * j; },
                                "stride:" + std::to_string(s));
    }

    static ProjectionLadder from_rule(std::function<std::uint64_t(std::uint64_t)> rule,
                                      std::string label) {
        ProjectionLadder l(std::move(rule), std::move(label));
        l.validate(64);
        return l;
    }

    /// Degree cutoff of level j (j >= 1).
    std::uint64_t cutoff(std::uint64_t j) const {
        if (j == 0) throw domain_error("ProjectionLadder::cutoff: levels start at 1");
        return rule_(j);
    }

    /// Smallest gap n_{j+1} - n_j over the first `levels` levels.
    std::uint64_t min_gap(std::uint64_t levels = 64) const {
        std::uint64_t g = UINT64_MAX;
        for (std::uint64_t j = 1; j < levels; ++j) {
            const std::uint64_t a = cutoff(j), b = cutoff(j + 1);
            if (b <= a) throw invariant_error("ProjectionLadder: cutoffs not strictly increasing");
            g = std::min(g, b - a);
        }
        return g;
    }

    const std::string& label() const { return label_; }

private:
    ProjectionLadder(std::function<std::uint64_t(std::uint64_t)> rule, std::string label)
        : rule_(std::move(rule)), label_(std::move(label)) {}

    void validate(std::uint64_t levels) const {
        std::uint64_t prev = rule_(1);
        if (prev == 0) throw domain_error("ProjectionLadder: first cutoff must be positive");
        for (std::uint64_t j = 2; j <= levels; ++j) {
            const std::uint64_t c = rule_(j);
            if (c <= prev) throw domain_error("ProjectionLadder: cutoffs must strictly increase");
            prev = c;
        }
    }

    std::function<std::uint64_t(std::uint64_t)> rule_;
    std::string label_;
};

} // namespace offdiag

#endif
