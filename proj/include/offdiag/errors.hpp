#ifndef OFFDIAG_ERRORS_HPP
#define OFFDIAG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace offdiag {

/// Error raised for malformed user input: expressions, configs, bad arguments.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Error raised when an internal invariant is violated (a bug, not user input).
class invariant_error : public std::logic_error {
public:
    explicit invariant_error(const std::string& what) : std::logic_error(what) {}
};

/// Domain errors: precondition failures on operations (mode mismatch,
/// non-symmetric compile, horizon too small, ...).
class domain_error : public std::runtime_error {
public:
    explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace offdiag

#endif
