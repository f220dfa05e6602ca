#pragma once

#include <stdexcept>
#include <string>

namespace kplane {

/// Raised when a parameter violates a stated domain constraint.
/// The message names the violated inequality so front ends can surface it.
class domain_violation : public std::invalid_argument {
public:
    explicit domain_violation(std::string constraint, std::string detail = {})
        : std::invalid_argument(detail.empty() ? constraint
                                               : constraint + " (" + detail + ")"),
          constraint_(std::move(constraint)) {}

    const std::string& constraint() const noexcept { return constraint_; }

private:
    std::string constraint_;
};

/// Raised when a computation cannot proceed numerically (overflow of a
/// log-domain result, exhausted retries, exceptional set of a chart, ...).
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {
inline void require(bool ok, const std::string& constraint, const std::string& detail = {}) {
    if (!ok) throw domain_violation(constraint, detail);
}
} // namespace detail

} // namespace kplane
