#pragma once

#include <stdexcept>
#include <string>

namespace gmev {

/// Base of every exception thrown by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: unknown ids, schema violations, broken route-set invariants.
class input_error : public error {
public:
    using error::error;
};

/// Inputs that parse fine but fall outside a model's domain (e.g. V >= 0 for a
/// multiplicative vector, non-positive scales).
class domain_error : public error {
public:
    using error::error;
};

/// A reference-route pair whose non-overlapping part is empty.
class degenerate_pair_error : public domain_error {
public:
    degenerate_pair_error(const std::string& first, const std::string& second)
        : domain_error("degenerate route pair (" + first + ", " + second +
                       "): empty non-overlapping part"),
          first_(first), second_(second) {}

    const std::string& first() const noexcept { return first_; }
    const std::string& second() const noexcept { return second_; }

private:
    std::string first_;
    std::string second_;
};

/// An iterative procedure hit its iteration cap.
class convergence_error : public error {
public:
    convergence_error(const std::string& what, double residual)
        : error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

}  // namespace gmev
