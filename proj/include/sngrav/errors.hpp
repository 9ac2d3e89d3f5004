#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sngrav {

// Invalid input or a request outside the model's domain. The CLI maps it to exit code 1.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An iterative or adaptive numerical procedure did not converge. The CLI maps it to exit code 2.
// The trace holds the per-iteration residuals, or other diagnostics, for post-mortem inspection.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, std::vector<double> trace = {})
        : std::runtime_error(what), trace_(std::move(trace)) {}
    const std::vector<double>& trace() const noexcept { return trace_; }

private:
    std::vector<double> trace_;
};

}  // namespace sngrav
