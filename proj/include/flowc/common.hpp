#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace flowc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ErrorKind {
    invalid_parameter,
    unsupported_shape,
    invalid_slope,
    invalid_target,
    contract_violation,
    internal_error,
    invalid_input,
    incompatible_nets,
    not_invertible,
    parse_error,
    stiffness_failure,
    invalid_field,
    fit_shortfall,
    schedule_error,
    divergence_error,
    step_too_large,
    budget_infeasible,
    synthesis_failure,
    certification_failure,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Closed interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] double width() const { return hi - lo; }
    [[nodiscard]] double center() const { return 0.5 * (lo + hi); }
    [[nodiscard]] bool contains(double x) const { return x >= lo && x <= hi; }
    [[nodiscard]] double magnitude() const;
};

/// Leaky-ReLU with leak slope alpha in (0,1).
double leaky_relu(double x, double alpha);

/// Generalised leaky-ReLU: slope 1 on x >= 0 and `slope` on x < 0. For
/// slope = alpha^p this is the sigma_{alpha^p} gadget, also when p < 0.
inline double leaky_relu_general(double x, double slope) { return x >= 0.0 ? x : slope * x; }

/// Inverse of leaky_relu(., alpha).
inline double leaky_relu_inverse(double y, double alpha) { return y >= 0.0 ? y : y / alpha; }

void require_alpha(double alpha);

/// Number of worker threads for batch evaluation; honours FLOWC_THREADS.
std::size_t worker_count();

}  // namespace flowc

#include <functional>

namespace flowc {

/// Runs fn(0..n-1) on up to worker_count() threads. The exception thrown for
/// the smallest index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace flowc
