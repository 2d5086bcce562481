#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "flowc/common.hpp"

namespace flowc {

/// Continuous piecewise-linear scalar function.
///
/// With n breakpoints there are n+1 slopes; slopes[0] applies left of the
/// first breakpoint. A function without breakpoints is the line
/// slopes[0]*x + intercept.
struct PLFunc {
    std::vector<double> breakpoints;
    std::vector<double> slopes;
    std::vector<double> node_values;
    double intercept = 0.0;  // only used when breakpoints is empty

    static PLFunc line(double slope, double intercept);
    static PLFunc identity() { return line(1.0, 0.0); }

    [[nodiscard]] std::size_t pieces() const { return slopes.size(); }
    [[nodiscard]] bool strictly_increasing() const;
    [[nodiscard]] bool strictly_decreasing() const;
    [[nodiscard]] bool strictly_monotone() const { return strictly_increasing() || strictly_decreasing(); }
    [[nodiscard]] bool is_constant() const;
    /// max(1, |breakpoints|, |node values|); reference magnitude for tolerances.
    [[nodiscard]] double scale() const;
    /// Throws invalid-input when the invariants do not hold.
    void validate() const;
};

double eval_pl(const PLFunc& f, double x);

/// sigma_alpha o f for strictly monotone f.
PLFunc compose_leaky(const PLFunc& f, double alpha);

/// Generalised leaky activation (slope 1 on the positive side, `leak` on the
/// negative side) composed with an arbitrary PL function. leak = 0 gives ReLU.
PLFunc compose_activation(const PLFunc& f, double leak);

PLFunc affine_post(const PLFunc& f, double w, double b);

/// f(p*x + q).
PLFunc affine_pre(const PLFunc& f, double p, double q);

/// Inverse of a strictly monotone PL function.
PLFunc invert_pl(const PLFunc& f);

/// Drops breakpoints whose adjacent slopes agree to relative tolerance `tol`.
PLFunc canonicalize(const PLFunc& f, double tol = 1e-9);

/// PL function whose slopes are c * alpha^exponents[i].
struct AlphaPL {
    PLFunc base;
    double alpha = 0.5;
    double c = 1.0;
    std::vector<int> exponents;

    void validate(double tol = 1e-9) const;
};

std::optional<AlphaPL> classify_alpha_power(const PLFunc& f, double alpha, double tol = 1e-9);

/// Tightest bracket c*alpha^j_lo <= s < c*alpha^j_hi with j_lo = j_hi + 1.
std::pair<int, int> quantize_slope(double s, double alpha, double c);

AlphaPL invert_alpha(const AlphaPL& g);

}  // namespace flowc
