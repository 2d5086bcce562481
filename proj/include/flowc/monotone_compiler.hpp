#pragma once

#include <functional>
#include <optional>

#include "flowc/scalar_nets.hpp"

namespace flowc {

enum class Direction { increasing, decreasing };

struct MonotoneTarget {
    std::function<double(double)> eval;
    Interval interval{-1.0, 1.0};
    Direction direction = Direction::increasing;
    /// Upper bound on |u''| over the interval. When present the compiler
    /// places nodes adaptively from the interpolation bound instead of using
    /// a uniform value grid.
    std::optional<double> curvature_bound;
};

struct MonotoneOptions {
    std::size_t audit_points = 10000;
    std::size_t spot_check_points = 257;
};

struct CompiledMonotone {
    ScalarNet net;
    AlphaPL pl;  // the function realised by net, in the original coordinate
    double audit_error = 0.0;
    std::size_t nodes = 0;
};

/// u + (eps/2) x for increasing u, u - (eps/2) x for decreasing u; u is
/// expected to live on [-1, 1].
std::function<double(double)> strictify(const MonotoneTarget& u, double eps);

/// Interpolating PL function on [-1, 1] whose consecutive node values differ by
/// at most delta_h. Outside [-1, 1] it extends with the end secants.
PLFunc build_value_grid(const std::function<double(double)>& u_strict, double delta_h);

/// Fold every segment of an increasing PL function into one or two pieces with
/// slopes c*alpha^j. Node values of h are kept exactly.
AlphaPL fold_to_alpha(const PLFunc& h, double alpha, double c);

/// Worst deviation of a single folded segment from its chord.
double fold_deviation(double dx, double slope, double alpha, double c);

ScalarNet compile_monotone(const MonotoneTarget& u, double eps, double alpha);

CompiledMonotone compile_monotone_detailed(const MonotoneTarget& u, double eps, double alpha,
                                           const MonotoneOptions& options = {});

/// Compile a strictly monotone PL target on an interval. The error bound is
/// exact: on each output segment, max chord deviation plus fold deviation.
CompiledMonotone compile_monotone_pl(const PLFunc& target, Interval interval, double eps, double alpha,
                                     const MonotoneOptions& options = {});

}  // namespace flowc
