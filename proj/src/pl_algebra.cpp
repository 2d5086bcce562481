#include "flowc/pl_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace flowc {

namespace {

constexpr double kCollisionTol = 1e-12;

// Index of the piece containing x, for x strictly off the breakpoints.
std::size_t piece_index(const PLFunc& f, double x) {
    return static_cast<std::size_t>(std::upper_bound(f.breakpoints.begin(), f.breakpoints.end(), x) -
                                    f.breakpoints.begin());
}

}  // namespace

PLFunc PLFunc::line(double slope, double intercept) {
    PLFunc f;
    f.slopes = {slope};
    f.intercept = intercept;
    return f;
}

bool PLFunc::strictly_increasing() const {
    return std::all_of(slopes.begin(), slopes.end(), [](double s) { return s > 0.0; });
}

bool PLFunc::strictly_decreasing() const {
    return std::all_of(slopes.begin(), slopes.end(), [](double s) { return s < 0.0; });
}

bool PLFunc::is_constant() const {
    return std::all_of(slopes.begin(), slopes.end(), [](double s) { return s == 0.0; });
}

double PLFunc::scale() const {
    double s = 1.0;
    for (double b : breakpoints) s = std::max(s, std::abs(b));
    for (double v : node_values) s = std::max(s, std::abs(v));
    if (breakpoints.empty()) s = std::max(s, std::abs(intercept));
    return s;
}

void PLFunc::validate() const {
    if (slopes.size() != breakpoints.size() + 1 || node_values.size() != breakpoints.size()) {
        throw Error(ErrorKind::invalid_input, "PLFunc: inconsistent vector lengths");
    }
    for (double s : slopes) {
        if (!std::isfinite(s)) throw Error(ErrorKind::invalid_input, "PLFunc: non-finite slope");
    }
    const double sc = scale();
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (!(breakpoints[i + 1] > breakpoints[i])) {
            throw Error(ErrorKind::invalid_input, "PLFunc: breakpoints not strictly increasing");
        }
        const double predicted = node_values[i] + slopes[i + 1] * (breakpoints[i + 1] - breakpoints[i]);
        const double slope_scale = std::max(1.0, std::abs(slopes[i + 1]));
        if (std::abs(predicted - node_values[i + 1]) > 1e-9 * sc * slope_scale) {
            std::ostringstream os;
            os << "PLFunc: continuity violated at breakpoint " << i + 1;
            throw Error(ErrorKind::invalid_input, os.str());
        }
    }
}

double eval_pl(const PLFunc& f, double x) {
    const auto& bp = f.breakpoints;
    if (bp.empty()) return f.slopes[0] * x + f.intercept;
    const std::size_t idx = piece_index(f, x);  // number of breakpoints <= x
    if (idx == 0) return f.node_values[0] + f.slopes[0] * (x - bp[0]);
    const std::size_t i = idx - 1;
    if (x == bp[i]) return f.node_values[i];
    return f.node_values[i] + f.slopes[i + 1] * (x - bp[i]);
}

PLFunc compose_activation(const PLFunc& f, double leak) {
    auto act = [leak](double v) { return v >= 0.0 ? v : leak * v; };
    if (f.breakpoints.empty()) {
        const double s = f.slopes[0];
        if (s == 0.0) return PLFunc::line(0.0, act(f.intercept));
        PLFunc g;
        g.breakpoints = {-f.intercept / s};
        g.node_values = {0.0};
        g.slopes = s > 0.0 ? std::vector<double>{leak * s, s} : std::vector<double>{s, leak * s};
        return g;
    }

    const auto& bp = f.breakpoints;
    const auto& v = f.node_values;
    const auto& s = f.slopes;
    const std::size_t n = bp.size();
    const double tol = kCollisionTol * f.scale();

    std::vector<double> roots;
    if (s[0] != 0.0 && v[0] != 0.0) {
        const double xi = bp[0] - v[0] / s[0];
        if (xi < bp[0] - tol) roots.push_back(xi);
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if ((v[i] < 0.0 && v[i + 1] > 0.0) || (v[i] > 0.0 && v[i + 1] < 0.0)) {
            const double xi = bp[i] - v[i] / s[i + 1];
            if (xi > bp[i] + tol && xi < bp[i + 1] - tol) roots.push_back(xi);
        }
    }
    if (s[n] != 0.0 && v[n - 1] != 0.0) {
        const double xi = bp[n - 1] - v[n - 1] / s[n];
        if (xi > bp[n - 1] + tol) roots.push_back(xi);
    }

    PLFunc g;
    g.breakpoints.reserve(n + roots.size());
    g.node_values.reserve(n + roots.size());
    std::size_t r = 0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double next = i < n ? bp[i] : INFINITY;
        while (r < roots.size() && roots[r] < next) {
            g.breakpoints.push_back(roots[r++]);
            g.node_values.push_back(0.0);
        }
        if (i < n) {
            g.breakpoints.push_back(bp[i]);
            g.node_values.push_back(act(v[i]));
        }
    }

    const std::size_t m = g.breakpoints.size();
    g.slopes.resize(m + 1);
    for (std::size_t p = 0; p <= m; ++p) {
        double probe;
        if (p == 0) probe = g.breakpoints[0] - 1.0;
        else if (p == m) probe = g.breakpoints[m - 1] + 1.0;
        else probe = 0.5 * (g.breakpoints[p - 1] + g.breakpoints[p]);
        const double slope = s[piece_index(f, probe)];
        g.slopes[p] = eval_pl(f, probe) < 0.0 ? leak * slope : slope;
    }
    return g;
}

PLFunc compose_leaky(const PLFunc& f, double alpha) {
    require_alpha(alpha);
    if (!f.strictly_monotone()) {
        throw Error(ErrorKind::unsupported_shape, "compose_leaky requires a strictly monotone PL function");
    }
    return compose_activation(f, alpha);
}

PLFunc affine_post(const PLFunc& f, double w, double b) {
    PLFunc g = f;
    for (double& s : g.slopes) s *= w;
    for (double& v : g.node_values) v = w * v + b;
    g.intercept = w * f.intercept + b;
    return g;
}

PLFunc affine_pre(const PLFunc& f, double p, double q) {
    if (p == 0.0) return PLFunc::line(0.0, eval_pl(f, q));
    if (f.breakpoints.empty()) return PLFunc::line(f.slopes[0] * p, f.slopes[0] * q + f.intercept);
    PLFunc g;
    const std::size_t n = f.breakpoints.size();
    g.breakpoints.resize(n);
    g.node_values.resize(n);
    g.slopes.resize(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t src = p > 0.0 ? i : n - 1 - i;
        g.breakpoints[i] = (f.breakpoints[src] - q) / p;
        g.node_values[i] = f.node_values[src];
    }
    for (std::size_t i = 0; i <= n; ++i) g.slopes[i] = p * f.slopes[p > 0.0 ? i : n - i];
    return g;
}

PLFunc invert_pl(const PLFunc& f) {
    if (!f.strictly_monotone()) {
        throw Error(ErrorKind::unsupported_shape, "invert_pl requires a strictly monotone PL function");
    }
    if (f.breakpoints.empty()) return PLFunc::line(1.0 / f.slopes[0], -f.intercept / f.slopes[0]);
    const bool inc = f.strictly_increasing();
    const std::size_t n = f.breakpoints.size();
    PLFunc g;
    g.breakpoints.resize(n);
    g.node_values.resize(n);
    g.slopes.resize(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t src = inc ? i : n - 1 - i;
        g.breakpoints[i] = f.node_values[src];
        g.node_values[i] = f.breakpoints[src];
    }
    for (std::size_t i = 0; i <= n; ++i) g.slopes[i] = 1.0 / f.slopes[inc ? i : n - i];
    return g;
}

PLFunc canonicalize(const PLFunc& f, double tol) {
    if (f.breakpoints.empty()) return f;
    const double gap = kCollisionTol * f.scale();

    // Pass 1: collapse negligible pieces.
    PLFunc a;
    a.slopes.push_back(f.slopes[0]);
    for (std::size_t i = 0; i < f.breakpoints.size(); ++i) {
        if (!a.breakpoints.empty() && f.breakpoints[i] - a.breakpoints.back() <= gap) {
            a.slopes.back() = f.slopes[i + 1];
            continue;
        }
        a.breakpoints.push_back(f.breakpoints[i]);
        a.node_values.push_back(f.node_values[i]);
        a.slopes.push_back(f.slopes[i + 1]);
    }

    // Pass 2: merge collinear neighbours.
    PLFunc g;
    g.slopes.push_back(a.slopes[0]);
    for (std::size_t i = 0; i < a.breakpoints.size(); ++i) {
        const double l = g.slopes.back();
        const double r = a.slopes[i + 1];
        const double mag = std::max(std::abs(l), std::abs(r));
        if (std::abs(l - r) <= tol * mag || mag == 0.0) continue;
        g.breakpoints.push_back(a.breakpoints[i]);
        g.node_values.push_back(a.node_values[i]);
        g.slopes.push_back(r);
    }
    if (g.breakpoints.empty()) g.intercept = eval_pl(f, 0.0);
    return g;
}

void AlphaPL::validate(double tol) const {
    require_alpha(alpha);
    base.validate();
    if (exponents.size() != base.slopes.size()) {
        throw Error(ErrorKind::invalid_input, "AlphaPL: exponent count differs from slope count");
    }
    if (c == 0.0) {
        if (!base.is_constant()) throw Error(ErrorKind::invalid_input, "AlphaPL: c = 0 for a nonconstant function");
        return;
    }
    for (std::size_t i = 0; i < exponents.size(); ++i) {
        const double expected = c * std::pow(alpha, exponents[i]);
        if (std::abs(base.slopes[i] - expected) > tol * std::abs(expected)) {
            throw Error(ErrorKind::invalid_input, "AlphaPL: slope is not c*alpha^k");
        }
    }
}

std::optional<AlphaPL> classify_alpha_power(const PLFunc& f, double alpha, double tol) {
    require_alpha(alpha);
    const double c = f.slopes.at(0);
    if (c == 0.0) return std::nullopt;
    AlphaPL g{f, alpha, c, {}};
    g.exponents.reserve(f.slopes.size());
    const double log_alpha = std::log(alpha);
    for (double s : f.slopes) {
        if (s == 0.0 || (s > 0.0) != (c > 0.0)) return std::nullopt;
        const double r = s / c;
        const long k = std::lround(std::log(r) / log_alpha);
        const double ak = std::pow(alpha, static_cast<double>(k));
        if (std::abs(r - ak) > tol * ak) return std::nullopt;
        g.exponents.push_back(static_cast<int>(k));
    }
    return g;
}

std::pair<int, int> quantize_slope(double s, double alpha, double c) {
    require_alpha(alpha);
    if (!(s > 0.0)) throw Error(ErrorKind::invalid_slope, "quantize_slope requires s > 0");
    if (!(c > 0.0)) throw Error(ErrorKind::invalid_parameter, "quantize_slope requires c > 0");
    int j = static_cast<int>(std::ceil(std::log(s / c) / std::log(alpha)));
    while (c * std::pow(alpha, j) > s) ++j;
    while (c * std::pow(alpha, j - 1) <= s) --j;
    return {j, j - 1};
}

AlphaPL invert_alpha(const AlphaPL& g) {
    AlphaPL h;
    h.base = invert_pl(g.base);
    h.alpha = g.alpha;
    h.c = 1.0 / g.c;
    const bool inc = g.base.strictly_increasing();
    const std::size_t n = g.exponents.size();
    h.exponents.resize(n);
    for (std::size_t i = 0; i < n; ++i) h.exponents[i] = -g.exponents[inc ? i : n - 1 - i];
    return h;
}

}  // namespace flowc
