#include "flowc/monotone_compiler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace flowc {

namespace {

void require_eps(double eps) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw Error(ErrorKind::invalid_parameter, "eps must be positive");
}

void require_interval(Interval I) {
    if (!(I.lo < I.hi) || !std::isfinite(I.lo) || !std::isfinite(I.hi)) {
        throw Error(ErrorKind::invalid_parameter, "interval must satisfy lo < hi");
    }
}

double grid_point(Interval I, std::size_t i, std::size_t n) {
    if (i + 1 == n) return I.hi;
    return I.lo + I.width() * static_cast<double>(i) / static_cast<double>(n - 1);
}

// Sample the target, reject non-finite values and direction violations.
std::vector<double> spot_check(const MonotoneTarget& u, std::size_t n) {
    std::vector<double> ys(n);
    double mag = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        ys[i] = u.eval(grid_point(u.interval, i, n));
        if (!std::isfinite(ys[i])) throw Error(ErrorKind::invalid_target, "target is not finite on the interval");
        mag = std::max(mag, std::abs(ys[i]));
    }
    const double sign = u.direction == Direction::increasing ? 1.0 : -1.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (sign * (ys[i + 1] - ys[i]) < -1e-12 * mag) {
            std::ostringstream os;
            os << "target is not monotone in the declared direction near x = " << grid_point(u.interval, i, n);
            throw Error(ErrorKind::contract_violation, os.str());
        }
    }
    return ys;
}

template <class F>
double audit(const F& target, const ScalarNet& net, Interval I, std::size_t n) {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = grid_point(I, i, n);
        worst = std::max(worst, std::abs(eval_scalar(net, x) - target(x)));
    }
    return worst;
}

void check_audit(double err, double eps, double magnitude) {
    const double slack = 1e-9 * eps + 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + magnitude);
    if (err > eps + slack) {
        std::ostringstream os;
        os.precision(17);
        os << "audit error " << err << " exceeds eps " << eps;
        throw Error(ErrorKind::internal_error, os.str());
    }
}

// PL interpolant through ascending nodes, extended with the end secants.
PLFunc interpolant(const std::vector<double>& xs, const std::vector<double>& ys) {
    PLFunc h;
    h.breakpoints = xs;
    h.node_values = ys;
    const std::size_t n = xs.size();
    h.slopes.resize(n + 1);
    for (std::size_t i = 0; i + 1 < n; ++i) h.slopes[i + 1] = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
    h.slopes[0] = h.slopes[1];
    h.slopes[n] = h.slopes[n - 1];
    return h;
}

AlphaPL negate(const AlphaPL& g) {
    AlphaPL out = g;
    out.base = affine_post(g.base, -1.0, 0.0);
    out.c = -g.c;
    return out;
}

CompiledMonotone finish(const AlphaPL& g, std::size_t nodes) {
    CompiledMonotone out;
    out.pl = g;
    out.net = from_alpha_pl(g);
    out.nodes = nodes;
    return out;
}

// Exact affine targets need no approximation.
std::optional<AlphaPL> affine_fast_path(const std::vector<double>& ys, Interval I, double alpha) {
    const std::size_t n = ys.size();
    const double slope = (ys.back() - ys.front()) / I.width();
    double mag = 1.0;
    for (double y : ys) mag = std::max(mag, std::abs(y));
    for (std::size_t i = 0; i < n; ++i) {
        const double line = ys.front() + slope * (grid_point(I, i, n) - I.lo);
        if (std::abs(line - ys[i]) > 1e-13 * mag) return std::nullopt;
    }
    const PLFunc f = PLFunc::line(slope, ys.front() - slope * I.lo);
    return AlphaPL{f, alpha, slope, {0}};
}

CompiledMonotone compile_increasing_grid(const MonotoneTarget& u, double eps, double alpha) {
    const double center = u.interval.center();
    const double half = 0.5 * u.interval.width();
    MonotoneTarget rescaled{[&](double s) { return u.eval(center + half * s); }, {-1.0, 1.0}, Direction::increasing, {}};
    const auto strict = strictify(rescaled, eps);
    const PLFunc h = build_value_grid(strict, eps / 4.0);
    const AlphaPL g = fold_to_alpha(h, alpha, 1.0);
    AlphaPL gx{affine_pre(g.base, 1.0 / half, -center / half), alpha, g.c / half, g.exponents};
    return finish(gx, h.breakpoints.size());
}

CompiledMonotone compile_increasing_adaptive(const MonotoneTarget& u, double eps, double alpha, double K) {
    const Interval I = u.interval;
    const double c = (u.eval(I.hi) - u.eval(I.lo)) / I.width();
    if (!(c > 0.0)) throw Error(ErrorKind::contract_violation, "target has no positive overall slope");
    std::vector<double> xs{I.lo};
    std::vector<double> ys{u.eval(I.lo)};
    const double dx_interp = K > 0.0 ? std::sqrt(8.0 * eps / K) : I.width();
    while (xs.back() < I.hi) {
        const double x0 = xs.back();
        const double y0 = ys.back();
        double dx = std::min(I.hi - x0, dx_interp);
        for (int iter = 0;; ++iter) {
            const double x1 = (I.hi - x0 <= dx) ? I.hi : x0 + dx;
            const double y1 = u.eval(x1);
            const double k = (y1 - y0) / (x1 - x0);
            if (!(k > 0.0)) throw Error(ErrorKind::contract_violation, "target is not strictly increasing");
            const double bound = K * (x1 - x0) * (x1 - x0) / 8.0 + fold_deviation(x1 - x0, k, alpha, c);
            if (bound <= eps) {
                xs.push_back(x1);
                ys.push_back(y1);
                break;
            }
            if (iter > 400) throw Error(ErrorKind::internal_error, "adaptive node placement stalled");
            dx *= std::clamp(0.95 * eps / bound, 0.1, 0.9);
        }
    }
    return finish(fold_to_alpha(interpolant(xs, ys), alpha, c), xs.size());
}

}  // namespace

std::function<double(double)> strictify(const MonotoneTarget& u, double eps) {
    require_eps(eps);
    const double sign = u.direction == Direction::increasing ? 1.0 : -1.0;
    const double k = sign * eps / 2.0;
    return [f = u.eval, k](double x) { return f(x) + k * x; };
}

PLFunc build_value_grid(const std::function<double(double)>& u_strict, double delta_h) {
    require_eps(delta_h);
    const double y_end = u_strict(1.0);
    std::vector<double> xs{-1.0};
    std::vector<double> ys{u_strict(-1.0)};
    if (!std::isfinite(ys[0]) || !std::isfinite(y_end)) throw Error(ErrorKind::invalid_target, "non-finite sample");
    const double sign = y_end >= ys[0] ? 1.0 : -1.0;
    while (xs.back() < 1.0) {
        const double x0 = xs.back();
        const double y0 = ys.back();
        if (sign * (y_end - y0) <= delta_h) {
            xs.push_back(1.0);
            ys.push_back(y_end);
            break;
        }
        // Largest x with |u(x) - u(x0)| <= delta_h, by bisection.
        double lo = x0;
        double hi = 1.0;
        double y_lo = y0;
        while (hi - lo > 1e-12) {
            const double mid = 0.5 * (lo + hi);
            const double ym = u_strict(mid);
            if (!std::isfinite(ym)) throw Error(ErrorKind::invalid_target, "non-finite sample");
            if (sign * (ym - y0) <= delta_h) {
                lo = mid;
                y_lo = ym;
            } else {
                hi = mid;
            }
        }
        if (lo <= x0) {
            lo = hi;
            y_lo = u_strict(hi);
        }
        xs.push_back(lo);
        ys.push_back(y_lo);
    }
    return interpolant(xs, ys);
}

double fold_deviation(double dx, double slope, double alpha, double c) {
    const auto [jlo, jhi] = quantize_slope(slope, alpha, c);
    const double slo = c * std::pow(alpha, jlo);
    const double shi = c * std::pow(alpha, jhi);
    return dx * (slope - slo) * (shi - slope) / (shi - slo);
}

AlphaPL fold_to_alpha(const PLFunc& h, double alpha, double c) {
    require_alpha(alpha);
    if (!(c > 0.0)) throw Error(ErrorKind::invalid_parameter, "fold_to_alpha requires c > 0");
    if (!h.strictly_increasing()) {
        throw Error(ErrorKind::contract_violation, "fold_to_alpha requires a strictly increasing PL function");
    }
    if (h.breakpoints.size() < 2) {
        // No finite segment to fold: only exact powers of c are accepted.
        AlphaPL g{h, alpha, c, {}};
        for (double k : h.slopes) {
            const int j = quantize_slope(k, alpha, c).first;
            if (k - c * std::pow(alpha, j) > 1e-13 * k) {
                throw Error(ErrorKind::contract_violation, "fold_to_alpha needs at least one finite segment");
            }
            g.exponents.push_back(j);
        }
        return g;
    }

    std::vector<double> bps;
    std::vector<double> vals;
    std::vector<int> exps;
    const std::size_t m = h.breakpoints.size();
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double x0 = h.breakpoints[i];
        const double x1 = h.breakpoints[i + 1];
        const double y0 = h.node_values[i];
        const double dx = x1 - x0;
        const double k = h.slopes[i + 1];
        bps.push_back(x0);
        vals.push_back(y0);
        const auto [jlo, jhi] = quantize_slope(k, alpha, c);
        const double slo = c * std::pow(alpha, jlo);
        const double shi = c * std::pow(alpha, jhi);
        if (k - slo <= 1e-13 * k) {
            exps.push_back(jlo);
            continue;
        }
        // g-: low then high; g+: high then low. Prefer whichever continues the previous slope.
        const bool plus = !exps.empty() && exps.back() == jhi;
        const double d = plus ? dx * (k - slo) / (shi - slo) : dx * (shi - k) / (shi - slo);
        const int e1 = plus ? jhi : jlo;
        const int e2 = plus ? jlo : jhi;
        const double xi = x0 + d;
        if (!(xi > x0)) {
            exps.push_back(e2);
        } else if (!(xi < x1)) {
            exps.push_back(e1);
        } else {
            exps.push_back(e1);
            bps.push_back(xi);
            vals.push_back(y0 + (plus ? shi : slo) * d);
            exps.push_back(e2);
        }
    }
    bps.push_back(h.breakpoints[m - 1]);
    vals.push_back(h.node_values[m - 1]);

    // exps[p] is the exponent right of bps[p]; the rays continue their neighbours.
    std::vector<int> all{exps.front()};
    all.insert(all.end(), exps.begin(), exps.end());
    all.push_back(exps.back());
    AlphaPL g;
    g.alpha = alpha;
    g.c = c;
    g.exponents.push_back(all.front());
    for (std::size_t p = 0; p < bps.size(); ++p) {
        if (all[p + 1] == g.exponents.back()) continue;
        g.base.breakpoints.push_back(bps[p]);
        g.base.node_values.push_back(vals[p]);
        g.exponents.push_back(all[p + 1]);
    }
    for (int e : g.exponents) g.base.slopes.push_back(c * std::pow(alpha, e));
    if (g.base.breakpoints.empty()) g.base.intercept = vals.front() - g.base.slopes[0] * bps.front();
    return g;
}

ScalarNet compile_monotone(const MonotoneTarget& u, double eps, double alpha) {
    return compile_monotone_detailed(u, eps, alpha).net;
}

CompiledMonotone compile_monotone_detailed(const MonotoneTarget& u, double eps, double alpha,
                                           const MonotoneOptions& options) {
    require_eps(eps);
    require_alpha(alpha);
    require_interval(u.interval);
    if (!u.eval) throw Error(ErrorKind::invalid_target, "target has no evaluator");
    const auto ys = spot_check(u, std::max<std::size_t>(options.spot_check_points, 3));
    double magnitude = 0.0;
    for (double y : ys) magnitude = std::max(magnitude, std::abs(y));

    CompiledMonotone out;
    if (auto lin = affine_fast_path(ys, u.interval, alpha)) {
        out = finish(*lin, 0);
    } else {
        const bool dec = u.direction == Direction::decreasing;
        MonotoneTarget inc = u;
        if (dec) inc.eval = [f = u.eval](double x) { return -f(x); };
        inc.direction = Direction::increasing;
        out = u.curvature_bound ? compile_increasing_adaptive(inc, eps, alpha, *u.curvature_bound)
                                : compile_increasing_grid(inc, eps, alpha);
        if (dec) {
            out.pl = negate(out.pl);
            out.net = from_alpha_pl(out.pl);
        }
    }
    if (options.audit_points > 0) {
        out.audit_error = audit(u.eval, out.net, u.interval, std::max<std::size_t>(options.audit_points, 2));
        check_audit(out.audit_error, eps, magnitude);
    }
    return out;
}

CompiledMonotone compile_monotone_pl(const PLFunc& target, Interval interval, double eps, double alpha,
                                     const MonotoneOptions& options) {
    require_eps(eps);
    require_alpha(alpha);
    require_interval(interval);
    if (!target.strictly_monotone()) {
        throw Error(ErrorKind::contract_violation, "PL target must be strictly monotone");
    }
    if (target.strictly_decreasing()) {
        CompiledMonotone out = compile_monotone_pl(affine_post(target, -1.0, 0.0), interval, eps, alpha, options);
        out.pl = negate(out.pl);
        out.net = from_alpha_pl(out.pl);
        return out;
    }

    std::vector<double> cand{interval.lo};
    for (double b : target.breakpoints) {
        if (b > interval.lo && b < interval.hi) cand.push_back(b);
    }
    cand.push_back(interval.hi);
    std::vector<double> cval(cand.size());
    for (std::size_t i = 0; i < cand.size(); ++i) cval[i] = eval_pl(target, cand[i]);
    const double c = (cval.back() - cval.front()) / interval.width();

    constexpr std::size_t kWindow = 512;
    std::vector<double> xs{cand[0]};
    std::vector<double> ys{cval[0]};
    std::size_t i = 0;
    while (i + 1 < cand.size()) {
        std::size_t best = i;
        for (std::size_t k = i + 1; k < cand.size() && k <= i + kWindow; ++k) {
            const double dx = cand[k] - cand[i];
            const double slope = (cval[k] - cval[i]) / dx;
            double chord = 0.0;
            for (std::size_t r = i + 1; r < k; ++r) {
                chord = std::max(chord, std::abs(cval[r] - (cval[i] + slope * (cand[r] - cand[i]))));
            }
            if (chord + fold_deviation(dx, slope, alpha, c) <= eps) {
                best = k;
            } else if (k > i + 1) {
                break;
            }
        }
        if (best == i) {
            // One linear piece whose fold is too coarse: split it evenly.
            const double dx = cand[i + 1] - cand[i];
            const double slope = (cval[i + 1] - cval[i]) / dx;
            const double dev = fold_deviation(dx, slope, alpha, c);
            const auto parts = static_cast<std::size_t>(std::ceil(dev / eps * 1.01));
            for (std::size_t p = 1; p < parts; ++p) {
                const double x = cand[i] + dx * static_cast<double>(p) / static_cast<double>(parts);
                xs.push_back(x);
                ys.push_back(eval_pl(target, x));
            }
            best = i + 1;
        }
        xs.push_back(cand[best]);
        ys.push_back(cval[best]);
        i = best;
    }

    CompiledMonotone out = finish(fold_to_alpha(interpolant(xs, ys), alpha, c), xs.size());
    if (options.audit_points > 0) {
        const auto f = [&](double x) { return eval_pl(target, x); };
        out.audit_error = audit(f, out.net, interval, std::max<std::size_t>(options.audit_points, 2));
        check_audit(out.audit_error, eps, std::max(std::abs(cval.front()), std::abs(cval.back())));
    }
    return out;
}

}  // namespace flowc
