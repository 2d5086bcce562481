#include "flowc/ode_engine.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <random>

namespace flowc {

namespace odeint = boost::numeric::odeint;

BoxDomain BoxDomain::cube(std::size_t dim, double lo, double hi) {
    BoxDomain b;
    b.intervals.assign(dim, Interval{lo, hi});
    return b;
}

bool BoxDomain::contains(const Vector& x, double slack) const {
    if (static_cast<std::size_t>(x.size()) != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i) {
        if (x[static_cast<Eigen::Index>(i)] < intervals[i].lo - slack ||
            x[static_cast<Eigen::Index>(i)] > intervals[i].hi + slack) {
            return false;
        }
    }
    return true;
}

BoxDomain BoxDomain::inflated(double r) const {
    BoxDomain b = *this;
    for (auto& I : b.intervals) {
        I.lo -= r;
        I.hi += r;
    }
    return b;
}

Vector BoxDomain::lower() const {
    Vector v(static_cast<Eigen::Index>(dim()));
    for (std::size_t i = 0; i < dim(); ++i) v[static_cast<Eigen::Index>(i)] = intervals[i].lo;
    return v;
}

Vector BoxDomain::upper() const {
    Vector v(static_cast<Eigen::Index>(dim()));
    for (std::size_t i = 0; i < dim(); ++i) v[static_cast<Eigen::Index>(i)] = intervals[i].hi;
    return v;
}

std::vector<Vector> BoxDomain::corners() const {
    const std::size_t d = dim();
    std::vector<Vector> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
        Vector v(static_cast<Eigen::Index>(d));
        for (std::size_t i = 0; i < d; ++i) {
            v[static_cast<Eigen::Index>(i)] = (mask >> i) & 1U ? intervals[i].hi : intervals[i].lo;
        }
        out.push_back(std::move(v));
    }
    return out;
}

void BoxDomain::validate() const {
    if (intervals.empty()) throw Error(ErrorKind::invalid_parameter, "domain has no coordinates");
    for (const auto& I : intervals) {
        if (!(I.lo < I.hi) || !std::isfinite(I.lo) || !std::isfinite(I.hi)) {
            throw Error(ErrorKind::invalid_parameter, "domain intervals must satisfy lo < hi");
        }
    }
}

std::size_t TanhField::interval_at(double t) const {
    const auto it = std::upper_bound(knots.begin(), knots.end(), t);
    const auto idx = static_cast<std::ptrdiff_t>(it - knots.begin()) - 1;
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(pieces.size()) - 1));
}

Vector TanhField::eval(const Vector& x, double t) const {
    const TanhParams& p = pieces[interval_at(t)];
    return p.A * (p.W * x + p.b).array().tanh().matrix();
}

void TanhField::validate() const {
    if (dim == 0 || neurons == 0) throw Error(ErrorKind::invalid_field, "tanh field needs d >= 1 and N >= 1");
    if (knots.size() < 2 || knots.front() != 0.0) throw Error(ErrorKind::invalid_field, "time grid must start at 0");
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        if (!(knots[i + 1] > knots[i])) throw Error(ErrorKind::invalid_field, "time grid must be strictly increasing");
    }
    if (pieces.size() + 1 != knots.size()) throw Error(ErrorKind::invalid_field, "one parameter set per time interval");
    const auto d = static_cast<Eigen::Index>(dim);
    const auto n = static_cast<Eigen::Index>(neurons);
    for (const auto& p : pieces) {
        if (p.A.rows() != d || p.A.cols() != n || p.W.rows() != n || p.W.cols() != d || p.b.size() != n) {
            throw Error(ErrorKind::invalid_field, "tanh parameter shapes do not match (d, N)");
        }
        if (!p.A.allFinite() || !p.W.allFinite() || !p.b.allFinite()) {
            throw Error(ErrorKind::invalid_field, "non-finite tanh parameter");
        }
    }
}

FieldSpec make_field(const TanhField& field, std::string name) {
    field.validate();
    auto shared = std::make_shared<const TanhField>(field);
    FieldSpec f;
    f.name = std::move(name);
    f.dim = field.dim;
    f.kind = FieldKind::tanh_net;
    f.tanh = shared;
    f.eval = [shared](const Vector& x, double t) { return shared->eval(x, t); };
    f.knots.assign(field.knots.begin() + 1, field.knots.end() - 1);
    f.autonomous = field.pieces.size() == 1;
    return f;
}

namespace {

TanhField tanh_demo() {
    TanhField f;
    f.dim = 2;
    f.neurons = 4;
    f.knots = {0.0, 0.5, 1.0};
    TanhParams p0{Matrix(2, 4), Matrix(4, 2), Vector(4)};
    p0.A << 0.8, -1.1, 0.5, 0.3,
            -0.6, 0.9, 1.2, -0.4;
    p0.W << 1.2, -0.5,
            0.7, 1.1,
            -0.9, 0.6,
            0.4, -1.3;
    p0.b << 0.3, -0.2, 0.1, 0.5;
    TanhParams p1{Matrix(2, 4), Matrix(4, 2), Vector(4)};
    p1.A << 0.6, -0.9, 0.7, 0.2,
            -0.8, 1.0, 0.9, -0.5;
    p1.W << 1.0, -0.7,
            0.5, 1.2,
            -1.1, 0.4,
            0.6, -1.0;
    p1.b << 0.1, 0.2, -0.3, 0.4;
    f.pieces = {p0, p1};
    return f;
}

FieldSpec analytic(std::string name, std::size_t dim, std::function<Vector(const Vector&, double)> eval) {
    FieldSpec f;
    f.name = std::move(name);
    f.dim = dim;
    f.eval = std::move(eval);
    return f;
}

}  // namespace

FieldSpec preset_field(const std::string& name) {
    if (name == "decay1d") return analytic(name, 1, [](const Vector& x, double) -> Vector { return -x; });
    if (name == "rotation2d") {
        return analytic(name, 2, [](const Vector& x, double) {
            Vector v(2);
            v << -x[1], x[0];
            return v;
        });
    }
    if (name == "vanderpol") {
        return analytic(name, 2, [](const Vector& x, double) {
            constexpr double mu = 1.0;
            Vector v(2);
            v << x[1], mu * (1.0 - x[0] * x[0]) * x[1] - x[0];
            return v;
        });
    }
    if (name == "pendulum") {
        return analytic(name, 2, [](const Vector& x, double) {
            Vector v(2);
            v << x[1], -std::sin(x[0]);
            return v;
        });
    }
    if (name == "tanh_demo") return make_field(tanh_demo(), name);
    throw Error(ErrorKind::invalid_parameter, "unknown preset field '" + name + "'");
}

std::vector<std::string> preset_names() { return {"decay1d", "rotation2d", "vanderpol", "pendulum", "tanh_demo"}; }

Vector reference_flow(const FieldSpec& field, const Vector& x0, double t1, double tol) {
    if (!(tol > 0.0)) throw Error(ErrorKind::invalid_parameter, "tolerance must be positive");
    if (static_cast<std::size_t>(x0.size()) != field.dim) throw Error(ErrorKind::invalid_input, "dimension mismatch");
    if (t1 < 0.0) throw Error(ErrorKind::invalid_parameter, "negative integration time");
    if (t1 == 0.0) return x0;

    using State = std::vector<double>;
    State x(x0.data(), x0.data() + x0.size());
    std::vector<double> stops;
    for (double k : field.knots) {
        if (k > 0.0 && k < t1) stops.push_back(k);
    }
    std::sort(stops.begin(), stops.end());
    stops.push_back(t1);

    const auto d = static_cast<Eigen::Index>(field.dim);
    double t0 = 0.0;
    std::size_t steps = 0;
    try {
        for (double tb : stops) {
            // Keep evaluations strictly inside the current segment.
            const double t_cap = std::nextafter(tb, t0);
            auto rhs = [&](const State& s, State& ds, double t) {
                Eigen::Map<const Vector> xs(s.data(), d);
                const Vector v = field.eval(xs, std::min(t, t_cap));
                ds.assign(v.data(), v.data() + v.size());
            };
            auto obs = [&](const State& s, double) {
                if (++steps > 20'000'000) throw Error(ErrorKind::stiffness_failure, "step budget exhausted");
                for (double c : s) {
                    if (!std::isfinite(c)) throw Error(ErrorKind::stiffness_failure, "solution became non-finite");
                }
            };
            auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_dopri5<State>());
            odeint::integrate_adaptive(stepper, rhs, x, t0, tb, std::min(1e-3, tb - t0), obs);
            t0 = tb;
        }
    } catch (const odeint::step_adjustment_error& e) {
        throw Error(ErrorKind::stiffness_failure, e.what());
    } catch (const odeint::no_progress_error& e) {
        throw Error(ErrorKind::stiffness_failure, e.what());
    }
    return Eigen::Map<Vector>(x.data(), d);
}

namespace {

Vector uniform_point(const BoxDomain& box, std::mt19937_64& rng) {
    Vector x(static_cast<Eigen::Index>(box.dim()));
    for (std::size_t i = 0; i < box.dim(); ++i) {
        std::uniform_real_distribution<double> u(box.intervals[i].lo, box.intervals[i].hi);
        x[static_cast<Eigen::Index>(i)] = u(rng);
    }
    return x;
}

Vector checked_eval(const FieldSpec& field, const Vector& x, double t) {
    Vector v = field.eval(x, t);
    if (!v.allFinite()) throw Error(ErrorKind::invalid_field, "field is not finite at a sample point");
    return v;
}

}  // namespace

Bounds estimate_bounds(const FieldSpec& field, const BoxDomain& domain, double tau, std::uint64_t seed) {
    domain.validate();
    if (domain.dim() != field.dim) throw Error(ErrorKind::invalid_input, "domain dimension differs from the field");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ut(0.0, std::max(tau, 0.0));
    std::normal_distribution<double> gauss;

    double diameter = 0.0;
    for (const auto& I : domain.intervals) diameter = std::max(diameter, I.width());

    std::vector<Vector> pts = domain.corners();
    for (int i = 0; i < 2000; ++i) pts.push_back(uniform_point(domain, rng));

    Bounds b;
    for (const auto& x : pts) {
        const double t = ut(rng);
        b.M_sampled = std::max(b.M_sampled, checked_eval(field, x, t).norm());
    }
    for (int i = 0; i < 2000; ++i) {
        const Vector x = uniform_point(domain, rng);
        const double t = ut(rng);
        Vector y;
        if (i % 4 == 0) {
            y = uniform_point(domain, rng);
        } else {
            Vector u(x.size());
            for (Eigen::Index k = 0; k < u.size(); ++k) u[k] = gauss(rng);
            y = x + (1e-3 * diameter / std::max(u.norm(), 1e-300)) * u;
        }
        const double dist = (y - x).norm();
        if (dist == 0.0) continue;
        b.L_sampled = std::max(b.L_sampled, (checked_eval(field, y, t) - checked_eval(field, x, t)).norm() / dist);
    }
    for (int i = 0; i < 500; ++i) {
        const Vector x = uniform_point(domain, rng);
        const double t = ut(rng);
        const Vector v0 = checked_eval(field, x, t);
        for (Eigen::Index k = 0; k < x.size(); ++k) {
            const double h = 1e-6 * std::max(1.0, std::abs(x[k]));
            Vector y = x;
            y[k] += h;
            b.L_sampled = std::max(b.L_sampled, (checked_eval(field, y, t) - v0).norm() / h);
        }
    }
    b.M = b.safety * b.M_sampled;
    b.L = b.safety * b.L_sampled;
    if (field.bound_hint) b.M = *field.bound_hint;
    if (field.lipschitz_hint) b.L = *field.lipschitz_hint;
    b.from_hints = field.bound_hint.has_value() || field.lipschitz_hint.has_value();
    return b;
}

BoxDomain omega_tau(const BoxDomain& domain, double M, double L, double tau) {
    if (M < 0.0 || L < 0.0 || tau < 0.0) throw Error(ErrorKind::invalid_parameter, "M, L, tau must be nonnegative");
    return domain.inflated((M + 1.0) * tau * std::exp(L * tau));
}

double gronwall_delta(double eps, double tau, double L) {
    if (!(eps > 0.0) || !(tau > 0.0)) throw Error(ErrorKind::invalid_parameter, "eps and tau must be positive");
    return std::min(1.0, eps / (tau * std::exp(L * tau)));
}

FitResult fit_tanh_field_unchecked(const FieldSpec& field, const BoxDomain& domain, double tau, std::size_t N,
                                   std::uint64_t seed, const FitOptions& options) {
    if (N == 0) throw Error(ErrorKind::invalid_parameter, "N must be at least 1");
    if (!(tau > 0.0)) throw Error(ErrorKind::invalid_parameter, "tau must be positive");
    if (options.time_intervals == 0) throw Error(ErrorKind::invalid_parameter, "need at least one time interval");
    domain.validate();
    if (domain.dim() != field.dim) throw Error(ErrorKind::invalid_input, "domain dimension differs from the field");
    if (field.kind == FieldKind::tanh_net && field.tanh && field.tanh->neurons <= N) {
        return {*field.tanh, 0.0};
    }

    const std::size_t d = field.dim;
    const auto de = static_cast<Eigen::Index>(d);
    const auto Ne = static_cast<Eigen::Index>(N);
    double R = 1e-12;
    for (const auto& I : domain.intervals) R = std::max(R, I.magnitude());

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> log_scale(std::log(options.scale_min), std::log(options.scale_max));
    std::normal_distribution<double> gauss;

    TanhField out;
    out.dim = d;
    out.neurons = N;
    const std::size_t m = field.autonomous ? 1 : options.time_intervals;
    out.knots.resize(m + 1);
    for (std::size_t i = 0; i <= m; ++i) out.knots[i] = tau * static_cast<double>(i) / static_cast<double>(m);
    out.knots.back() = tau;

    double achieved = 0.0;
    for (std::size_t piece = 0; piece < m; ++piece) {
        const double ta = out.knots[piece];
        const double tb = out.knots[piece + 1];
        std::uniform_real_distribution<double> ut(ta, std::nextafter(tb, ta));

        TanhParams p{Matrix(de, Ne), Matrix(Ne, de), Vector(Ne)};
        Vector s(Ne);
        for (Eigen::Index i = 0; i < Ne; ++i) {
            s[i] = std::exp(log_scale(rng));
            Vector u(de);
            for (Eigen::Index k = 0; k < de; ++k) u[k] = gauss(rng);
            u /= std::max(u.norm(), 1e-300);
            p.W.row(i) = (s[i] / R) * u.transpose();
            p.b[i] = s[i] * unit(rng);
        }

        auto cloud = [&](std::size_t count) {
            std::vector<std::pair<Vector, double>> pts;
            for (auto& c : domain.corners()) pts.emplace_back(std::move(c), field.autonomous ? 0.0 : ut(rng));
            for (std::size_t i = 0; i < count; ++i) {
                Vector x = uniform_point(domain, rng);
                pts.emplace_back(std::move(x), field.autonomous ? 0.0 : ut(rng));
            }
            return pts;
        };

        const auto train = cloud(options.samples);
        const auto ns = static_cast<Eigen::Index>(train.size());
        Matrix Phi(ns, Ne);
        Matrix Y(ns, de);
        for (Eigen::Index r = 0; r < ns; ++r) {
            const auto& [x, t] = train[static_cast<std::size_t>(r)];
            Phi.row(r) = (p.W * x + p.b).array().tanh().matrix().transpose();
            Y.row(r) = checked_eval(field, x, t).transpose();
        }
        // Ridge penalty on s_i a_i, the coefficient's size in the feature's linear regime.
        Matrix G = Phi.transpose() * Phi / static_cast<double>(ns);
        G.diagonal() += options.ridge * s.array().square().matrix();
        const Matrix rhs = Phi.transpose() * Y / static_cast<double>(ns);
        p.A = G.ldlt().solve(rhs).transpose();
        if (!p.A.allFinite()) throw Error(ErrorKind::invalid_field, "ridge solve produced non-finite weights");

        for (const auto& [x, t] : cloud(options.holdout)) {
            const Vector fit = p.A * (p.W * x + p.b).array().tanh().matrix();
            achieved = std::max(achieved, (fit - checked_eval(field, x, t)).norm());
        }
        out.pieces.push_back(std::move(p));
    }
    return {std::move(out), achieved};
}

FitResult fit_tanh_field(const FieldSpec& field, const BoxDomain& domain, double tau, std::size_t N,
                         double target_delta, std::uint64_t seed, const FitOptions& options) {
    FitResult r = fit_tanh_field_unchecked(field, domain, tau, N, seed, options);
    if (r.achieved_delta > target_delta) {
        throw Error(ErrorKind::fit_shortfall, "achieved field error " + std::to_string(r.achieved_delta) +
                                                  " exceeds target " + std::to_string(target_delta));
    }
    return r;
}

}  // namespace flowc
