#include "flowc/flow_synth.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "flowc/monotone_compiler.hpp"

namespace flowc {

namespace {

constexpr double kTanhCurvature = 0.76980035891950104;  // max |tanh''| = 4 / (3 sqrt 3)

Interval affine_range(const Vector& coef, double offset, const BoxDomain& box) {
    Interval r{offset, offset};
    for (std::size_t i = 0; i < box.dim(); ++i) {
        const double c = coef[static_cast<Eigen::Index>(i)];
        const double a = c * box.intervals[i].lo;
        const double b = c * box.intervals[i].hi;
        r.lo += std::min(a, b);
        r.hi += std::max(a, b);
    }
    return r;
}

Interval widen(Interval I) {
    const double pad = 1e-9 * std::max(1.0, I.magnitude());
    if (I.width() <= pad) return {I.lo - pad, I.hi + pad};
    return I;
}

Interval image(const PLFunc& f, Interval I) {
    const double a = eval_pl(f, I.lo);
    const double b = eval_pl(f, I.hi);
    return {std::min(a, b), std::max(a, b)};
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + index + 0x632BE59BD9B4E019ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

struct Built {
    DeepNet net;
    std::string branch;
    std::size_t pivot = 0;
    double delta1 = 0.0;
    double delta4 = 0.0;
};

Built build_substep(const SubStep& s, const BoxDomain& box, double eps, double alpha, const MonotoneOptions& mopt) {
    const std::size_t d = s.dim();
    const std::size_t j = s.j;
    const auto je = static_cast<Eigen::Index>(j);
    const double A = s.dt * s.a;
    const double wj = s.w[je];
    Built out;
    out.pivot = j;

    if (A == 0.0) {
        out.net = DeepNet::identity(d, alpha);
        out.branch = "identity";
        return out;
    }

    // How far tanh's argument moves with the other coordinates over the box.
    double spread = 0.0;
    double center_shift = 0.0;
    bool coupled = false;
    for (std::size_t i = 0; i < d; ++i) {
        if (i == j) continue;
        const double wi = s.w[static_cast<Eigen::Index>(i)];
        coupled = coupled || wi != 0.0;
        spread += std::abs(wi) * 0.5 * box.intervals[i].width();
        center_shift += wi * box.intervals[i].center();
    }
    const double frozen_error = std::abs(A) * spread;

    if (!coupled || frozen_error <= eps / 4.0) {
        const double shift = s.beta + center_shift;
        out.branch = coupled ? "near-trivial" : "trivial";
        if (wj == 0.0) {
            Vector b = Vector::Zero(static_cast<Eigen::Index>(d));
            b[je] = A * std::tanh(shift);
            out.net = embed_affine(Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)), b, alpha);
            out.branch = "affine";
            return out;
        }
        MonotoneTarget u;
        u.eval = [A, wj, shift](double x) { return x + A * std::tanh(wj * x + shift); };
        u.interval = widen(box.intervals[j]);
        u.direction = Direction::increasing;
        u.curvature_bound = std::abs(A) * wj * wj * kTanhCurvature;
        const double tol = eps - frozen_error;
        out.delta1 = tol;
        const auto compiled = compile_monotone_detailed(u, tol, alpha, mopt);
        out.net = lift_scalar(compiled.net, j, d, u.interval);
        return out;
    }

    // General branch: the pivot coordinate m carries mu = (w.x + beta) / w_m.
    std::size_t m = d;
    for (std::size_t i = 0; i < d; ++i) {
        if (i == j) continue;
        if (m == d || std::abs(s.w[static_cast<Eigen::Index>(i)]) > std::abs(s.w[static_cast<Eigen::Index>(m)])) m = i;
    }
    const auto me = static_cast<Eigen::Index>(m);
    const auto de = static_cast<Eigen::Index>(d);
    const double wm = s.w[me];
    const double kappa = (wj / wm) * A;
    out.pivot = m;
    out.branch = "general";

    const StageChain chain{
        {"tanh", StageKind::approx_monotone, 1.0, {}},
        {"update", StageKind::exact_affine, std::abs(A) + std::abs(kappa), {}},
        {"restore", StageKind::approx_monotone, 1.0, {}},
    };
    const auto tol = budget_composition(chain, eps);
    out.delta1 = tol[0];
    out.delta4 = tol[2];

    const Vector ratio = s.w / wm;
    const Interval mu_range = widen(affine_range(ratio, s.beta / wm, box));
    const Matrix I = Matrix::Identity(de, de);

    // F0: x_m <- mu.
    Matrix M0 = I;
    M0.row(me) = ratio.transpose();
    Vector b0 = Vector::Zero(de);
    b0[me] = s.beta / wm;

    // F1: mu -> g1(mu) ~ tanh(w_m mu).
    MonotoneTarget g;
    g.eval = [wm](double mu) { return std::tanh(wm * mu); };
    g.interval = mu_range;
    g.direction = wm > 0.0 ? Direction::increasing : Direction::decreasing;
    g.curvature_bound = wm * wm * kTanhCurvature;
    const auto g1 = compile_monotone_detailed(g, out.delta1, alpha, mopt);

    // F2: x_j <- x_j + A z.
    Matrix M2 = I;
    M2(je, me) = A;

    // F3: exact inverse of g1.
    const ScalarNet g1_inverse = from_alpha_pl(invert_alpha(g1.pl));
    const Interval z_range = widen(image(g1.pl.base, mu_range));

    // F4: mu -> mu + kappa tanh(w_m mu), increasing since |A w_j| < 1.
    MonotoneTarget q;
    q.eval = [wm, kappa](double mu) { return mu + kappa * std::tanh(wm * mu); };
    q.interval = mu_range;
    q.direction = Direction::increasing;
    q.curvature_bound = std::abs(kappa) * wm * wm * kTanhCurvature;
    {
        constexpr int probes = 257;
        double prev = q.eval(mu_range.lo);
        for (int p = 1; p < probes; ++p) {
            const double x = mu_range.lo + mu_range.width() * p / (probes - 1);
            const double cur = q.eval(x);
            if (!(cur > prev)) throw Error(ErrorKind::contract_violation, "restoring stage is not increasing");
            prev = cur;
        }
    }
    const auto g4 = compile_monotone_detailed(q, out.delta4, alpha, mopt);

    // F5: x_m <- q - (sum_{i != m} w_i y_i + beta) / w_m.
    Matrix M5 = I;
    M5.row(me) = -ratio.transpose();
    M5(me, me) = 1.0;
    Vector b5 = Vector::Zero(de);
    b5[me] = -s.beta / wm;

    DeepNet net = embed_affine(M0, b0, alpha);
    append_deep(net, lift_scalar(g1.net, m, d, mu_range));
    append_deep(net, embed_affine(M2, Vector::Zero(de), alpha));
    append_deep(net, lift_scalar(g1_inverse, m, d, z_range));
    append_deep(net, lift_scalar(g4.net, m, d, mu_range));
    append_deep(net, embed_affine(M5, b5, alpha));
    out.net = std::move(net);
    return out;
}

}  // namespace

std::vector<double> budget_composition(const StageChain& chain, double eps) {
    if (!(eps > 0.0)) throw Error(ErrorKind::invalid_parameter, "eps must be positive");
    std::size_t approx = 0;
    for (const auto& st : chain) {
        if (!(st.lipschitz > 0.0) || !std::isfinite(st.lipschitz)) {
            throw Error(ErrorKind::invalid_parameter, "stage '" + st.name + "' needs a finite positive Lipschitz bound");
        }
        if (st.kind == StageKind::approx_monotone) ++approx;
    }
    std::vector<double> delta(chain.size(), 0.0);
    std::size_t r = 0;
    for (std::size_t idx = 0; idx < chain.size(); ++idx) {
        if (chain[idx].kind != StageKind::approx_monotone) continue;
        ++r;
        // Shares eps/2^{n-1}, eps/2^{n-1}, eps/2^{n-2}, ..., eps/2 sum to eps.
        const int power = r == 1 ? static_cast<int>(approx) - 1 : static_cast<int>(approx - r) + 1;
        double share = std::ldexp(eps, -power);
        for (std::size_t k = idx + 1; k < chain.size(); ++k) share /= chain[k].lipschitz;
        if (chain[idx].margin) {
            if (*chain[idx].margin <= 0.0) {
                throw Error(ErrorKind::budget_infeasible, "stage '" + chain[idx].name + "' has no room for error");
            }
            share = std::min(share, *chain[idx].margin);
        }
        delta[idx] = share;
    }
    return delta;
}

void append_deep(DeepNet& acc, const DeepNet& next) {
    if (acc.alpha != next.alpha) throw Error(ErrorKind::incompatible_nets, "alpha mismatch");
    if (acc.dim != next.dim) throw Error(ErrorKind::incompatible_nets, "dimension mismatch");
    const std::size_t offset = acc.depth();
    Layer& tail = acc.layers.back();
    const Layer& head = next.layers.front();
    tail.b = head.W * tail.b + head.b;
    tail.W = head.W * tail.W;
    acc.layers.insert(acc.layers.end(), next.layers.begin() + 1, next.layers.end());
    for (const auto& c : next.checkpoints) {
        Checkpoint shifted{c.layer + offset, c.t};
        if (acc.checkpoints.empty() || shifted.layer > acc.checkpoints.back().layer) acc.checkpoints.push_back(shifted);
    }
}

std::vector<Vector> audit_grid(const BoxDomain& domain, std::size_t count, std::uint64_t seed) {
    std::vector<Vector> pts = domain.corners();
    std::mt19937_64 rng(seed);
    const auto d = static_cast<Eigen::Index>(domain.dim());
    while (pts.size() < count) {
        Vector x(d);
        for (Eigen::Index i = 0; i < d; ++i) {
            const auto& I = domain.intervals[static_cast<std::size_t>(i)];
            x[i] = std::uniform_real_distribution<double>(I.lo, I.hi)(rng);
        }
        pts.push_back(std::move(x));
    }
    return pts;
}

SubstepNet synth_substep_detailed(const SubStep& s, const BoxDomain& domain, double eps, double alpha,
                                  const SynthOptions& options) {
    if (!(eps > 0.0)) throw Error(ErrorKind::invalid_parameter, "eps must be positive");
    require_alpha(alpha);
    domain.validate();
    const std::size_t d = s.dim();
    if (d == 0 || domain.dim() != d || s.j >= d) throw Error(ErrorKind::invalid_input, "substep and domain disagree");
    if (!(s.dt > 0.0)) throw Error(ErrorKind::invalid_parameter, "dt must be positive");
    const double gain = s.dt * std::abs(s.a) * s.w.cwiseAbs().maxCoeff();
    if (!(gain < 1.0)) {
        throw Error(ErrorKind::step_too_large, "dt*|a|*|w|_inf = " + std::to_string(gain) + " must be below 1");
    }

    const auto points = audit_grid(domain, options.audit_points, options.seed);
    MonotoneOptions mopt;
    mopt.audit_points = options.compile_audit_points;

    std::ostringstream history;
    history.precision(6);
    for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
        const double eps_try = std::ldexp(eps, -attempt);
        Built b = build_substep(s, domain, eps_try, alpha, mopt);
        double worst = 0.0;
        double prot = 0.0;
        for (const auto& x : points) {
            const Vector y = eval_deep(b.net, x);
            worst = std::max(worst, (y - apply_substep(x, s)).norm());
            for (std::size_t i = 0; i < d; ++i) {
                if (i == s.j || i == b.pivot) continue;
                const auto ie = static_cast<Eigen::Index>(i);
                prot = std::max(prot, std::abs(y[ie] - x[ie]));
            }
        }
        if (worst <= eps) {
            SubstepNet out;
            out.net = std::move(b.net);
            out.branch = b.branch;
            out.pivot = b.pivot;
            out.delta1 = b.delta1;
            out.delta4 = b.delta4;
            out.audit_error = worst;
            out.protected_error = prot;
            out.retries = attempt;
            return out;
        }
        history << " attempt " << attempt << ": " << b.branch << " error " << worst << ";";
    }
    throw Error(ErrorKind::synthesis_failure, "substep (k=" + std::to_string(s.k) + ", i=" + std::to_string(s.i) +
                                                  ", j=" + std::to_string(s.j) + ") exceeds eps;" + history.str());
}

DeepNet synth_substep(const SubStep& s, const BoxDomain& domain, double eps, double alpha) {
    return synth_substep_detailed(s, domain, eps, alpha).net;
}

namespace {

// Tensor grid over the box with at most ~4097 points.
std::vector<Vector> tensor_grid(const BoxDomain& box, std::vector<std::size_t>& counts) {
    const std::size_t d = box.dim();
    const std::size_t per = d == 1 ? 2049 : d == 2 ? 65 : d == 3 ? 17 : 5;
    counts.assign(d, per);
    std::size_t total = 1;
    for (std::size_t c : counts) total *= c;
    std::vector<Vector> pts(total, Vector(static_cast<Eigen::Index>(d)));
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        for (std::size_t i = 0; i < d; ++i) {
            const std::size_t q = rem % per;
            rem /= per;
            const auto& I = box.intervals[i];
            pts[idx][static_cast<Eigen::Index>(i)] =
                q + 1 == per ? I.hi : I.lo + I.width() * static_cast<double>(q) / static_cast<double>(per - 1);
        }
    }
    return pts;
}

// Working box per substep: bounding box of split trajectories from a grid,
// padded by the observed spread between neighbouring grid images.
std::vector<BoxDomain> substep_boxes(const SplitSchedule& sched, const BoxDomain& domain,
                                     const std::vector<Vector>& extra, double pad) {
    std::vector<std::size_t> counts;
    std::vector<Vector> states = tensor_grid(domain, counts);
    const std::size_t grid_size = states.size();
    states.insert(states.end(), extra.begin(), extra.end());
    const std::size_t d = domain.dim();
    std::vector<std::size_t> stride(d, 1);
    for (std::size_t i = 1; i < d; ++i) stride[i] = stride[i - 1] * counts[i - 1];

    std::vector<BoxDomain> boxes;
    boxes.reserve(sched.steps.size());
    for (const auto& st : sched.steps) {
        BoxDomain b;
        b.intervals.assign(d, Interval{INFINITY, -INFINITY});
        double mag = 1.0;
        for (const auto& x : states) {
            for (std::size_t i = 0; i < d; ++i) {
                const double v = x[static_cast<Eigen::Index>(i)];
                b.intervals[i].lo = std::min(b.intervals[i].lo, v);
                b.intervals[i].hi = std::max(b.intervals[i].hi, v);
                mag = std::max(mag, std::abs(v));
            }
        }
        double gap = 0.0;
        for (std::size_t idx = 0; idx < grid_size; ++idx) {
            std::size_t rem = idx;
            for (std::size_t i = 0; i < d; ++i) {
                const std::size_t q = rem % counts[i];
                rem /= counts[i];
                if (q + 1 < counts[i]) gap = std::max(gap, (states[idx + stride[i]] - states[idx]).norm());
            }
        }
        boxes.push_back(b.inflated(gap + pad + 1e-9 * mag));
        for (auto& x : states) {
            const auto j = static_cast<Eigen::Index>(st.j);
            x[j] += st.dt * st.a * std::tanh(st.w.dot(x) + st.beta);
        }
    }
    return boxes;
}

double max_step_gain(const SplitSchedule& sched) {
    double g = 0.0;
    for (const auto& st : sched.steps) g = std::max(g, st.dt * std::abs(st.a) * st.w.cwiseAbs().maxCoeff());
    return g;
}

nlohmann::json vec_json(const Vector& v) {
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

}  // namespace

std::string CertReport::to_json() const {
    using nlohmann::json;
    json j;
    j["eps"] = eps;
    j["alpha"] = alpha;
    j["tau"] = tau;
    j["eps_parts"] = {{"field", eps_parts[0]}, {"split", eps_parts[1]}, {"synth", eps_parts[2]}};
    j["measured_parts"] = {{"field", measured_parts[0]}, {"split", measured_parts[1]}, {"synth", measured_parts[2]}};
    j["target_delta"] = target_delta;
    j["achieved_delta"] = achieved_delta;
    j["bounds"] = {{"M", bounds.M}, {"L", bounds.L}, {"M_sampled", bounds.M_sampled}, {"L_sampled", bounds.L_sampled},
                   {"safety", bounds.safety}, {"from_hints", bounds.from_hints}};
    json box = json::array();
    for (const auto& I : omega_tau.intervals) box.push_back({I.lo, I.hi});
    j["omega_tau"] = box;
    j["n"] = n;
    j["bound_steps"] = bound_steps;
    j["N"] = neurons;
    j["dim"] = dim;
    j["time_intervals"] = time_intervals;
    j["substeps"] = substeps;
    j["general_substeps"] = general_substeps;
    j["substep_budget"] = substep_budget;
    j["max_substep_error"] = max_substep_error;
    j["depth"] = depth;
    j["layers"] = layers;
    j["audit"] = {{"points", audit.points}, {"max_err", audit.max_err}, {"mean_err", audit.mean_err},
                  {"argmax_point", vec_json(audit.argmax_point)}};
    j["runtime_s"] = runtime_s;
    return j.dump(2) + "\n";
}

FlowResult compile_flow(const FieldSpec& field, const BoxDomain& domain, double tau, double eps, double alpha,
                        const FlowConfig& config) {
    const auto t_start = std::chrono::steady_clock::now();
    if (!(eps > 0.0) || !std::isfinite(eps)) throw Error(ErrorKind::invalid_parameter, "eps must be positive");
    if (!(tau > 0.0) || !std::isfinite(tau)) throw Error(ErrorKind::invalid_parameter, "tau must be positive");
    require_alpha(alpha);
    domain.validate();
    if (domain.dim() != field.dim) throw Error(ErrorKind::invalid_input, "domain dimension differs from the field");
    double share_sum = 0.0;
    for (double s : config.shares) {
        if (!(s > 0.0)) throw Error(ErrorKind::invalid_parameter, "budget shares must be positive");
        share_sum += s;
    }
    if (share_sum > 1.0 + 1e-12) throw Error(ErrorKind::invalid_parameter, "budget shares exceed 1");

    CertReport rep;
    rep.eps = eps;
    rep.alpha = alpha;
    rep.tau = tau;
    for (int i = 0; i < 3; ++i) rep.eps_parts[static_cast<std::size_t>(i)] = eps * config.shares[static_cast<std::size_t>(i)];
    const double eps_field = rep.eps_parts[0];
    const double eps_split = rep.eps_parts[1];
    const double eps_synth = rep.eps_parts[2];

    // Step 1: neural-ODE surrogate.
    rep.bounds = estimate_bounds(field, domain, tau, config.seed);
    rep.omega_tau = omega_tau(domain, rep.bounds.M, rep.bounds.L, tau);
    rep.target_delta = gronwall_delta(eps_field, tau, rep.bounds.L);
    const FitResult fit = fit_tanh_field(field, rep.omega_tau, tau, config.neurons, rep.target_delta, config.seed, config.fit);
    rep.achieved_delta = fit.achieved_delta;
    const TanhField& tf = fit.field;
    const FieldSpec surrogate = make_field(tf, "surrogate");
    rep.neurons = tf.neurons;
    rep.dim = tf.dim;
    rep.time_intervals = tf.pieces.size();
    if (std::abs(tf.horizon() - tau) > 1e-12 * tau) {
        throw Error(ErrorKind::schedule_error, "tanh field horizon differs from tau");
    }
    {
        const auto k = split_constants(tf);
        rep.bound_steps = k.L > 0.0 ? required_steps(k.c, k.L, tau, eps_split) : 1;
    }

    // Reference flows on the audit grid.
    const auto points = audit_grid(domain, config.audit_points, config.seed + 1);
    const std::size_t np = points.size();
    std::vector<Vector> exact(np), surrogate_flow(np);
    parallel_for(np, [&](std::size_t p) {
        exact[p] = reference_flow(field, points[p], tau, config.ref_tol);
        surrogate_flow[p] = reference_flow(surrogate, points[p], tau, config.ref_tol);
    });
    for (std::size_t p = 0; p < np; ++p) {
        rep.measured_parts[0] = std::max(rep.measured_parts[0], (surrogate_flow[p] - exact[p]).norm());
    }

    // Step 2: splitting resolution.
    const std::size_t m = tf.pieces.size();
    std::size_t n = config.n_override.value_or(((std::max<std::size_t>(config.n_min, 1) + m - 1) / m) * m);
    SplitSchedule sched;
    std::vector<Vector> split_end(np);
    for (;;) {
        sched = make_schedule(tf, n);
        bool ok = max_step_gain(sched) < 1.0;
        double err = INFINITY;
        if (ok) {
            parallel_for(np, [&](std::size_t p) { split_end[p] = split_flow(points[p], sched); });
            err = 0.0;
            for (std::size_t p = 0; p < np; ++p) err = std::max(err, (split_end[p] - surrogate_flow[p]).norm());
            ok = err <= eps_split;
        }
        if (ok) {
            rep.measured_parts[1] = err;
            break;
        }
        if (config.n_override) {
            throw Error(ErrorKind::budget_infeasible, "splitting with n = " + std::to_string(n) +
                                                          " misses its share (error " + std::to_string(err) + ")");
        }
        if (2 * n > config.n_max) {
            throw Error(ErrorKind::budget_infeasible, "splitting error " + std::to_string(err) + " above share " +
                                                          std::to_string(eps_split) + " at n = " + std::to_string(n));
        }
        n *= 2;
    }
    rep.n = n;
    rep.substeps = sched.steps.size();

    // Step 3: per-substep synthesis.
    const double eps_sub = eps_synth / static_cast<double>(sched.steps.size());
    rep.substep_budget = eps_sub;
    const auto boxes = substep_boxes(sched, domain, points, eps_synth);
    std::vector<SubstepNet> parts(sched.steps.size());
    parallel_for(sched.steps.size(), [&](std::size_t q) {
        SynthOptions opt = config.synth;
        opt.seed = mix_seed(config.seed, q);
        parts[q] = synth_substep_detailed(sched.steps[q], boxes[q], eps_sub, alpha, opt);
    });

    DeepNet net = DeepNet::identity(tf.dim, alpha);
    const std::size_t per = tf.neurons * tf.dim;
    for (std::size_t q = 0; q < parts.size(); ++q) {
        append_deep(net, parts[q].net);
        rep.max_substep_error = std::max(rep.max_substep_error, parts[q].audit_error);
        if (parts[q].branch == "general") ++rep.general_substeps;
        const std::size_t k = q / per;
        if ((q + 1) % per == 0 && k + 1 < n) {
            DeepNet gadget = checkpoint_gadget(tf.dim, alpha);
            gadget.checkpoints.push_back({0, static_cast<double>(k + 1) * sched.dt});
            append_deep(net, gadget);
        }
    }
    net.checkpoints.push_back({net.depth(), tau});
    net.meta.task_hash = config.task_hash;
    parts.clear();

    // Audit against the original field.
    std::vector<double> err(np), err_synth(np);
    std::vector<AuditSample> samples(np);
    parallel_for(np, [&](std::size_t p) {
        Vector y = eval_deep(net, points[p]);
        err[p] = (y - exact[p]).norm();
        err_synth[p] = (y - split_end[p]).norm();
        samples[p] = {points[p], exact[p], std::move(y)};
    });
    rep.audit.points = np;
    double sum = 0.0;
    std::size_t worst = 0;
    for (std::size_t p = 0; p < np; ++p) {
        sum += err[p];
        if (err[p] > err[worst]) worst = p;
        rep.measured_parts[2] = std::max(rep.measured_parts[2], err_synth[p]);
    }
    rep.audit.max_err = err[worst];
    rep.audit.mean_err = sum / static_cast<double>(np);
    rep.audit.argmax_point = points[worst];
    rep.depth = net.depth();
    rep.layers = net.layers.size();
    rep.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    if (rep.audit.max_err > eps) {
        std::ostringstream os;
        os.precision(17);
        os << "audit error " << rep.audit.max_err << " exceeds eps " << eps << "\n" << rep.to_json();
        throw Error(ErrorKind::certification_failure, os.str());
    }
    return {std::move(net), std::move(rep), std::move(samples)};
}

}  // namespace flowc
