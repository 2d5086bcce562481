// End-to-end acceptance checks; one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "flowc/cli.hpp"
#include "flowc/monotone_compiler.hpp"

using namespace flowc;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(const char* id, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %s: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Vector vec(std::initializer_list<double> v) {
    Vector x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double a : v) x[i++] = a;
    return x;
}

std::vector<Vector> random_points(std::size_t d, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Vector> pts;
    for (std::size_t i = 0; i < n; ++i) {
        Vector x(static_cast<Eigen::Index>(d));
        for (auto& v : x) v = u(rng);
        pts.push_back(x);
    }
    return pts;
}

// 1: scalar monotone compilation.
void criterion1() {
    const std::vector<double> eps_list{0.1, 0.05, 0.01, 0.005};
    bool ok = true;
    std::string detail;
    for (const auto& t : monotone_study_targets()) {
        const auto t0 = Clock::now();
        double worst_ratio = 0.0;
        for (double eps : eps_list) {
            const ScalarNet net = compile_monotone({t.eval, {-1.0, 1.0}}, eps, 0.5);
            double err = 0.0;
            for (int i = 0; i < 10000; ++i) {
                const double x = -1.0 + 2.0 * i / 9999.0;
                err = std::max(err, std::abs(eval_scalar(net, x) - t.eval(x)));
            }
            worst_ratio = std::max(worst_ratio, err / eps);
            ok = ok && err <= eps;
        }
        const double secs = seconds_since(t0);
        ok = ok && secs <= 5.0;
        detail += fmt("%s max err/eps %.3f in %.2fs; ", t.name.c_str(), worst_ratio, secs);
    }
    report("1", ok, detail);
}

// 2: width-1 leaky nets are alpha-power PL functions and back.
void criterion2() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(2024);
    const std::array<double, 3> alphas{0.3, 0.5, 0.7};
    std::uniform_int_distribution<int> depth(0, 12);
    std::uniform_real_distribution<double> mag(0.3, 2.0), bias(-1.0, 1.0);
    std::bernoulli_distribution sign(0.5);
    int bad_nets = 0;
    for (int s = 0; s < 500; ++s) {
        ScalarNet net;
        net.alpha = alphas[static_cast<std::size_t>(s) % 3];
        const int L = depth(rng);
        for (int k = 0; k <= L; ++k) net.layers.push_back({(sign(rng) ? 1.0 : -1.0) * mag(rng), bias(rng)});
        const AlphaPL g = extract_pl(net);
        const bool pieces_ok = g.base.pieces() <= static_cast<std::size_t>(L) + 1;
        const bool classified = classify_alpha_power(g.base, net.alpha).has_value();
        double dev = 0.0;
        for (int i = 0; i <= 400; ++i) {
            const double x = -4.0 + 8.0 * i / 400.0;
            dev = std::max(dev, std::abs(eval_scalar(net, x) - eval_pl(g.base, x)));
        }
        if (!pieces_ok || !classified || dev > 1e-9) ++bad_nets;
    }

    std::uniform_int_distribution<int> ex(-4, 4);
    std::uniform_real_distribution<double> gap(0.1, 1.0), cmag(0.2, 3.0);
    double worst = 0.0;
    for (int s = 0; s < 200; ++s) {
        const double alpha = alphas[static_cast<std::size_t>(s) % 3];
        const double c = (sign(rng) ? 1.0 : -1.0) * cmag(rng);
        const std::size_t nb = 1 + static_cast<std::size_t>(s % 6);
        std::vector<int> e(nb + 1);
        e[0] = ex(rng);
        for (std::size_t i = 1; i <= nb; ++i) {
            do e[i] = ex(rng);
            while (e[i] == e[i - 1]);
        }
        AlphaPL g;
        g.alpha = alpha;
        g.c = c;
        g.exponents = e;
        double x = -2.0;
        double v = bias(rng);
        for (std::size_t i = 0; i < nb; ++i) {
            if (i > 0) {
                const double step = gap(rng);
                x += step;
                v += c * std::pow(alpha, e[i]) * step;
            }
            g.base.breakpoints.push_back(x);
            g.base.node_values.push_back(v);
        }
        for (int k : e) g.base.slopes.push_back(c * std::pow(alpha, k));
        const ScalarNet net = from_alpha_pl(g);
        for (int i = 0; i <= 2000; ++i) {
            const double y = -4.0 + 8.0 * i / 2000.0;
            worst = std::max(worst, std::abs(eval_scalar(net, y) - eval_pl(g.base, y)));
        }
    }
    const double secs = seconds_since(t0);
    report("2", bad_nets == 0 && worst <= 1e-10 && secs <= 10.0,
           fmt("500 nets, %d violations; 200 round trips, max grid error %.2e; %.2fs", bad_nets, worst, secs));
}

// 3: ReLU width-1 nets have at most three pieces.
void criterion3() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> depth(1, 12);
    std::uniform_real_distribution<double> w(-2.0, 2.0), b(-1.0, 1.0);
    int max_pieces = 0;
    int over = 0;
    for (int s = 0; s < 1000; ++s) {
        std::vector<ScalarLayer> layers;
        const int L = depth(rng);
        for (int k = 0; k <= L; ++k) layers.push_back({w(rng), b(rng)});
        const int p = relu_piece_count(layers);
        max_pieces = std::max(max_pieces, p);
        if (p > 3) ++over;
    }
    const double secs = seconds_since(t0);
    report("3", over == 0 && max_pieces == 3 && secs <= 5.0,
           fmt("1000 nets, max pieces %d, %d above 3; %.2fs", max_pieces, over, secs));
}

// 4: first-order convergence of the splitting scheme.
void criterion4() {
    const auto t0 = Clock::now();
    const FieldSpec demo = preset_field("tanh_demo");
    const double tau = 1.0;
    std::vector<Vector> pts;
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j) pts.push_back(vec({-1.0 + i * 0.25, -1.0 + j * 0.25}));
    std::vector<Vector> ref;
    for (const auto& x : pts) ref.push_back(reference_flow(demo, x, tau, 1e-12));
    std::vector<double> dts, errs;
    bool decreasing = true;
    for (std::size_t n : {16, 32, 64, 128, 256}) {
        const SplitSchedule s = make_schedule(*demo.tanh, n);
        double e = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) e = std::max(e, (split_flow(pts[i], s) - ref[i]).norm());
        if (!errs.empty() && e >= errs.back()) decreasing = false;
        dts.push_back(tau / static_cast<double>(n));
        errs.push_back(e);
    }
    const double order = loglog_slope(dts, errs);
    const double secs = seconds_since(t0);
    report("4", decreasing && std::abs(order - 1.0) <= 0.3 && secs <= 30.0,
           fmt("empirical order %.4f (errors %.3e to %.3e); %.2fs", order, errs.front(), errs.back(), secs));
}

// 5: single substep synthesis.
void criterion5(std::vector<DeepNet>& nets) {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(5150);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> gain(0.02, 0.5);
    const double eps = 0.01;
    double worst = 0.0, worst_protected = 0.0;
    int failed = 0, general = 0;
    for (int s = 0; s < 50; ++s) {
        const std::size_t d = (s % 2 == 0) ? 2 : 3;
        SubStep st;
        st.j = static_cast<std::size_t>(rng() % d);
        st.w = Vector(static_cast<Eigen::Index>(d));
        for (auto& v : st.w) v = g(rng);
        st.a = g(rng);
        st.beta = 0.5 * g(rng);
        st.dt = gain(rng) / (std::abs(st.a) * st.w.cwiseAbs().maxCoeff());
        const BoxDomain dom = BoxDomain::cube(d, -1.0, 1.0);
        try {
            const SubstepNet r = synth_substep_detailed(st, dom, eps, 0.5);
            if (r.branch == "general") ++general;
            auto pts = random_points(d, 2000, 9000 + static_cast<std::uint64_t>(s));
            for (const auto& c : dom.corners()) pts.push_back(c);
            for (const auto& x : pts) {
                const Vector y = eval_deep(r.net, x);
                worst = std::max(worst, (y - apply_substep(x, st)).norm());
                for (std::size_t i = 0; i < d; ++i) {
                    if (i == st.j || (r.branch == "general" && i == r.pivot)) continue;
                    const auto k = static_cast<Eigen::Index>(i);
                    worst_protected = std::max(worst_protected, std::abs(y[k] - x[k]));
                }
            }
            nets.push_back(r.net);
        } catch (const Error& e) {
            ++failed;
            std::printf("  substep %d: %s\n", s, e.what());
        }
    }
    const double secs = seconds_since(t0);
    report("5", failed == 0 && worst <= eps && worst_protected <= 1e-10 && secs <= 120.0,
           fmt("50 substeps (%d general), %d failed, max error %.3e, protected drift %.2e; %.2fs", general, failed, worst,
               worst_protected, secs));
}

std::string task_path(const char* name) { return std::string(FLOWC_TASK_DIR) + "/" + name; }

FlowResult compile_task(const TaskConfig& t) {
    return compile_flow(t.field, t.domain, t.tau, t.eps, t.alpha, t.flow);
}

// 6a / 6b: compiled flow maps against analytic flows.
void criterion6(std::vector<DeepNet>& nets, std::string& decay_bytes) {
    {
        const auto t0 = Clock::now();
        try {
            const TaskConfig t = load_task(task_path("decay1d.json"));
            const FlowResult r = compile_task(t);
            double err = 0.0;
            for (int i = 0; i <= 4000; ++i) {
                const double x = -1.0 + 2.0 * i / 4000.0;
                err = std::max(err, std::abs(eval_deep(r.net, vec({x}))[0] - std::exp(-1.0) * x));
            }
            const double secs = seconds_since(t0);
            decay_bytes = serialize(r.net);
            nets.push_back(r.net);
            report("6a", err <= 0.05 && secs <= 600.0,
                   fmt("decay1d max |net(x) - x/e| %.4f over 4001 points (eps 0.05), n %zu, depth %zu; %.2fs", err,
                       r.report.n, r.net.depth(), secs));
        } catch (const Error& e) {
            report("6a", false, e.what());
        }
    }
    {
        const auto t0 = Clock::now();
        try {
            const TaskConfig t = load_task(task_path("rotation2d.json"));
            const FlowResult r = compile_task(t);
            auto pts = random_points(2, 4000, 606);
            for (const auto& c : t.domain.corners()) pts.push_back(c);
            double err = 0.0;
            for (const auto& x : pts) err = std::max(err, (eval_deep(r.net, x) - vec({-x[1], x[0]})).norm());
            const double at10 = (eval_deep(r.net, vec({1.0, 0.0})) - vec({0.0, 1.0})).norm();
            const double secs = seconds_since(t0);
            nets.push_back(r.net);
            report("6b", err <= 0.1 && at10 <= 0.1 && secs <= 600.0,
                   fmt("rotation2d max ||net(x) - Rx|| %.4f over %zu points, ||net(1,0) - (0,1)|| %.4f (eps 0.1), n %zu, "
                       "depth %zu; %.2fs",
                       err, pts.size(), at10, r.report.n, r.net.depth(), secs));
        } catch (const Error& e) {
            report("6b", false, e.what());
        }
    }
}

// 7: every compiled net is invertible layer by layer.
void criterion7(const std::vector<DeepNet>& nets) {
    const auto t0 = Clock::now();
    double worst = 0.0, min_det = 1e300;
    std::size_t idx = 0;
    for (const auto& net : nets) {
        const DeepNetInverter inv(net);
        for (const auto& x : random_points(net.dim, 100, 700 + idx++)) {
            const Vector y = eval_deep(net, x);
            worst = std::max(worst, (inv(y) - x).norm() / std::max(1.0, x.norm()));
        }
        min_det = std::min(min_det, net.min_relative_determinant());
    }
    const double secs = seconds_since(t0);
    report("7", !nets.empty() && worst <= 1e-9 && min_det > 0.0 && secs <= 10.0,
           fmt("%zu nets, max round-trip error %.2e, min relative |det| %.3e; %.2fs", nets.size(), worst, min_det, secs));
}

// 8: a field perturbation below the Gronwall tolerance moves the flow by at most eps.
void criterion8() {
    const auto t0 = Clock::now();
    const FieldSpec decay = preset_field("decay1d");
    const BoxDomain dom = BoxDomain::cube(1, -1.0, 1.0);
    const Bounds b = estimate_bounds(decay, dom, 1.0);
    const double delta = gronwall_delta(0.1, 1.0, b.L_sampled);
    FieldSpec bumped = decay;
    bumped.eval = [delta](const Vector& x, double) { return vec({-x[0] + 0.9 * delta * std::exp(-8.0 * x[0] * x[0])}); };
    double dev = 0.0;
    for (const auto& x : random_points(1, 100, 808)) {
        dev = std::max(dev, std::abs(reference_flow(decay, x, 1.0, 1e-11)[0] - reference_flow(bumped, x, 1.0, 1e-11)[0]));
    }
    const double secs = seconds_since(t0);
    report("8", dev <= 0.1 && secs <= 10.0,
           fmt("L %.3f, delta %.4f, bump 0.9*delta, max flow deviation %.4f over 100 starts; %.2fs", b.L_sampled, delta, dev, secs));
}

// 9: same task and seed give the same net file.
void criterion9(const std::string& first) {
    try {
        const TaskConfig t = load_task(task_path("decay1d.json"));
        const std::string again = serialize(compile_task(t).net);
        report("9", !first.empty() && again == first, fmt("decay1d net recompiled, %zu bytes, identical: %s", again.size(),
                                                          again == first ? "yes" : "no"));
    } catch (const Error& e) {
        report("9", false, e.what());
    }
}

}  // namespace

int main() {
    std::vector<DeepNet> nets;
    std::string decay_bytes;
    const std::vector<std::function<void()>> steps{
        criterion1, criterion2, criterion3, criterion4, [&] { criterion5(nets); },
        [&] { criterion6(nets, decay_bytes); }, [&] { criterion7(nets); }, criterion8,
        [&] { criterion9(decay_bytes); }};
    for (const auto& step : steps) {
        try {
            step();
        } catch (const std::exception& e) {
            report("?", false, std::string("unexpected exception: ") + e.what());
        }
    }
    std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
    return failures == 0 ? 0 : 1;
}
