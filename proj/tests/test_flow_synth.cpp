#include <doctest.h>

#include <cmath>
#include <random>

#include "flowc/flow_synth.hpp"

using namespace flowc;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double a : v) x[i++] = a;
    return x;
}

Stage approx(double lip = 1.0) { return {"approx", StageKind::approx_monotone, lip, std::nullopt}; }
Stage exact(double lip) { return {"affine", StageKind::exact_affine, lip, std::nullopt}; }

double substep_error(const DeepNet& net, const SubStep& s, const BoxDomain& dom, std::size_t count, std::uint64_t seed) {
    double m = 0.0;
    for (const Vector& x : audit_grid(dom, count, seed)) m = std::max(m, (eval_deep(net, x) - apply_substep(x, s)).norm());
    return m;
}

}  // namespace

TEST_CASE("budget_composition") {
    auto two = budget_composition({approx(), approx()}, 0.1);
    CHECK(two[0] == doctest::Approx(0.05));
    CHECK(two[1] == doctest::Approx(0.05));

    auto one = budget_composition({approx()}, 0.1);
    CHECK(one[0] == doctest::Approx(0.1));

    auto scaled = budget_composition({approx(), exact(3.0), approx()}, 0.1);
    CHECK(scaled[0] == doctest::Approx(0.05 / 3.0));
    CHECK(scaled[1] == 0.0);
    CHECK(scaled[2] == doctest::Approx(0.05));

    // Propagated sum never exceeds eps.
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> lip(0.5, 3.0);
    for (int t = 0; t < 100; ++t) {
        StageChain c;
        for (int i = 0; i < 5; ++i) c.push_back(i % 2 ? exact(lip(rng)) : approx(lip(rng)));
        const auto d = budget_composition(c, 1.0);
        double total = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            double gain = 1.0;
            for (std::size_t k = i + 1; k < c.size(); ++k) gain *= c[k].lipschitz;
            total += d[i] * gain;
        }
        CHECK(total <= 1.0 + 1e-12);
    }

    StageChain tight{approx(), approx()};
    tight[0].margin = 0.01;
    CHECK(budget_composition(tight, 0.1)[0] == doctest::Approx(0.01));
    tight[0].margin = 0.0;
    CHECK_THROWS_AS(budget_composition(tight, 0.1), Error);
}

TEST_CASE("substep on the trivial branch") {
    SubStep s;
    s.j = 0;
    s.a = 1.2;
    s.dt = 0.2;
    s.w = vec({1.0, 0.0});
    s.beta = 0.1;
    const BoxDomain dom = BoxDomain::cube(2, -1, 1);
    const SubstepNet r = synth_substep_detailed(s, dom, 0.01, 0.5);
    CHECK(r.branch == "trivial");
    CHECK(substep_error(r.net, s, dom, 1000, 3) <= 0.01);
    CHECK(r.protected_error <= 1e-10);
}

TEST_CASE("substep on the general branch") {
    SubStep s;
    s.j = 1;
    s.a = 1.0;
    s.dt = 0.05;
    s.w = vec({1.0, 1.0});
    const BoxDomain dom = BoxDomain::cube(2, -1, 1);
    const SubstepNet r = synth_substep_detailed(s, dom, 0.01, 0.5);
    CHECK(r.branch == "general");
    CHECK(r.pivot == 0);
    CHECK(r.audit_error <= 0.01);
    CHECK(substep_error(r.net, s, dom, 1000, 4) <= 0.01);
    const DeepNetInverter inv(r.net);
    for (const Vector& x : audit_grid(dom, 100, 5)) CHECK((inv(eval_deep(r.net, x)) - x).norm() <= 1e-9);
}

TEST_CASE("substep in three dimensions keeps the protected coordinate") {
    SubStep s;
    s.j = 2;
    s.a = -0.8;
    s.dt = 0.1;
    s.w = vec({0.3, -1.5, 0.9});
    s.beta = -0.2;
    const BoxDomain dom = BoxDomain::cube(3, -1, 1);
    const SubstepNet r = synth_substep_detailed(s, dom, 0.01, 0.3);
    CHECK(r.branch == "general");
    CHECK(r.pivot == 1);
    for (const Vector& x : audit_grid(dom, 500, 6)) CHECK(std::abs(eval_deep(r.net, x)[0] - x[0]) <= 1e-10);
    CHECK(substep_error(r.net, s, dom, 1000, 7) <= 0.01);
}

TEST_CASE("substep preconditions") {
    SubStep s;
    s.j = 0;
    s.a = 1.0;
    s.dt = 1.5;
    s.w = vec({1.0, 0.5});
    try {
        synth_substep(s, BoxDomain::cube(2, -1, 1), 0.01, 0.5);
        FAIL("expected step-too-large");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::step_too_large);
    }
    s.dt = 0.1;
    s.a = 0.0;
    const DeepNet id = synth_substep(s, BoxDomain::cube(2, -1, 1), 0.01, 0.5);
    CHECK((eval_deep(id, vec({0.4, -0.3})) - vec({0.4, -0.3})).norm() == 0.0);
}

TEST_CASE("append_deep") {
    Matrix A(2, 2);
    A << 1, 2, 0, 1;
    DeepNet acc = embed_affine(A, Vector::Zero(2), 0.5);
    append_deep(acc, checkpoint_gadget(2, 0.5));
    append_deep(acc, embed_affine(A.transpose(), vec({1, 0}), 0.5));
    const Vector x = vec({0.3, -0.7});
    CHECK((eval_deep(acc, x) - (A.transpose() * (A * x) + vec({1, 0}))).norm() < 1e-14);
}

TEST_CASE("compile_flow on decay") {
    const auto decay = preset_field("decay1d");
    FlowConfig cfg;
    cfg.neurons = 4;
    cfg.audit_points = 512;
    const FlowResult r = compile_flow(decay, BoxDomain::cube(1, -1, 1), 1.0, 0.05, 0.5, cfg);
    CHECK(r.report.audit.max_err <= 0.05);
    for (double x = -1.0; x <= 1.0; x += 0.01) CHECK(std::abs(eval_deep(r.net, vec({x}))[0] - std::exp(-1.0) * x) <= 0.05);
    CHECK_FALSE(r.net.checkpoints.empty());
    CHECK(r.net.checkpoints.back().t == doctest::Approx(1.0));
    CHECK(r.net.checkpoints.back().layer == r.net.depth());
    const auto cps = eval_checkpoints(r.net, vec({0.5}));
    const std::size_t n = r.report.n;
    REQUIRE(cps.size() == n);
    for (std::size_t k = 0; k < n; ++k)
        CHECK(std::abs(cps[k][0] - 0.5 * std::exp(-r.net.checkpoints[k].t)) <= 0.05);
    CHECK(r.net.min_relative_determinant() > 0.0);

    CHECK_THROWS_AS(compile_flow(decay, BoxDomain::cube(1, -1, 1), 1.0, 0.0, 0.5, cfg), Error);
}

TEST_CASE("compile_flow is deterministic") {
    const auto decay = preset_field("decay1d");
    FlowConfig cfg;
    cfg.neurons = 4;
    cfg.audit_points = 256;
    const auto a = compile_flow(decay, BoxDomain::cube(1, -1, 1), 1.0, 0.05, 0.5, cfg);
    const auto b = compile_flow(decay, BoxDomain::cube(1, -1, 1), 1.0, 0.05, 0.5, cfg);
    CHECK(serialize(a.net) == serialize(b.net));
}

TEST_CASE("audit grid includes the corners") {
    const BoxDomain dom = BoxDomain::cube(2, -1, 2);
    const auto g = audit_grid(dom, 10, 3);
    CHECK(g.size() == 10);
    for (const Vector& c : dom.corners()) {
        bool found = false;
        for (const Vector& x : g) found = found || (x - c).norm() == 0.0;
        CHECK(found);
    }
    for (const Vector& x : g) CHECK(dom.contains(x));
}
