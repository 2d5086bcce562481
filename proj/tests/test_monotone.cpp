#include <doctest.h>

#include <cmath>

#include "flowc/monotone_compiler.hpp"
#include "helpers.hpp"

using namespace flowc;
using testing_util::grid;
using testing_util::sup_diff;

TEST_CASE("strictify") {
    MonotoneTarget zero{[](double) { return 0.0; }};
    const auto z = strictify(zero, 0.1);
    CHECK(z(1.0) == doctest::Approx(0.05));
    CHECK(z(-0.4) == doctest::Approx(-0.02));

    MonotoneTarget id{[](double x) { return x; }};
    CHECK(strictify(id, 0.2)(1.0) == doctest::Approx(1.1));

    MonotoneTarget cube{[](double x) { return x * x * x; }};
    const auto c = strictify(cube, 0.01);
    const auto xs = grid(-1, 1, 20001);
    double min_slope = 1e9;
    for (std::size_t i = 1; i < xs.size(); ++i)
        min_slope = std::min(min_slope, (c(xs[i]) - c(xs[i - 1])) / (xs[i] - xs[i - 1]));
    CHECK(min_slope >= 0.005 - 1e-12);
}

TEST_CASE("build_value_grid") {
    const PLFunc h = build_value_grid([](double x) { return x; }, 0.5);
    CHECK(sup_diff([&](double x) { return eval_pl(h, x); }, [](double x) { return x; }, -1, 1) < 1e-14);
    for (std::size_t i = 1; i < h.node_values.size(); ++i) CHECK(h.node_values[i] - h.node_values[i - 1] <= 0.5 + 1e-12);

    auto th = [](double x) { return std::tanh(x) / std::tanh(1.0); };
    const PLFunc t = build_value_grid(th, 0.01);
    CHECK(sup_diff([&](double x) { return eval_pl(t, x); }, th, -1, 1, 20001) <= 0.01);

    auto flat = [](double x) { return x * x * x + 0.005 * x; };
    const PLFunc f = build_value_grid(flat, 0.02);
    for (std::size_t i = 1; i < f.node_values.size(); ++i) CHECK(f.node_values[i] - f.node_values[i - 1] <= 0.02 + 1e-12);
}

TEST_CASE("fold_to_alpha on one segment of slope 0.7") {
    const PLFunc h = testing_util::make_pl({0.0, 1.0}, {0.7, 0.7, 0.7}, 0.0);
    const AlphaPL g = fold_to_alpha(h, 0.5, 1.0);
    // Inside [0, 1] the fold has slopes 0.5 then 1 with 0.5*xi + (1 - xi) = 0.7.
    bool found = false;
    for (double b : g.base.breakpoints) found = found || std::abs(b - 0.6) < 1e-12;
    CHECK(found);
    CHECK(eval_pl(g.base, 0.0) == doctest::Approx(0.0));
    CHECK(eval_pl(g.base, 1.0) == doctest::Approx(0.7));
    CHECK(eval_pl(g.base, 0.3) == doctest::Approx(0.15));
}

TEST_CASE("fold_to_alpha keeps alpha-power functions") {
    // Rays follow the outer finite segments, so only the span of h's nodes is compared.
    const PLFunc h = testing_util::make_pl({-1.0, -0.5, 0.5, 1.0}, {1.0, 1.0, 0.5, 1.0, 1.0}, 0.0);
    const AlphaPL g = fold_to_alpha(h, 0.5, 1.0);
    CHECK(g.base.breakpoints.size() <= h.breakpoints.size());
    CHECK(sup_diff([&](double x) { return eval_pl(g.base, x); }, [&](double x) { return eval_pl(h, x); }, -1, 1) < 1e-14);
}

TEST_CASE("fold_to_alpha on three segments") {
    const PLFunc h = testing_util::make_pl({-1.0, -0.2, 0.3, 1.0}, {0.8, 0.8, 3.1, 0.13, 0.13}, -0.5);
    const AlphaPL g = fold_to_alpha(h, 0.5, 1.0);
    CHECK_NOTHROW(g.validate());
    double max_gap = 0;
    for (std::size_t i = 1; i < h.node_values.size(); ++i) max_gap = std::max(max_gap, h.node_values[i] - h.node_values[i - 1]);
    for (std::size_t i = 0; i < h.breakpoints.size(); ++i)
        CHECK(eval_pl(g.base, h.breakpoints[i]) == doctest::Approx(h.node_values[i]).epsilon(1e-13));
    CHECK(sup_diff([&](double x) { return eval_pl(g.base, x); }, [&](double x) { return eval_pl(h, x); }, -1, 1) <= max_gap);
    for (std::size_t i = 1; i + 1 < h.breakpoints.size() + 1; ++i) {
        const double dx = h.breakpoints[i] - h.breakpoints[i - 1];
        const double dev = fold_deviation(dx, h.slopes[i], 0.5, 1.0);
        CHECK(sup_diff([&](double x) { return eval_pl(g.base, x); }, [&](double x) { return eval_pl(h, x); },
                       h.breakpoints[i - 1], h.breakpoints[i]) <= dev + 1e-13);
    }
}

TEST_CASE("compile_monotone exact on the identity") {
    MonotoneTarget id{[](double x) { return x; }};
    for (double eps : {0.1, 1e-3}) {
        const auto r = compile_monotone_detailed(id, eps, 0.5);
        CHECK(r.audit_error <= 1e-10);
    }
}

TEST_CASE("compile_monotone on tanh and arctanh") {
    MonotoneTarget th{[](double x) { return std::tanh(x); }};
    const ScalarNet net = compile_monotone(th, 1e-2, 0.5);
    CHECK(sup_diff([&](double x) { return eval_scalar(net, x); }, [](double x) { return std::tanh(x); }, -1, 1, 10000) <=
          1e-2);

    MonotoneTarget at{[](double x) { return std::atanh(x); }, {-0.96, 0.96}};
    const ScalarNet n2 = compile_monotone(at, 1e-2, 0.5);
    CHECK(sup_diff([&](double x) { return eval_scalar(n2, x); }, [](double x) { return std::atanh(x); }, -0.96, 0.96,
                   10000) <= 1e-2);
}

TEST_CASE("compile_monotone on a decreasing target and other alphas") {
    MonotoneTarget dec{[](double x) { return -2.0 * x * x * x - x; }, {-1, 1}, Direction::decreasing};
    for (double alpha : {0.3, 0.7}) {
        const ScalarNet net = compile_monotone(dec, 0.02, alpha);
        CHECK(sup_diff([&](double x) { return eval_scalar(net, x); }, dec.eval, -1, 1, 10000) <= 0.02);
    }
}

TEST_CASE("curvature-guided path") {
    MonotoneTarget th{[](double x) { return 3.0 * x + std::tanh(2.0 * x); }, {-0.5, 2.0}};
    th.curvature_bound = 4.0 * 0.7698;
    const auto r = compile_monotone_detailed(th, 1e-4, 0.5);
    CHECK(r.audit_error <= 1e-4);
    CHECK(sup_diff([&](double x) { return eval_scalar(r.net, x); }, th.eval, -0.5, 2.0, 20001) <= 1e-4);
}

TEST_CASE("contract violations") {
    MonotoneTarget bad{[](double x) { return x * x; }};
    CHECK_THROWS_AS(compile_monotone(bad, 0.01, 0.5), Error);
    MonotoneTarget id{[](double x) { return x; }};
    CHECK_THROWS_AS(compile_monotone(id, 0.0, 0.5), Error);
    CHECK_THROWS_AS(compile_monotone(id, 0.1, 1.5), Error);
}

TEST_CASE("compile_monotone_pl") {
    const PLFunc t = testing_util::make_pl({-0.5, 0.0, 0.5}, {0.3, 1.9, 0.7, 0.1}, -0.2);
    const auto r = compile_monotone_pl(t, {-1, 1}, 1e-4, 0.5);
    CHECK(sup_diff([&](double x) { return eval_scalar(r.net, x); }, [&](double x) { return eval_pl(t, x); }, -1, 1, 20001) <=
          1e-4);
}
