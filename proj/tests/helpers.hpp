#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "flowc/pl_algebra.hpp"
#include "flowc/scalar_nets.hpp"

namespace testing_util {

inline std::vector<double> grid(double lo, double hi, std::size_t n) {
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return xs;
}

template <class F, class G>
double sup_diff(F&& f, G&& g, double lo, double hi, std::size_t n = 4001) {
    double m = 0.0;
    for (double x : grid(lo, hi, n)) m = std::max(m, std::abs(f(x) - g(x)));
    return m;
}

/// Random width-1 leaky net with nonzero weights.
inline flowc::ScalarNet random_scalar_net(std::mt19937_64& rng, std::size_t activations, double alpha) {
    std::uniform_real_distribution<double> mag(0.3, 2.0);
    std::uniform_real_distribution<double> bias(-1.0, 1.0);
    std::bernoulli_distribution sign(0.5);
    flowc::ScalarNet net;
    net.alpha = alpha;
    for (std::size_t k = 0; k <= activations; ++k) {
        const double w = (sign(rng) ? 1.0 : -1.0) * mag(rng);
        net.layers.push_back({w, bias(rng)});
    }
    return net;
}

/// Strictly increasing PL function from sorted breakpoints, slopes and value at the first breakpoint.
inline flowc::PLFunc make_pl(std::vector<double> bps, std::vector<double> slopes, double v0) {
    flowc::PLFunc f;
    f.breakpoints = bps;
    f.slopes = slopes;
    f.node_values.resize(bps.size());
    if (!bps.empty()) {
        f.node_values[0] = v0;
        for (std::size_t i = 1; i < bps.size(); ++i)
            f.node_values[i] = f.node_values[i - 1] + slopes[i] * (bps[i] - bps[i - 1]);
    } else {
        f.intercept = v0;
    }
    return f;
}

/// Independent evaluator of a PL function from its pieces.
inline double naive_pl(const flowc::PLFunc& f, double x) {
    if (f.breakpoints.empty()) return f.slopes[0] * x + f.intercept;
    std::size_t i = 0;
    while (i < f.breakpoints.size() && x > f.breakpoints[i]) ++i;
    if (i == 0) return f.node_values[0] + f.slopes[0] * (x - f.breakpoints[0]);
    return f.node_values[i - 1] + f.slopes[i] * (x - f.breakpoints[i - 1]);
}

}  // namespace testing_util
