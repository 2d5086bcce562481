#include "flowc/scalar_nets.hpp"

#include <algorithm>
#include <cmath>

namespace flowc {

ScalarNet ScalarNet::affine(double alpha, double w, double b) {
    require_alpha(alpha);
    ScalarNet n;
    n.alpha = alpha;
    n.layers = {{w, b}};
    n.constant = (w == 0.0);
    return n;
}

ScalarNet ScalarNet::constant_net(double alpha, double value) {
    ScalarNet n = affine(alpha, 0.0, value);
    n.constant = true;
    return n;
}

void ScalarNet::validate() const {
    require_alpha(alpha);
    if (layers.empty()) throw Error(ErrorKind::invalid_input, "ScalarNet: no layers");
    bool has_zero = false;
    for (const auto& l : layers) {
        if (!std::isfinite(l.w) || !std::isfinite(l.b)) throw Error(ErrorKind::invalid_input, "ScalarNet: non-finite weight");
        has_zero = has_zero || l.w == 0.0;
    }
    if (has_zero != constant) throw Error(ErrorKind::invalid_input, "ScalarNet: constant flag does not match weights");
}

ScalarNetBuilder& ScalarNetBuilder::affine(double a, double c) {
    pending_.w *= a;
    pending_.b = a * pending_.b + c;
    return *this;
}

ScalarNetBuilder& ScalarNetBuilder::activate() {
    layers_.push_back(pending_);
    pending_ = {};
    return *this;
}

ScalarNetBuilder& ScalarNetBuilder::power_activation(int q) {
    if (q > 0) {
        for (int k = 0; k < q; ++k) activate();
    } else if (q < 0) {
        affine(-1.0, 0.0);
        for (int k = 0; k < -q; ++k) activate();
        affine(-std::pow(alpha_, q), 0.0);
    }
    return *this;
}

ScalarNet ScalarNetBuilder::finish() const {
    ScalarNet n;
    n.alpha = alpha_;
    n.layers = layers_;
    n.layers.push_back(pending_);
    for (const auto& l : n.layers) n.constant = n.constant || l.w == 0.0;
    return n;
}

double eval_scalar(const ScalarNet& net, double x) {
    double z = net.layers[0].w * x + net.layers[0].b;
    const double a = net.alpha;
    for (std::size_t k = 1; k < net.layers.size(); ++k) {
        const double h = z >= 0.0 ? z : a * z;
        z = net.layers[k].w * h + net.layers[k].b;
    }
    return z;
}

AlphaPL extract_pl(const ScalarNet& net) {
    net.validate();
    if (net.constant) {
        return AlphaPL{PLFunc::line(0.0, eval_scalar(net, 0.0)), net.alpha, 0.0, {0}};
    }
    PLFunc f = PLFunc::line(net.layers[0].w, net.layers[0].b);
    for (std::size_t k = 1; k < net.layers.size(); ++k) {
        f = affine_post(compose_leaky(f, net.alpha), net.layers[k].w, net.layers[k].b);
    }
    auto g = classify_alpha_power(f, net.alpha);
    if (!g) throw Error(ErrorKind::internal_error, "extract_pl: slopes lost their alpha-power structure");
    return *g;
}

ScalarNet expand_power(int p, double alpha) {
    require_alpha(alpha);
    if (p == 0) throw Error(ErrorKind::invalid_parameter, "expand_power: p must be nonzero");
    return ScalarNetBuilder(alpha).power_activation(p).finish();
}

ScalarNet from_alpha_pl(const AlphaPL& g_in) {
    require_alpha(g_in.alpha);
    const PLFunc& f0 = g_in.base;
    if (g_in.c == 0.0 || f0.is_constant()) return ScalarNet::constant_net(g_in.alpha, eval_pl(f0, 0.0));
    if (!f0.strictly_monotone()) {
        throw Error(ErrorKind::unsupported_shape, "from_alpha_pl requires a strictly monotone function");
    }
    if (g_in.exponents.size() != f0.slopes.size()) {
        throw Error(ErrorKind::invalid_input, "from_alpha_pl: exponent count differs from slope count");
    }

    // Anchor at the steepest piece r and work with increasing h = g / |slope_r|,
    // so every slope of h is at most 1 and rounding is never amplified by the
    // later bends.
    const double sign = f0.strictly_increasing() ? 1.0 : -1.0;
    const std::size_t r = static_cast<std::size_t>(
        std::min_element(g_in.exponents.begin(), g_in.exponents.end()) - g_in.exponents.begin());
    const double scale = sign * f0.slopes[r];
    const PLFunc h = affine_post(f0, 1.0 / (sign * scale), 0.0);

    ScalarNetBuilder builder(g_in.alpha);
    const std::size_t n = h.breakpoints.size();
    if (n == 0) {
        builder.affine(h.slopes[0], h.intercept);
    } else {
        const std::size_t anchor = r < n ? r : n - 1;
        builder.affine(1.0, h.node_values[anchor] - h.breakpoints[anchor]);
        // Bends left of r rescale the left side only.
        for (std::size_t idx = r; idx-- > 0;) {
            const int q = g_in.exponents[idx] - g_in.exponents[idx + 1];
            if (q == 0) continue;
            const double hv = h.node_values[idx];
            builder.affine(1.0, -hv).power_activation(q).affine(1.0, hv);
        }
        // Mirrored bends right of r: -sigma(-(F - hv)) + hv rescales the right side.
        for (std::size_t idx = r; idx < n; ++idx) {
            const int q = g_in.exponents[idx + 1] - g_in.exponents[idx];
            if (q == 0) continue;
            const double hv = h.node_values[idx];
            builder.affine(-1.0, hv).power_activation(q).affine(-1.0, hv);
        }
    }
    builder.affine(sign * scale, 0.0);
    return builder.finish();
}

int relu_piece_count(std::span<const ScalarLayer> layers) {
    if (layers.empty()) throw Error(ErrorKind::invalid_input, "relu_piece_count: no layers");
    PLFunc f = PLFunc::line(layers[0].w, layers[0].b);
    for (std::size_t k = 1; k < layers.size(); ++k) {
        f = canonicalize(affine_post(compose_activation(f, 0.0), layers[k].w, layers[k].b));
    }
    return static_cast<int>(canonicalize(f).pieces());
}

ScalarNet then(const ScalarNet& first, const ScalarNet& second) {
    if (first.alpha != second.alpha) throw Error(ErrorKind::incompatible_nets, "then: alpha mismatch");
    ScalarNet out;
    out.alpha = first.alpha;
    out.layers = first.layers;
    const ScalarLayer last = out.layers.back();
    const ScalarLayer head = second.layers.front();
    out.layers.back() = {head.w * last.w, head.w * last.b + head.b};
    out.layers.insert(out.layers.end(), second.layers.begin() + 1, second.layers.end());
    for (const auto& l : out.layers) out.constant = out.constant || l.w == 0.0;
    return out;
}

}  // namespace flowc
