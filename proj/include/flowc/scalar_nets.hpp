#pragma once

#include <span>
#include <vector>

#include "flowc/pl_algebra.hpp"

namespace flowc {

struct ScalarLayer {
    double w = 1.0;
    double b = 0.0;
};

/// Width-1 leaky-ReLU net: f_0 = w_0 x + b_0, f_k = w_k sigma(f_{k-1}) + b_k.
/// The output is the last pre-activation.
struct ScalarNet {
    double alpha = 0.5;
    std::vector<ScalarLayer> layers;
    bool constant = false;

    static ScalarNet affine(double alpha, double w, double b);
    static ScalarNet constant_net(double alpha, double value);

    /// Number of activations.
    [[nodiscard]] std::size_t depth() const { return layers.empty() ? 0 : layers.size() - 1; }
    void validate() const;
};

/// Accumulates layers; affine maps are folded into a pending layer until the
/// next activation.
class ScalarNetBuilder {
public:
    explicit ScalarNetBuilder(double alpha) : alpha_(alpha) {}

    /// x -> a*x + c applied to the current signal.
    ScalarNetBuilder& affine(double a, double c);
    ScalarNetBuilder& activate();
    /// sigma_{alpha^q} for any integer q (q = 0 is a no-op).
    ScalarNetBuilder& power_activation(int q);
    [[nodiscard]] std::size_t activations() const { return layers_.size(); }
    ScalarNet finish() const;

private:
    double alpha_;
    std::vector<ScalarLayer> layers_;
    ScalarLayer pending_{};
};

double eval_scalar(const ScalarNet& net, double x);

AlphaPL extract_pl(const ScalarNet& net);

/// sigma_{alpha^p} as a width-1 net with |p| activations.
ScalarNet expand_power(int p, double alpha);

ScalarNet from_alpha_pl(const AlphaPL& g);

/// Pieces of the function realised by the layers with plain ReLU activations.
int relu_piece_count(std::span<const ScalarLayer> layers);

/// second o first, merging the junction affine maps.
ScalarNet then(const ScalarNet& first, const ScalarNet& second);

}  // namespace flowc
