#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "flowc/scalar_nets.hpp"

namespace flowc {

struct Layer {
    Matrix W;
    Vector b;
};

/// Marks a layer whose pre-activation approximates the state at time t.
struct Checkpoint {
    std::size_t layer = 0;
    double t = 0.0;

    bool operator==(const Checkpoint&) const = default;
};

struct NetMeta {
    std::string created_by = "flowc";
    std::string task_hash;
};

/// Width-d leaky-ReLU net with pre-activation output:
/// f_0 = W_0 x + b_0, f_k = W_k sigma(f_{k-1}) + b_k.
struct DeepNet {
    double alpha = 0.5;
    std::size_t dim = 1;
    std::vector<Layer> layers;
    std::vector<Checkpoint> checkpoints;
    NetMeta meta;

    static DeepNet identity(std::size_t dim, double alpha);

    /// Number of activations.
    [[nodiscard]] std::size_t depth() const { return layers.empty() ? 0 : layers.size() - 1; }
    void validate() const;
    /// Smallest |det W_k| relative to the layer's scale.
    [[nodiscard]] double min_relative_determinant() const;
};

Vector eval_deep(const DeepNet& net, const Vector& x);

/// Pre-activation states at every checkpoint, in order.
std::vector<Vector> eval_checkpoints(const DeepNet& net, const Vector& x);

/// second o first; the trailing affine map of `first` absorbs the leading one
/// of `second`.
DeepNet compose_deep(const DeepNet& first, const DeepNet& second);

/// Runs `s` on coordinate `coord` (0-based) and the identity elsewhere.
/// `input_range` bounds the values coord takes; it is only used when s has an
/// odd number of activations, where an extra shifted activation is inserted
/// that acts as the identity on inputs above input_range.lo - width - 1.
DeepNet lift_scalar(const ScalarNet& s, std::size_t coord, std::size_t dim, Interval input_range);

DeepNet embed_affine(const Matrix& M, const Vector& b, double alpha);

/// sigma^{-1} o sigma as a 3-layer net whose first pre-activation is the input.
DeepNet checkpoint_gadget(std::size_t dim, double alpha);

/// Precomputed layer factorisations for repeated inversion.
class DeepNetInverter {
public:
    explicit DeepNetInverter(const DeepNet& net);
    [[nodiscard]] Vector operator()(const Vector& y) const;

private:
    const DeepNet* net_;
    std::vector<Eigen::PartialPivLU<Matrix>> lu_;
};

Vector invert_deep(const DeepNet& net, const Vector& y);

std::string serialize(const DeepNet& net);
DeepNet deserialize(std::string_view text);

}  // namespace flowc
