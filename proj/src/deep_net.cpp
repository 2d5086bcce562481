#include "flowc/deep_net.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

namespace flowc {

namespace {

void require_dim(const DeepNet& net, const Vector& x) {
    if (static_cast<std::size_t>(x.size()) != net.dim) {
        throw Error(ErrorKind::invalid_input, "vector dimension does not match the network");
    }
}

inline void activate(Vector& z, double alpha) {
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        if (z[i] < 0.0) z[i] *= alpha;
    }
}

}  // namespace

DeepNet DeepNet::identity(std::size_t dim, double alpha) {
    return embed_affine(Matrix::Identity(dim, dim), Vector::Zero(dim), alpha);
}

void DeepNet::validate() const {
    require_alpha(alpha);
    if (dim == 0) throw Error(ErrorKind::invalid_input, "network dimension must be positive");
    if (layers.empty()) throw Error(ErrorKind::invalid_input, "network has no layers");
    const auto d = static_cast<Eigen::Index>(dim);
    for (const auto& l : layers) {
        if (l.W.rows() != d || l.W.cols() != d || l.b.size() != d) {
            throw Error(ErrorKind::invalid_input, "layer shape does not match the network dimension");
        }
        if (!l.W.allFinite() || !l.b.allFinite()) throw Error(ErrorKind::invalid_input, "non-finite layer entry");
    }
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i].layer > depth()) throw Error(ErrorKind::invalid_input, "checkpoint beyond last layer");
        if (i > 0 && checkpoints[i].layer <= checkpoints[i - 1].layer) {
            throw Error(ErrorKind::invalid_input, "checkpoint layers must be strictly increasing");
        }
    }
}

double DeepNet::min_relative_determinant() const {
    double worst = INFINITY;
    for (const auto& l : layers) {
        const double scale = std::max(1.0, l.W.cwiseAbs().maxCoeff());
        const double det = std::abs(l.W.determinant()) / std::pow(scale, static_cast<double>(dim));
        worst = std::min(worst, det);
    }
    return worst;
}

Vector eval_deep(const DeepNet& net, const Vector& x) {
    require_dim(net, x);
    Vector z = net.layers[0].W * x + net.layers[0].b;
    Vector h(z.size());
    for (std::size_t k = 1; k < net.layers.size(); ++k) {
        h = z;
        activate(h, net.alpha);
        z.noalias() = net.layers[k].W * h;
        z += net.layers[k].b;
    }
    return z;
}

std::vector<Vector> eval_checkpoints(const DeepNet& net, const Vector& x) {
    require_dim(net, x);
    std::vector<Vector> out;
    out.reserve(net.checkpoints.size());
    std::size_t next = 0;
    Vector z = net.layers[0].W * x + net.layers[0].b;
    Vector h(z.size());
    for (std::size_t k = 0;; ++k) {
        while (next < net.checkpoints.size() && net.checkpoints[next].layer == k) {
            out.push_back(z);
            ++next;
        }
        if (k + 1 >= net.layers.size()) break;
        h = z;
        activate(h, net.alpha);
        z.noalias() = net.layers[k + 1].W * h;
        z += net.layers[k + 1].b;
    }
    return out;
}

DeepNet compose_deep(const DeepNet& first, const DeepNet& second) {
    if (first.alpha != second.alpha) throw Error(ErrorKind::incompatible_nets, "alpha mismatch");
    if (first.dim != second.dim) throw Error(ErrorKind::incompatible_nets, "dimension mismatch");
    DeepNet out;
    out.alpha = first.alpha;
    out.dim = first.dim;
    out.meta = first.meta;
    out.layers.reserve(first.layers.size() + second.layers.size() - 1);
    out.layers = first.layers;
    const Layer& head = second.layers.front();
    Layer& tail = out.layers.back();
    tail.b = head.W * tail.b + head.b;
    tail.W = head.W * tail.W;
    out.layers.insert(out.layers.end(), second.layers.begin() + 1, second.layers.end());
    const std::size_t offset = first.depth();
    out.checkpoints = first.checkpoints;
    for (const auto& c : second.checkpoints) {
        Checkpoint shifted{c.layer + offset, c.t};
        if (out.checkpoints.empty() || shifted.layer > out.checkpoints.back().layer) out.checkpoints.push_back(shifted);
    }
    return out;
}

DeepNet embed_affine(const Matrix& M, const Vector& b, double alpha) {
    require_alpha(alpha);
    if (M.rows() != M.cols() || M.rows() != b.size() || M.rows() == 0) {
        throw Error(ErrorKind::invalid_input, "embed_affine needs a square matrix and matching vector");
    }
    DeepNet net;
    net.alpha = alpha;
    net.dim = static_cast<std::size_t>(M.rows());
    net.layers.push_back({M, b});
    return net;
}

DeepNet lift_scalar(const ScalarNet& s, std::size_t coord, std::size_t dim, Interval input_range) {
    s.validate();
    if (coord >= dim) throw Error(ErrorKind::invalid_input, "lift_scalar: coordinate out of range");
    std::vector<ScalarLayer> sl = s.layers;
    if (sl.size() % 2 == 0) {
        // Odd activation count: prepend sigma(x + K) - K, exact for x >= -K.
        const double K = std::max(0.0, -input_range.lo) + input_range.width() + 1.0;
        const ScalarLayer first = sl.front();
        sl.front() = {first.w, first.b - first.w * K};
        sl.insert(sl.begin(), ScalarLayer{1.0, K});
    }
    const std::size_t L = sl.size() - 1;
    const auto d = static_cast<Eigen::Index>(dim);
    const auto j = static_cast<Eigen::Index>(coord);
    DeepNet net;
    net.alpha = s.alpha;
    net.dim = dim;
    net.layers.reserve(L + 1);
    for (std::size_t k = 0; k <= L; ++k) {
        // Protected coordinates: x -> -x -> ... -> (1/alpha) sigma(-sigma(-x)) = x.
        double protect;
        if (L == 0) protect = 1.0;
        else if (k == L) protect = 1.0 / s.alpha;
        else if (k == 0 || k % 2 == 1) protect = -1.0;
        else protect = -1.0 / s.alpha;
        Layer layer{Matrix::Zero(d, d), Vector::Zero(d)};
        layer.W.diagonal().setConstant(protect);
        layer.W(j, j) = sl[k].w;
        layer.b[j] = sl[k].b;
        net.layers.push_back(std::move(layer));
    }
    return net;
}

DeepNet checkpoint_gadget(std::size_t dim, double alpha) {
    require_alpha(alpha);
    const auto d = static_cast<Eigen::Index>(dim);
    DeepNet net;
    net.alpha = alpha;
    net.dim = dim;
    net.layers.push_back({Matrix::Identity(d, d), Vector::Zero(d)});
    net.layers.push_back({-Matrix::Identity(d, d), Vector::Zero(d)});
    net.layers.push_back({-(1.0 / alpha) * Matrix::Identity(d, d), Vector::Zero(d)});
    return net;
}

DeepNetInverter::DeepNetInverter(const DeepNet& net) : net_(&net) {
    net.validate();
    lu_.reserve(net.layers.size());
    for (const auto& l : net.layers) {
        const double scale = std::max(1.0, l.W.cwiseAbs().maxCoeff());
        if (std::abs(l.W.determinant()) <= 1e-12 * std::pow(scale, static_cast<double>(net.dim))) {
            throw Error(ErrorKind::not_invertible, "singular layer matrix");
        }
        lu_.emplace_back(l.W);
    }
}

Vector DeepNetInverter::operator()(const Vector& y) const {
    require_dim(*net_, y);
    const double inv_alpha = 1.0 / net_->alpha;
    Vector z = y;
    for (std::size_t k = net_->layers.size(); k-- > 1;) {
        Vector h = lu_[k].solve(z - net_->layers[k].b);
        for (Eigen::Index i = 0; i < h.size(); ++i) {
            if (h[i] < 0.0) h[i] *= inv_alpha;
        }
        z = std::move(h);
    }
    return lu_[0].solve(z - net_->layers[0].b);
}

Vector invert_deep(const DeepNet& net, const Vector& y) { return DeepNetInverter(net)(y); }

std::string serialize(const DeepNet& net) {
    using nlohmann::json;
    json j;
    j["format_version"] = 1;
    j["alpha"] = net.alpha;
    j["dim"] = net.dim;
    json layers = json::array();
    for (const auto& l : net.layers) {
        json W = json::array();
        for (Eigen::Index r = 0; r < l.W.rows(); ++r) {
            for (Eigen::Index c = 0; c < l.W.cols(); ++c) W.push_back(l.W(r, c));
        }
        json b = json::array();
        for (Eigen::Index r = 0; r < l.b.size(); ++r) b.push_back(l.b[r]);
        layers.push_back({{"W", std::move(W)}, {"b", std::move(b)}});
    }
    j["layers"] = std::move(layers);
    json cps = json::array();
    for (const auto& c : net.checkpoints) cps.push_back({{"layer", c.layer}, {"t", c.t}});
    j["checkpoints"] = std::move(cps);
    j["meta"] = {{"depth", net.depth()}, {"created_by", net.meta.created_by}, {"task_hash", net.meta.task_hash}};
    return j.dump() + "\n";
}

DeepNet deserialize(std::string_view text) {
    using nlohmann::json;
    try {
        const json j = json::parse(text);
        if (!j.contains("format_version") || j.at("format_version").get<int>() != 1) {
            throw Error(ErrorKind::parse_error, "unsupported or missing format_version");
        }
        DeepNet net;
        net.alpha = j.at("alpha").get<double>();
        net.dim = j.at("dim").get<std::size_t>();
        const auto d = static_cast<Eigen::Index>(net.dim);
        for (const auto& l : j.at("layers")) {
            const auto& W = l.at("W");
            const auto& b = l.at("b");
            if (W.size() != net.dim * net.dim || b.size() != net.dim) {
                throw Error(ErrorKind::parse_error, "layer has the wrong number of entries");
            }
            Layer layer{Matrix(d, d), Vector(d)};
            for (Eigen::Index r = 0; r < d; ++r) {
                for (Eigen::Index c = 0; c < d; ++c) layer.W(r, c) = W.at(static_cast<std::size_t>(r * d + c)).get<double>();
                layer.b[r] = b.at(static_cast<std::size_t>(r)).get<double>();
            }
            net.layers.push_back(std::move(layer));
        }
        for (const auto& c : j.at("checkpoints")) {
            net.checkpoints.push_back({c.at("layer").get<std::size_t>(), c.at("t").get<double>()});
        }
        if (j.contains("meta")) {
            const auto& m = j.at("meta");
            net.meta.created_by = m.value("created_by", std::string{});
            net.meta.task_hash = m.value("task_hash", std::string{});
        }
        net.validate();
        return net;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::parse_error) throw;
        throw Error(ErrorKind::parse_error, e.what());
    } catch (const std::exception& e) {
        throw Error(ErrorKind::parse_error, e.what());
    }
}

}  // namespace flowc
