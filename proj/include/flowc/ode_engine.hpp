#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flowc/common.hpp"

namespace flowc {

struct BoxDomain {
    std::vector<Interval> intervals;

    static BoxDomain cube(std::size_t dim, double lo, double hi);
    [[nodiscard]] std::size_t dim() const { return intervals.size(); }
    [[nodiscard]] bool contains(const Vector& x, double slack = 0.0) const;
    [[nodiscard]] BoxDomain inflated(double r) const;
    [[nodiscard]] Vector lower() const;
    [[nodiscard]] Vector upper() const;
    /// Corners (2^d of them) of the box.
    [[nodiscard]] std::vector<Vector> corners() const;
    void validate() const;
};

/// Parameters of a tanh field on one time interval:
/// v(x) = A tanh(W x + b), A is d x N, W is N x d.
struct TanhParams {
    Matrix A;
    Matrix W;
    Vector b;
};

struct TanhField {
    std::size_t dim = 1;
    std::size_t neurons = 1;
    std::vector<double> knots{0.0, 1.0};  // 0 = t_0 < ... < t_m
    std::vector<TanhParams> pieces;        // one per interval

    /// Interval index for time t; knots belong to the interval on their right.
    [[nodiscard]] std::size_t interval_at(double t) const;
    [[nodiscard]] Vector eval(const Vector& x, double t) const;
    [[nodiscard]] double horizon() const { return knots.back(); }
    void validate() const;
};

enum class FieldKind { analytic, tanh_net };

struct FieldSpec {
    std::string name;
    std::size_t dim = 1;
    std::function<Vector(const Vector&, double)> eval;
    FieldKind kind = FieldKind::analytic;
    std::optional<double> lipschitz_hint;
    std::optional<double> bound_hint;
    /// Times where the field may jump; integration restarts there.
    std::vector<double> knots;
    bool autonomous = true;
    std::shared_ptr<const TanhField> tanh;
};

FieldSpec make_field(const TanhField& field, std::string name = "tanh_net");

/// Registry of named fields: decay1d, rotation2d, vanderpol, pendulum, tanh_demo.
FieldSpec preset_field(const std::string& name);
std::vector<std::string> preset_names();

/// x(t1) from x(0) = x0 by adaptive Dormand-Prince integration.
Vector reference_flow(const FieldSpec& field, const Vector& x0, double t1, double tol = 1e-10);

struct Bounds {
    double M = 0.0;  // after the safety factor
    double L = 0.0;
    double M_sampled = 0.0;
    double L_sampled = 0.0;
    double safety = 1.5;
    bool from_hints = false;
};

Bounds estimate_bounds(const FieldSpec& field, const BoxDomain& domain, double tau, std::uint64_t seed = 7);

BoxDomain omega_tau(const BoxDomain& domain, double M, double L, double tau);

double gronwall_delta(double eps, double tau, double L);

struct FitOptions {
    std::size_t time_intervals = 1;
    std::size_t samples = 4000;
    std::size_t holdout = 8000;
    double ridge = 1e-6;
    double scale_min = 1e-3;  // feature scale range, log-uniform
    double scale_max = 1e-2;
};

struct FitResult {
    TanhField field;
    double achieved_delta = 0.0;
};

/// Random-feature ridge fit of `field` on domain x [0, tau]. Does not check
/// the target.
FitResult fit_tanh_field_unchecked(const FieldSpec& field, const BoxDomain& domain, double tau, std::size_t N,
                                   std::uint64_t seed, const FitOptions& options = {});

/// As above; throws fit-shortfall when achieved_delta > target_delta.
FitResult fit_tanh_field(const FieldSpec& field, const BoxDomain& domain, double tau, std::size_t N,
                         double target_delta, std::uint64_t seed, const FitOptions& options = {});

}  // namespace flowc
