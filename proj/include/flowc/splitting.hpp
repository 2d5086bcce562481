#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "flowc/ode_engine.hpp"

namespace flowc {

/// One coordinate update x_j += dt * a * tanh(w . x + beta). Indices are 0-based.
struct SubStep {
    std::size_t k = 0;  // macro step
    std::size_t i = 0;  // neuron
    std::size_t j = 0;  // coordinate
    double dt = 0.0;
    double t = 0.0;     // t_k = k * dt
    double a = 0.0;
    Vector w;
    double beta = 0.0;

    [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(w.size()); }
};

struct SplitSchedule {
    std::size_t n = 0;
    std::size_t neurons = 0;
    std::size_t dim = 0;
    double tau = 0.0;
    double dt = 0.0;
    std::vector<SubStep> steps;  // k-major, then neuron, then coordinate
};

SplitSchedule make_schedule(const TanhField& field, std::size_t n);

Vector apply_substep(const Vector& x, const SubStep& s);

/// States after every macro step, x_0 ... x_n.
std::vector<Vector> run_splitting(const Vector& x0, const SplitSchedule& schedule);

/// Final state only.
Vector split_flow(const Vector& x0, const SplitSchedule& schedule);

/// ceil(2 c^2 tau e^{L tau} / (L eps)), saturating at UINT64_MAX.
std::uint64_t required_steps(double c, double L, double tau, double eps);

/// Bound constant c and Lipschitz constant L for a tanh field, from its
/// parameters (valid on all of R^d).
struct SplitConstants {
    double c = 1.0;
    double L = 0.0;
};
SplitConstants split_constants(const TanhField& field);

void write_trajectory_csv(std::ostream& os, const std::vector<Vector>& trajectory, double dt);

}  // namespace flowc
