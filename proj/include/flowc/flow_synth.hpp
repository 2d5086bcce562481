#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "flowc/deep_net.hpp"
#include "flowc/ode_engine.hpp"
#include "flowc/splitting.hpp"

namespace flowc {

enum class StageKind { exact_affine, approx_monotone };

struct Stage {
    std::string name;
    StageKind kind = StageKind::approx_monotone;
    /// Lipschitz constant of the stage map (operator norm for affine stages).
    double lipschitz = 1.0;
    /// Room between this stage's output range and the next stage's working
    /// domain; tolerances are clipped to it.
    std::optional<double> margin;
};

using StageChain = std::vector<Stage>;

/// Per-stage tolerances (0 for exact stages) whose propagated sum is eps.
std::vector<double> budget_composition(const StageChain& chain, double eps);

struct SynthOptions {
    std::size_t audit_points = 512;
    std::size_t compile_audit_points = 1000;
    int max_retries = 2;
    std::uint64_t seed = 1;
};

struct SubstepNet {
    DeepNet net;
    std::string branch;          // identity | affine | trivial | near-trivial | general
    std::size_t pivot = 0;       // coordinate carrying w.x + beta in the general branch
    double delta1 = 0.0;         // tolerance of the tanh stage
    double delta4 = 0.0;         // tolerance of the restoring stage
    double audit_error = 0.0;
    double protected_error = 0.0;  // max change of coordinates other than j and pivot
    int retries = 0;
};

SubstepNet synth_substep_detailed(const SubStep& s, const BoxDomain& domain, double eps, double alpha,
                                  const SynthOptions& options = {});

DeepNet synth_substep(const SubStep& s, const BoxDomain& domain, double eps, double alpha);

/// Appends `next` to `acc` in place (acc becomes next o acc).
void append_deep(DeepNet& acc, const DeepNet& next);

struct FlowConfig {
    std::size_t neurons = 8;
    std::uint64_t seed = 1;
    std::optional<std::size_t> n_override;
    std::size_t n_min = 4;
    std::size_t n_max = 4096;
    std::size_t audit_points = 2048;
    /// Shares of eps for field fit, splitting and synthesis.
    std::array<double, 3> shares{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    double ref_tol = 1e-11;
    FitOptions fit;
    SynthOptions synth;
    std::string task_hash;
};

struct AuditSummary {
    std::size_t points = 0;
    double max_err = 0.0;
    double mean_err = 0.0;
    Vector argmax_point;
};

struct CertReport {
    double eps = 0.0;
    double alpha = 0.5;
    double tau = 0.0;
    std::array<double, 3> eps_parts{};     // field, split, synth
    std::array<double, 3> measured_parts{};
    double target_delta = 0.0;
    double achieved_delta = 0.0;
    Bounds bounds;
    BoxDomain omega_tau;
    std::size_t n = 0;
    std::uint64_t bound_steps = 0;
    std::size_t neurons = 0;
    std::size_t dim = 0;
    std::size_t time_intervals = 1;
    std::size_t substeps = 0;
    std::size_t depth = 0;
    std::size_t layers = 0;
    double max_substep_error = 0.0;
    double substep_budget = 0.0;
    std::size_t general_substeps = 0;
    AuditSummary audit;
    double runtime_s = 0.0;

    [[nodiscard]] std::string to_json() const;
};

struct AuditSample {
    Vector x;
    Vector reference;
    Vector output;
};

struct FlowResult {
    DeepNet net;
    CertReport report;
    std::vector<AuditSample> samples;
};

FlowResult compile_flow(const FieldSpec& field, const BoxDomain& domain, double tau, double eps, double alpha,
                        const FlowConfig& config = {});

/// Seeded audit points: the box corners followed by uniform samples.
std::vector<Vector> audit_grid(const BoxDomain& domain, std::size_t count, std::uint64_t seed);

}  // namespace flowc
