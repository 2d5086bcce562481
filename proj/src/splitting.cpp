#include "flowc/splitting.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace flowc {

SplitSchedule make_schedule(const TanhField& field, std::size_t n) {
    field.validate();
    if (n == 0) throw Error(ErrorKind::invalid_parameter, "n must be at least 1");
    SplitSchedule s;
    s.n = n;
    s.neurons = field.neurons;
    s.dim = field.dim;
    s.tau = field.horizon();
    s.dt = s.tau / static_cast<double>(n);
    for (double knot : field.knots) {
        const double ratio = knot / s.dt;
        if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
            throw Error(ErrorKind::schedule_error, "time knot " + std::to_string(knot) + " is not a multiple of tau/n");
        }
    }
    s.steps.reserve(n * field.neurons * field.dim);
    for (std::size_t k = 0; k < n; ++k) {
        const double tk = static_cast<double>(k) * s.dt;
        // Parameters of the interval containing [t_k, t_k + dt).
        const TanhParams& p = field.pieces[field.interval_at(tk + 0.5 * s.dt)];
        for (std::size_t i = 0; i < field.neurons; ++i) {
            const auto ie = static_cast<Eigen::Index>(i);
            for (std::size_t j = 0; j < field.dim; ++j) {
                SubStep st;
                st.k = k;
                st.i = i;
                st.j = j;
                st.dt = s.dt;
                st.t = tk;
                st.a = p.A(static_cast<Eigen::Index>(j), ie);
                st.w = p.W.row(ie).transpose();
                st.beta = p.b[ie];
                s.steps.push_back(std::move(st));
            }
        }
    }
    return s;
}

Vector apply_substep(const Vector& x, const SubStep& s) {
    Vector y = x;
    const auto j = static_cast<Eigen::Index>(s.j);
    y[j] = x[j] + s.dt * s.a * std::tanh(s.w.dot(x) + s.beta);
    return y;
}

namespace {

void step_in_place(Vector& x, const SubStep& s) {
    const auto j = static_cast<Eigen::Index>(s.j);
    x[j] += s.dt * s.a * std::tanh(s.w.dot(x) + s.beta);
}

void check_finite(const Vector& x, std::size_t k) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || std::abs(x[i]) > 1e12) {
            throw Error(ErrorKind::divergence_error, "splitting state diverged at macro step " + std::to_string(k));
        }
    }
}

}  // namespace

std::vector<Vector> run_splitting(const Vector& x0, const SplitSchedule& schedule) {
    std::vector<Vector> traj;
    traj.reserve(schedule.n + 1);
    traj.push_back(x0);
    Vector x = x0;
    const std::size_t per = schedule.neurons * schedule.dim;
    for (std::size_t k = 0; k < schedule.n; ++k) {
        for (std::size_t q = 0; q < per; ++q) step_in_place(x, schedule.steps[k * per + q]);
        check_finite(x, k);
        traj.push_back(x);
    }
    return traj;
}

Vector split_flow(const Vector& x0, const SplitSchedule& schedule) {
    Vector x = x0;
    const std::size_t per = schedule.neurons * schedule.dim;
    for (std::size_t k = 0; k < schedule.n; ++k) {
        for (std::size_t q = 0; q < per; ++q) step_in_place(x, schedule.steps[k * per + q]);
        check_finite(x, k);
    }
    return x;
}

std::uint64_t required_steps(double c, double L, double tau, double eps) {
    if (!(c > 0.0) || !(L > 0.0) || !(tau > 0.0) || !(eps > 0.0)) {
        throw Error(ErrorKind::invalid_parameter, "required_steps needs positive c, L, tau, eps");
    }
    const double n = std::ceil(2.0 * c * c * tau * std::exp(L * tau) / (L * eps));
    if (!(n < 1.8e19)) return std::numeric_limits<std::uint64_t>::max();
    return static_cast<std::uint64_t>(n);
}

SplitConstants split_constants(const TanhField& field) {
    SplitConstants k;
    for (const auto& p : field.pieces) {
        const double normA = p.A.operatorNorm();
        const double normW = p.W.operatorNorm();
        const double sqrtN = std::sqrt(static_cast<double>(field.neurons));
        k.L = std::max(k.L, normA * normW);
        k.c = std::max({k.c, normA * sqrtN, normA * normW});
        for (Eigen::Index i = 0; i < p.A.cols(); ++i) {
            const double wn = p.W.row(i).norm();
            for (Eigen::Index j = 0; j < p.A.rows(); ++j) k.c = std::max({k.c, std::abs(p.A(j, i)), std::abs(p.A(j, i)) * wn});
        }
    }
    return k;
}

void write_trajectory_csv(std::ostream& os, const std::vector<Vector>& trajectory, double dt) {
    const auto old = os.precision(17);
    os << "t";
    const Eigen::Index d = trajectory.empty() ? 0 : trajectory.front().size();
    for (Eigen::Index i = 0; i < d; ++i) os << ",x_" << i + 1;
    os << "\n";
    for (std::size_t k = 0; k < trajectory.size(); ++k) {
        os << static_cast<double>(k) * dt;
        for (Eigen::Index i = 0; i < d; ++i) os << "," << trajectory[k][i];
        os << "\n";
    }
    os.precision(old);
}

}  // namespace flowc
