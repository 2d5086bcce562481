#include "flowc/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace flowc {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_parameter: return "invalid-parameter";
        case ErrorKind::unsupported_shape: return "unsupported-shape";
        case ErrorKind::invalid_slope: return "invalid-slope";
        case ErrorKind::invalid_target: return "invalid-target";
        case ErrorKind::contract_violation: return "contract-violation";
        case ErrorKind::internal_error: return "internal-error";
        case ErrorKind::invalid_input: return "invalid-input";
        case ErrorKind::incompatible_nets: return "incompatible-nets";
        case ErrorKind::not_invertible: return "not-invertible";
        case ErrorKind::parse_error: return "parse-error";
        case ErrorKind::stiffness_failure: return "stiffness-failure";
        case ErrorKind::invalid_field: return "invalid-field";
        case ErrorKind::fit_shortfall: return "fit-shortfall";
        case ErrorKind::schedule_error: return "schedule-error";
        case ErrorKind::divergence_error: return "divergence-error";
        case ErrorKind::step_too_large: return "step-too-large";
        case ErrorKind::budget_infeasible: return "budget-infeasible";
        case ErrorKind::synthesis_failure: return "synthesis-failure";
        case ErrorKind::certification_failure: return "certification-failure";
    }
    return "unknown";
}

double Interval::magnitude() const { return std::max(std::abs(lo), std::abs(hi)); }

void require_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw Error(ErrorKind::invalid_parameter, "alpha must lie in (0,1), got " + std::to_string(alpha));
    }
}

double leaky_relu(double x, double alpha) {
    require_alpha(alpha);
    return std::max(alpha * x, x);
}

std::size_t worker_count() {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FLOWC_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap > 0) n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
    }
    return n;
}

}  // namespace flowc

#include <atomic>
#include <exception>
#include <mutex>
#include <vector>

namespace flowc {

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min(worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::size_t failed_index = n;
    std::exception_ptr failure;
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(mu);
                if (i < failed_index) {
                    failed_index = i;
                    failure = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t + 1 < workers; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace flowc
