#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flowc/flow_synth.hpp"

namespace flowc {

struct TaskConfig {
    std::string field_name;
    FieldSpec field;
    BoxDomain domain;
    double tau = 1.0;
    double eps = 0.1;
    double alpha = 0.5;
    FlowConfig flow;
    std::string out_net;
    std::string out_report;
    std::string out_audit_csv;
    std::string hash;  // FNV-1a of the task text
};

/// Parses a task document. Relative output paths are resolved against base_dir.
TaskConfig parse_task(std::string_view text, const std::string& base_dir = ".");
TaskConfig load_task(const std::string& path);

std::string fnv1a_hex(std::string_view text);

int cmd_compile(const std::string& task_path, const std::optional<std::string>& out_net,
                const std::optional<std::string>& out_report, std::ostream& out, std::ostream& err);

int cmd_verify(const std::string& net_path, const std::string& task_path, std::ostream& out, std::ostream& err);

struct StudyOptions {
    std::optional<std::string> out_csv;
    std::uint64_t seed = 1;
    std::string field = "tanh_demo";
    std::size_t halvings = 5;
    std::size_t samples = 1000;
};

int cmd_study(const std::string& kind, const StudyOptions& options, std::ostream& out, std::ostream& err);

/// Monotone scalar targets on [-1, 1] used by the 1-D study.
struct NamedTarget {
    std::string name;
    std::function<double(double)> eval;
};
std::vector<NamedTarget> monotone_study_targets();

/// Least-squares slope of log(err) against log(dt).
double loglog_slope(const std::vector<double>& dt, const std::vector<double>& err);

}  // namespace flowc
