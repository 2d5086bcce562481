#include "flowc/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <ostream>
#include <random>
#include <sstream>

#include "flowc/monotone_compiler.hpp"

namespace flowc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::invalid_input, "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream o(path, std::ios::binary);
    if (!o) throw Error(ErrorKind::invalid_input, "cannot write '" + path + "'");
    o << text;
    if (!o) throw Error(ErrorKind::invalid_input, "failed writing '" + path + "'");
}

Matrix matrix_from(const json& rows, const char* what) {
    if (!rows.is_array() || rows.empty() || !rows[0].is_array()) {
        throw Error(ErrorKind::parse_error, std::string(what) + " must be a nested array");
    }
    const auto r = static_cast<Eigen::Index>(rows.size());
    const auto c = static_cast<Eigen::Index>(rows[0].size());
    Matrix M(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c) {
            throw Error(ErrorKind::parse_error, std::string(what) + " has ragged rows");
        }
        for (Eigen::Index k = 0; k < c; ++k) M(i, k) = row[static_cast<std::size_t>(k)].get<double>();
    }
    return M;
}

FieldSpec inline_field(const json& j) {
    const json& t = j.at("tanh_net");
    TanhField f;
    f.knots = t.at("knots").get<std::vector<double>>();
    for (const auto& piece : t.at("pieces")) {
        TanhParams p;
        p.A = matrix_from(piece.at("A"), "A");
        p.W = matrix_from(piece.at("W"), "W");
        const auto b = piece.at("b").get<std::vector<double>>();
        p.b = Eigen::Map<const Vector>(b.data(), static_cast<Eigen::Index>(b.size()));
        f.pieces.push_back(std::move(p));
    }
    if (f.pieces.empty()) throw Error(ErrorKind::parse_error, "tanh_net needs at least one piece");
    f.dim = static_cast<std::size_t>(f.pieces[0].A.rows());
    f.neurons = static_cast<std::size_t>(f.pieces[0].A.cols());
    return make_field(f, "inline");
}

std::string resolve(const std::string& base_dir, const std::string& p) {
    if (p.empty() || fs::path(p).is_absolute()) return p;
    return (fs::path(base_dir) / p).lexically_normal().string();
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

// Certified failures exit 2, everything the user can fix exits 1.
int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::invalid_parameter:
        case ErrorKind::invalid_input:
        case ErrorKind::parse_error:
        case ErrorKind::invalid_field:
        case ErrorKind::schedule_error:
            return 1;
        default:
            return 2;
    }
}

// Fritsch-Carlson monotone cubic through fixed knots.
double monotone_spline(double x) {
    static const double xs[] = {-1.0, -0.5, 0.0, 0.4, 1.0};
    static const double ys[] = {-1.0, -0.8, 0.0, 0.15, 1.0};
    constexpr int n = 5;
    static const auto slopes = [] {
        std::vector<double> delta(n - 1), m(n);
        for (int i = 0; i + 1 < n; ++i) delta[i] = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
        m[0] = delta[0];
        m[n - 1] = delta[n - 2];
        for (int i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0.0) {
                m[i] = 0.0;
            } else {
                const double w1 = 2.0 * (xs[i + 1] - xs[i]) + (xs[i] - xs[i - 1]);
                const double w2 = (xs[i + 1] - xs[i]) + 2.0 * (xs[i] - xs[i - 1]);
                m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        return m;
    }();
    int i = 0;
    while (i + 2 < n && x > xs[i + 1]) ++i;
    const double h = xs[i + 1] - xs[i];
    const double t = (x - xs[i]) / h;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    const double h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t);
    const double h11 = t * t * (t - 1);
    return h00 * ys[i] + h10 * h * slopes[static_cast<std::size_t>(i)] + h01 * ys[i + 1] +
           h11 * h * slopes[static_cast<std::size_t>(i + 1)];
}

struct CsvSink {
    std::ofstream file;
    std::ostream* os;
    explicit CsvSink(const std::optional<std::string>& path, std::ostream& fallback) : os(&fallback) {
        if (path) {
            const fs::path p(*path);
            if (p.has_parent_path()) fs::create_directories(p.parent_path());
            file.open(*path, std::ios::binary);
            if (!file) throw Error(ErrorKind::invalid_input, "cannot write '" + *path + "'");
            os = &file;
        }
    }
};

int study_split(const StudyOptions& opt, std::ostream& out, std::ostream& err) {
    FieldSpec field = preset_field(opt.field);
    const double tau = 1.0;
    const BoxDomain domain = BoxDomain::cube(field.dim, -1.0, 1.0);
    TanhField tf;
    if (field.kind == FieldKind::tanh_net) {
        tf = *field.tanh;
    } else {
        const Bounds b = estimate_bounds(field, domain, tau, opt.seed);
        tf = fit_tanh_field_unchecked(field, omega_tau(domain, b.M, b.L, tau), tau, 8, opt.seed).field;
    }
    if (std::abs(tf.horizon() - tau) > 1e-12) throw Error(ErrorKind::invalid_field, "study field must have horizon 1");
    const FieldSpec surrogate = make_field(tf, "surrogate");
    const auto pts = audit_grid(domain, 256, opt.seed);
    std::vector<Vector> ref(pts.size());
    parallel_for(pts.size(), [&](std::size_t p) { ref[p] = reference_flow(surrogate, pts[p], tau, 1e-12); });

    CsvSink sink(opt.out_csv, out);
    std::ostream& os = *sink.os;
    os << "n,dt,max_err,order\n";
    std::vector<double> dts, errs;
    std::size_t n = 16;
    for (std::size_t h = 0; h < opt.halvings; ++h, n *= 2) {
        const SplitSchedule sched = make_schedule(tf, n);
        double worst = 0.0;
        for (std::size_t p = 0; p < pts.size(); ++p) {
            const auto traj = run_splitting(pts[p], sched);
            worst = std::max(worst, (traj.back() - ref[p]).norm());
        }
        const double order = errs.empty() ? NAN : std::log2(errs.back() / worst);
        dts.push_back(sched.dt);
        errs.push_back(worst);
        os << n << "," << fmt(sched.dt) << "," << fmt(worst) << ",";
        if (!std::isnan(order)) os << fmt(order);
        os << "\n";
    }
    err << "empirical order " << fmt(loglog_slope(dts, errs)) << "\n";
    return 0;
}

int study_monotone(const StudyOptions& opt, std::ostream& out, std::ostream& err) {
    CsvSink sink(opt.out_csv, out);
    std::ostream& os = *sink.os;
    os << "target,eps,achieved,depth,nodes,pieces\n";
    bool all_ok = true;
    for (const auto& t : monotone_study_targets()) {
        for (double eps = 0.1; eps > 0.006; eps /= 2.0) {
            MonotoneTarget u{t.eval, {-1.0, 1.0}, Direction::increasing, {}};
            const auto c = compile_monotone_detailed(u, eps, 0.5);
            all_ok = all_ok && c.audit_error <= eps;
            os << t.name << "," << fmt(eps) << "," << fmt(c.audit_error) << "," << c.net.depth() << "," << c.nodes << ","
               << c.pl.base.pieces() << "\n";
        }
    }
    err << (all_ok ? "all targets within eps\n" : "some target exceeded eps\n");
    return all_ok ? 0 : 2;
}

int study_relu(const StudyOptions& opt, std::ostream& out, std::ostream& err) {
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> g;
    std::uniform_int_distribution<int> depth_dist(1, 8);
    CsvSink sink(opt.out_csv, out);
    std::ostream& os = *sink.os;
    os << "sample,depth,pieces\n";
    int max_pieces = 0;
    for (std::size_t s = 0; s < opt.samples; ++s) {
        const int depth = depth_dist(rng);
        std::vector<ScalarLayer> layers(static_cast<std::size_t>(depth) + 1);
        for (auto& l : layers) l = {g(rng), g(rng)};
        const int pieces = relu_piece_count(layers);
        max_pieces = std::max(max_pieces, pieces);
        os << s << "," << depth << "," << pieces << "\n";
    }
    err << "max pieces " << max_pieces << "\n";
    return max_pieces <= 3 ? 0 : 2;
}

}  // namespace

std::string fnv1a_hex(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

TaskConfig parse_task(std::string_view text, const std::string& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw Error(ErrorKind::parse_error, e.what());
    }
    TaskConfig cfg;
    try {
        const json& f = j.at("field");
        if (f.is_string()) {
            cfg.field_name = f.get<std::string>();
            cfg.field = preset_field(cfg.field_name);
        } else {
            cfg.field_name = "inline";
            cfg.field = inline_field(f);
        }
        if (j.contains("domain")) {
            for (const auto& iv : j.at("domain")) {
                const auto v = iv.get<std::vector<double>>();
                if (v.size() != 2) throw Error(ErrorKind::parse_error, "domain entries must be [lo, hi]");
                cfg.domain.intervals.push_back({v[0], v[1]});
            }
        } else {
            cfg.domain = BoxDomain::cube(cfg.field.dim, -1.0, 1.0);
        }
        cfg.tau = j.at("tau").get<double>();
        cfg.eps = j.at("eps").get<double>();
        cfg.alpha = j.value("alpha", 0.5);
        FlowConfig& fc = cfg.flow;
        fc.neurons = j.value("N", fc.neurons);
        fc.seed = j.value("seed", fc.seed);
        if (j.contains("n_override") && !j.at("n_override").is_null()) fc.n_override = j.at("n_override").get<std::size_t>();
        fc.n_min = j.value("n_min", fc.n_min);
        fc.n_max = j.value("n_max", fc.n_max);
        fc.audit_points = j.value("audit_points", fc.audit_points);
        if (j.contains("budget_shares")) {
            const auto s = j.at("budget_shares").get<std::vector<double>>();
            if (s.size() != 3) throw Error(ErrorKind::parse_error, "budget_shares needs three entries");
            fc.shares = {s[0], s[1], s[2]};
        }
        if (j.contains("fit")) {
            const json& fit = j.at("fit");
            fc.fit.time_intervals = fit.value("time_intervals", fc.fit.time_intervals);
            fc.fit.samples = fit.value("samples", fc.fit.samples);
            fc.fit.holdout = fit.value("holdout", fc.fit.holdout);
            fc.fit.ridge = fit.value("ridge", fc.fit.ridge);
            fc.fit.scale_min = fit.value("scale_min", fc.fit.scale_min);
            fc.fit.scale_max = fit.value("scale_max", fc.fit.scale_max);
        }
        const json outputs = j.value("outputs", json::object());
        cfg.out_net = resolve(base_dir, outputs.value("net", std::string("flow.net.json")));
        cfg.out_report = resolve(base_dir, outputs.value("report", std::string("flow.report.json")));
        cfg.out_audit_csv = resolve(base_dir, outputs.value("audit_csv", std::string("flow.audit.csv")));
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(ErrorKind::parse_error, e.what());
    }

    if (!(cfg.eps > 0.0)) throw Error(ErrorKind::invalid_parameter, "eps must be positive");
    if (!(cfg.tau > 0.0)) throw Error(ErrorKind::invalid_parameter, "tau must be positive");
    require_alpha(cfg.alpha);
    cfg.domain.validate();
    if (cfg.domain.dim() != cfg.field.dim) throw Error(ErrorKind::invalid_parameter, "domain dimension differs from the field");
    if (cfg.flow.neurons == 0) throw Error(ErrorKind::invalid_parameter, "N must be at least 1");
    if (cfg.flow.audit_points == 0) throw Error(ErrorKind::invalid_parameter, "audit_points must be positive");
    cfg.hash = fnv1a_hex(text);
    cfg.flow.task_hash = cfg.hash;
    return cfg;
}

TaskConfig load_task(const std::string& path) {
    const std::string text = read_file(path);
    const fs::path parent = fs::path(path).parent_path();
    return parse_task(text, parent.empty() ? "." : parent.string());
}

int cmd_compile(const std::string& task_path, const std::optional<std::string>& out_net,
                const std::optional<std::string>& out_report, std::ostream& out, std::ostream& err) {
    TaskConfig cfg;
    try {
        cfg = load_task(task_path);
    } catch (const Error& e) {
        err << "flowc compile: " << e.what() << "\n";
        return 1;
    }
    if (out_net) cfg.out_net = *out_net;
    if (out_report) cfg.out_report = *out_report;
    try {
        const FlowResult r = compile_flow(cfg.field, cfg.domain, cfg.tau, cfg.eps, cfg.alpha, cfg.flow);
        write_file(cfg.out_net, serialize(r.net));
        write_file(cfg.out_report, r.report.to_json());
        std::ostringstream csv;
        csv << std::setprecision(17);
        const std::size_t d = cfg.field.dim;
        for (std::size_t i = 1; i <= d; ++i) csv << "x_" << i << ",";
        for (std::size_t i = 1; i <= d; ++i) csv << "ref_" << i << ",";
        for (std::size_t i = 1; i <= d; ++i) csv << "net_" << i << ",";
        csv << "err\n";
        for (const auto& s : r.samples) {
            for (Eigen::Index i = 0; i < s.x.size(); ++i) csv << s.x[i] << ",";
            for (Eigen::Index i = 0; i < s.x.size(); ++i) csv << s.reference[i] << ",";
            for (Eigen::Index i = 0; i < s.x.size(); ++i) csv << s.output[i] << ",";
            csv << (s.output - s.reference).norm() << "\n";
        }
        write_file(cfg.out_audit_csv, csv.str());
        out << "certified: max_err " << fmt(r.report.audit.max_err) << " <= eps " << fmt(cfg.eps) << "\n"
            << "n " << r.report.n << ", N " << r.report.neurons << ", depth " << r.report.depth << "\n"
            << "net " << cfg.out_net << "\nreport " << cfg.out_report << "\n";
        return 0;
    } catch (const Error& e) {
        err << "flowc compile: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << "flowc compile: " << e.what() << "\n";
        return 2;
    }
}

int cmd_verify(const std::string& net_path, const std::string& task_path, std::ostream& out, std::ostream& err) {
    DeepNet net;
    TaskConfig cfg;
    try {
        net = deserialize(read_file(net_path));
        cfg = load_task(task_path);
    } catch (const Error& e) {
        err << "flowc verify: " << e.what() << "\n";
        return 1;
    }
    if (net.dim != cfg.field.dim) {
        err << "flowc verify: network dimension " << net.dim << " differs from the task\n";
        return 1;
    }
    if (!net.meta.task_hash.empty() && net.meta.task_hash != cfg.hash) {
        err << "flowc verify: warning: network was compiled from a different task file\n";
    }
    try {
        const auto pts = audit_grid(cfg.domain, cfg.flow.audit_points, cfg.flow.seed + 7919);
        std::vector<double> e(pts.size()), rt(pts.size());
        const DeepNetInverter inv(net);
        parallel_for(pts.size(), [&](std::size_t p) {
            const Vector y = eval_deep(net, pts[p]);
            e[p] = (y - reference_flow(cfg.field, pts[p], cfg.tau, cfg.flow.ref_tol)).norm();
            rt[p] = (inv(y) - pts[p]).norm() / std::max(1.0, pts[p].norm());
        });
        double max_err = 0.0, sum = 0.0, max_rt = 0.0;
        for (std::size_t p = 0; p < pts.size(); ++p) {
            max_err = std::max(max_err, e[p]);
            sum += e[p];
            max_rt = std::max(max_rt, rt[p]);
        }
        out << "points " << pts.size() << "\nmax_err " << fmt(max_err) << "\nmean_err "
            << fmt(sum / static_cast<double>(pts.size())) << "\nroundtrip_residual " << fmt(max_rt) << "\neps "
            << fmt(cfg.eps) << "\n";
        const bool ok = max_err <= cfg.eps;
        out << (ok ? "verified\n" : "not verified\n");
        return ok ? 0 : 2;
    } catch (const Error& ex) {
        err << "flowc verify: " << ex.what() << "\n";
        return exit_code(ex.kind()) == 1 ? 1 : 2;
    }
}

int cmd_study(const std::string& kind, const StudyOptions& options, std::ostream& out, std::ostream& err) {
    try {
        if (kind == "split-convergence") return study_split(options, out, err);
        if (kind == "1d-monotone") return study_monotone(options, out, err);
        if (kind == "relu-pieces") return study_relu(options, out, err);
        err << "flowc study: unknown kind '" << kind << "' (split-convergence, 1d-monotone, relu-pieces)\n";
        return 1;
    } catch (const Error& e) {
        err << "flowc study: " << e.what() << "\n";
        return exit_code(e.kind());
    }
}

std::vector<NamedTarget> monotone_study_targets() {
    return {
        {"cube", [](double x) { return x * x * x; }},
        {"tanh2x", [](double x) { return std::tanh(2.0 * x); }},
        {"x_plus_half_spline", [](double x) { return x + 0.5 * monotone_spline(x); }},
    };
}

double loglog_slope(const std::vector<double>& dt, const std::vector<double>& err) {
    const std::size_t n = std::min(dt.size(), err.size());
    if (n < 2) return NAN;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(dt[i]);
        const double y = std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double dn = static_cast<double>(n);
    return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

}  // namespace flowc
