// flowc: compile ODE flow maps into width-d leaky-ReLU networks.
#include <CLI11.hpp>
#include <iostream>

#include "flowc/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Compile the time-tau flow map of an ODE into a leaky-ReLU network"};
    app.require_subcommand(1);

    std::string task;
    std::optional<std::string> out_net;
    std::optional<std::string> out_report;
    auto* compile = app.add_subcommand("compile", "Compile a task into a certified network");
    compile->add_option("--task", task, "Task file (JSON)")->required();
    compile->add_option("--out", out_net, "Network output path");
    compile->add_option("--report", out_report, "Certificate report path");

    std::string net_path;
    std::string verify_task;
    auto* verify = app.add_subcommand("verify", "Re-audit a network against its task");
    verify->add_option("--net", net_path, "Network file")->required();
    verify->add_option("--task", verify_task, "Task file (JSON)")->required();

    std::string kind;
    flowc::StudyOptions study_opts;
    auto* study = app.add_subcommand("study", "Emit CSV data for a numerical study");
    study->add_option("kind", kind, "split-convergence | 1d-monotone | relu-pieces")->required();
    study->add_option("--out", study_opts.out_csv, "CSV output path (default stdout)");
    study->add_option("--seed", study_opts.seed, "Random seed");
    study->add_option("--field", study_opts.field, "Preset field for split-convergence");
    study->add_option("--halvings", study_opts.halvings, "Step halvings for split-convergence");
    study->add_option("--samples", study_opts.samples, "Random nets for relu-pieces");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (*compile) return flowc::cmd_compile(task, out_net, out_report, std::cout, std::cerr);
    if (*verify) return flowc::cmd_verify(net_path, verify_task, std::cout, std::cerr);
    if (*study) return flowc::cmd_study(kind, study_opts, std::cout, std::cerr);
    return 1;
}
