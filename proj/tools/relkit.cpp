#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "relkit/finite_oracle.hpp"
#include "relkit/parallel.hpp"
#include "relkit/scenario.hpp"

namespace {

int run_command(const std::string& path, const std::string& out, std::optional<std::uint64_t> seed) {
    const relkit::Scenario sc = relkit::load_scenario(path);
    relkit::RunOptions opt;
    opt.seed = seed;
    if (!out.empty()) {
        opt.out_dir = out;
    } else if (const char* env = std::getenv("RELKIT_OUT"); env && *env && !sc.output) {
        opt.out_dir = std::filesystem::path(env) / sc.name;
    }
    const relkit::RunResult r = relkit::run_scenario(sc, opt);
    for (const auto& cmd : r.report.value("commands", relkit::Json::array())) {
        bool ok = true;
        for (const auto& e : cmd["expectations"]) ok = ok && e["passed"].get<bool>();
        fmt::print("{:>4}  {:<6} {}\n", cmd["line"].get<int>(), ok ? "ok" : "FAILED", cmd["command"].get<std::string>());
    }
    if (r.report.contains("error")) fmt::print(stderr, "error: {}\n", r.report["error"].get<std::string>());
    fmt::print("{} -> {} ({:.2f} s, status {})\n", sc.name, r.out_dir.string(), r.seconds,
               r.report["status"].get<std::string>());
    return r.exit_code;
}

int oracle_command(int n_max, std::size_t trials, std::uint64_t seed) {
    const auto r = relkit::oracle::fo_theorem_suite(n_max, trials, seed);
    auto line = [](const char* name, const relkit::oracle::CheckTally& t) {
        fmt::print("{:<24} passed {:>8}  failed {:>4}\n", name, t.passed, t.failed);
    };
    line("block forms agree", r.block_forms_agree);
    line("block yields attractor", r.block_yields_attractor);
    line("attractor has block", r.attractor_has_block);
    line("perturbation persists", r.perturbation_persists);
    if (!r.first_counterexample.empty()) fmt::print("first counterexample:\n{}\n", r.first_counterexample);
    fmt::print("{} checks over {} trials, {} failures\n", r.checks(), r.trials, r.failures());
    return r.failures() == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"relkit: rigorous numerics for closed relations"};
    app.set_version_flag("--version", RELKIT_VERSION);
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run a scenario file");
    std::string scenario_path, out_dir;
    std::optional<std::uint64_t> seed;
    int threads = 0;
    run->add_option("scenario", scenario_path, "Scenario file (.rk text or .json)")->required();
    run->add_option("--out", out_dir, "Output directory (default: $RELKIT_OUT/<name> or relkit-out/<name>)");
    run->add_option("--seed", seed, "Override the scenario seed");
    run->add_option("--threads", threads, "Worker threads (0: hardware concurrency)")->check(CLI::NonNegativeNumber);

    auto* oracle = app.add_subcommand("oracle", "Run the finite-relation theorem suite");
    int n_max = 6;
    std::size_t trials = 500;
    std::uint64_t oracle_seed = 1;
    oracle->add_option("--n-max", n_max, "Largest state count")->check(CLI::Range(1, 14));
    oracle->add_option("--trials", trials, "Random relations to draw");
    oracle->add_option("--seed", oracle_seed, "Generator seed");
    oracle->add_option("--threads", threads, "Worker threads (0: hardware concurrency)")->check(CLI::NonNegativeNumber);

    auto* render = app.add_subcommand("render", "Render a box-set element of a report as SVG");
    std::string report_path, element, svg_out;
    render->add_option("report", report_path, "report.json written by `relkit run`")->required();
    render->add_option("--element", element, "Element name")->required();
    render->add_option("--out", svg_out, "SVG path (default: <element>.svg next to the report)");

    CLI11_PARSE(app, argc, argv);

    try {
        relkit::set_thread_count(threads);
        if (*run) return run_command(scenario_path, out_dir, seed);
        if (*oracle) return oracle_command(n_max, trials, oracle_seed);
        if (*render) {
            const auto path = relkit::render_report_element(report_path, element, svg_out);
            fmt::print("{}\n", path.string());
            return 0;
        }
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
    return 0;
}
