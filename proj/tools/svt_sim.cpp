// Command-line front end: run scenarios, sweep parameters, certify traces,
// and compare the switched tracker against the baseline.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "svt/harness.hpp"
#include "svt/stability.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitRuntimeError = 3;
constexpr int kExitCertifyPrecondition = 4;

std::string tau_str(const svt::TauAs& tau) {
    if (!tau.finite) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", tau.value);
    return buf;
}

void print_result_row(const std::string& label, const svt::RunResult& r) {
    std::printf("%-22s ae=%.4f m  ftv=%.1f%%  tau_as=%s s  k=%d  d_max=%.3f m  failures=%d\n",
                label.c_str(), r.ae, r.ftv * 100.0, tau_str(r.tau_as).c_str(), r.k,
                r.d_max_observed, r.recovery_failures);
}

std::filesystem::path ensure_out_dir(const std::string& out) {
    std::filesystem::path dir(out);
    std::filesystem::create_directories(dir);
    return dir;
}

int cmd_run(const std::string& scenario_path, std::optional<std::uint64_t> seed,
            const std::string& out) {
    svt::ScenarioConfig cfg = svt::load_scenario(scenario_path);
    if (seed) cfg.seed = *seed;
    if (auto warning = svt::validate_scenario(cfg))
        std::cerr << "warning: " << *warning << "\n";
    const auto [trace, result] = svt::run_scenario(cfg);
    const auto dir = ensure_out_dir(out);
    svt::write_trace((dir / (cfg.name + "_trace.csv")).string(), trace);
    svt::write_result((dir / (cfg.name + "_result.json")).string(), result, cfg);
    print_result_row(cfg.name, result);
    return kExitOk;
}

int cmd_compare(const std::string& scenario_path, std::optional<std::uint64_t> seed,
                const std::string& out) {
    svt::ScenarioConfig cfg = svt::load_scenario(scenario_path);
    if (seed) cfg.seed = *seed;
    const auto dir = ensure_out_dir(out);
    for (auto kind : {svt::ControllerKind::Svt, svt::ControllerKind::Baseline}) {
        svt::ScenarioConfig c = cfg;
        c.controller = kind;
        const std::string label = kind == svt::ControllerKind::Svt ? "svt" : "baseline";
        const auto [trace, result] = svt::run_scenario(c);
        svt::write_trace((dir / (c.name + "_" + label + "_trace.csv")).string(), trace);
        svt::write_result((dir / (c.name + "_" + label + "_result.json")).string(), result, c);
        print_result_row(c.name + " [" + label + "]", result);
    }
    return kExitOk;
}

int cmd_sweep(const std::string& scenario_path, const std::string& param,
              const std::string& values_csv, int seeds, const std::string& out) {
    svt::ScenarioConfig cfg = svt::load_scenario(scenario_path);
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= values_csv.size()) {
        const std::size_t comma = values_csv.find(',', start);
        const std::string tok = values_csv.substr(
            start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!tok.empty()) {
            try {
                values.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw svt::ConfigError("sweep values: bad number '" + tok + "'");
            }
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    const auto rows = svt::sweep(cfg, param, values, seeds);
    const auto dir = ensure_out_dir(out);
    svt::write_sweep((dir / ("sweep_" + param + ".json")).string(), param, rows, seeds);
    std::printf("%-10s %-10s %-10s %-10s %-12s %-6s\n", param.c_str(), "ae", "ftv", "tau_as",
                "d_max_obs", "k");
    for (const auto& r : rows) {
        const std::string tau = r.tau_as_finite ? std::to_string(r.tau_as).substr(0, 8) : "inf";
        std::printf("%-10.3f %-10.4f %-10.4f %-10s %-12.4f %-6.2f\n", r.value, r.ae, r.ftv,
                    tau.c_str(), r.d_max_observed, r.k);
    }
    return kExitOk;
}

int cmd_certify(const std::string& trace_path, double delta) {
    const svt::Trace trace = svt::read_trace(trace_path);
    try {
        const svt::Certificate cert = svt::certify(trace, delta);
        std::cout << svt::certificate_to_json(cert).dump(2) << "\n";
    } catch (const std::domain_error& e) {
        std::cerr << "certification precondition failed: " << e.what() << "\n";
        return kExitCertifyPrecondition;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Switched visual tracker simulator and stability analysis toolkit"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir = ".", param, values_csv, trace_path;
    std::optional<std::uint64_t> seed;
    int seeds_per_value = 4;
    double delta = 0.1;

    auto* run = app.add_subcommand("run", "Run one scenario, write trace and result files");
    run->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    run->add_option("--seed", seed, "Override the scenario seed");
    run->add_option("--out", out_dir, "Output directory");

    auto* sweep = app.add_subcommand("sweep", "Sweep one parameter over a value list");
    sweep->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    sweep->add_option("--param", param, "One of v_max, t_R, d_max, offset, seed")->required();
    sweep->add_option("--values", values_csv, "Comma-separated values")->required();
    sweep->add_option("--seeds", seeds_per_value, "Seeds per value (default 4)");
    sweep->add_option("--out", out_dir, "Output directory");

    auto* certify = app.add_subcommand("certify", "Evaluate the stability certificate of a trace");
    certify->add_option("trace", trace_path, "Trace CSV file")->required();
    certify->add_option("--delta", delta, "Theorem delta parameter (default 0.1)");

    auto* compare = app.add_subcommand("compare", "Run svt and baseline back to back");
    compare->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    compare->add_option("--seed", seed, "Override the scenario seed");
    compare->add_option("--out", out_dir, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(scenario_path, seed, out_dir);
        if (sweep->parsed()) return cmd_sweep(scenario_path, param, values_csv, seeds_per_value, out_dir);
        if (certify->parsed()) return cmd_certify(trace_path, delta);
        if (compare->parsed()) return cmd_compare(scenario_path, seed, out_dir);
    } catch (const svt::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntimeError;
    }
    return kExitOk;
}
