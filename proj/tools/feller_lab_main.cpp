// feller-lab: classify and empirically verify jump-SDE scenarios.
//
// Subcommands: classify, profile, simulate, diagnose, report, selftest.
// Exit codes: 0 ok, 2 verdict mismatch, 3 tolerance failure, 4 input error.

#include <chrono>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "feller/diagnostics.hpp"
#include "feller/parallel.hpp"
#include "feller/report_io.hpp"
#include "feller/scenario_io.hpp"
#include "feller/selftest.hpp"
#include "feller/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerdictMismatch = 2;
constexpr int kExitToleranceFailure = 3;
constexpr int kExitInputError = 4;

std::string timestamp_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::uint64_t resolve_seed(std::uint64_t from_config) {
    if (const char* env = std::getenv("FELLER_LAB_SEED")) {
        return std::strtoull(env, nullptr, 10);
    }
    return from_config;
}

void emit_error_json(const std::string& kind, const std::string& message) {
    json err = {{"error", {{"kind", kind}, {"message", message}}}};
    std::cerr << err.dump() << std::endl;
}

struct CommonArgs {
    std::string scenario;
    std::string config_path;
    std::string out;
    unsigned threads = 0;
    std::vector<double> radii{0.1, 1.0, 10.0};
};

feller::SimulationConfig load_config(const CommonArgs& args) {
    feller::SimulationConfig cfg;
    if (!args.config_path.empty()) {
        json j = json::parse(feller::read_text_file(args.config_path));
        cfg = feller::parse_sim_config(j);
    }
    cfg.master_seed = resolve_seed(cfg.master_seed);
    return cfg;
}

void write_with_manifest(const std::string& command, const feller::Scenario& scenario,
                         const feller::SimulationConfig& cfg, const fs::path& out_dir,
                         const std::vector<std::pair<std::string, std::string>>& files,
                         const std::string& started_at) {
    fs::create_directories(out_dir);
    feller::RunManifest manifest;
    manifest.command = command;
    manifest.scenario_hash = feller::hash_hex(feller::scenario_to_json(scenario).dump());
    manifest.config_hash = feller::hash_hex(feller::sim_config_to_json(cfg).dump());
    manifest.master_seed = cfg.master_seed;
    manifest.tool_version = feller::kToolVersion;
    manifest.started_at = started_at;
    manifest.finished_at = timestamp_now();
    for (const auto& [name, payload] : files) {
        feller::write_text_file((out_dir / name).string(), payload);
        manifest.outputs.push_back(name);
    }
    feller::write_text_file((out_dir / "manifest.json").string(),
                            feller::manifest_to_json(manifest).dump(2) + "\n");
}

json scenario_echo(const feller::Scenario& scenario, const feller::SimulationConfig& cfg) {
    return {{"scenario", scenario.label},
            {"scenario_hash", feller::hash_hex(feller::scenario_to_json(scenario).dump())},
            {"master_seed", cfg.master_seed},
            {"config", feller::sim_config_to_json(cfg)}};
}

int cmd_classify(const CommonArgs& args) {
    std::string started = timestamp_now();
    feller::Scenario scenario = feller::load_scenario(args.scenario);
    feller::SimulationConfig cfg = load_config(args);
    feller::ClassifyPolicy policy;
    policy.radii = args.radii;
    feller::ClassificationReport rep = feller::classify(scenario, policy);

    json out = feller::classification_to_json(rep);
    out["scenario"] = scenario.label;
    std::cout << "verdict: " << feller::verdict_name(rep.verdict)
              << " (rule: " << rep.rule_fired << ")" << std::endl;
    if (!args.out.empty()) {
        fs::path dir = fs::path(args.out).parent_path();
        if (dir.empty()) dir = ".";
        write_with_manifest("classify", scenario, cfg, dir,
                            {{fs::path(args.out).filename().string(), out.dump(2) + "\n"}},
                            started);
    }
    if (scenario.expected_verdict && rep.verdict != *scenario.expected_verdict) {
        emit_error_json("verdict_mismatch",
                        "expected " + feller::verdict_name(*scenario.expected_verdict) + ", got " +
                            feller::verdict_name(rep.verdict));
        return kExitVerdictMismatch;
    }
    return kExitOk;
}

int cmd_profile(const CommonArgs& args, double r, double x_min, double x_max, int n_points,
                double alpha_override, double beta_override) {
    std::string started = timestamp_now();
    feller::Scenario scenario = feller::load_scenario(args.scenario);
    if (alpha_override > 0.0) {
        if (!scenario.driver.nu.stable())
            throw feller::InputError("--alpha override requires a stable driver");
        feller::LevyTriplet t = feller::LevyTriplet::zero(1);
        t.nu.set_stable(alpha_override, feller::stable_normalized_scale(alpha_override));
        scenario.driver = std::move(t);
    }
    if (beta_override > 0.0) {
        feller::SigmaParams params = scenario.sigma.params();
        params["beta"] = {beta_override};
        scenario.sigma = feller::CoefficientField::make(scenario.sigma.form(), params,
                                                        scenario.d(), scenario.k());
    }
    feller::SimulationConfig cfg = load_config(args);
    feller::ConditionProfile profile =
        feller::condition_profile(scenario, r, x_min, x_max, n_points);

    std::cout << "profile r=" << r << ": verdict "
              << feller::profile_verdict_name(profile.verdict)
              << ", limit estimate " << profile.limit_estimate
              << ", log-log slope " << profile.loglog_slope << std::endl;

    if (!args.out.empty()) {
        fs::path out_path(args.out);
        fs::path dir = out_path.parent_path();
        if (dir.empty()) dir = ".";
        std::string stem = out_path.stem().string();
        json j = feller::profile_to_json(profile);
        j["echo"] = scenario_echo(scenario, cfg);
        write_with_manifest("profile", scenario, cfg, dir,
                            {{stem + ".json", j.dump(2) + "\n"},
                             {stem + ".csv", feller::profile_to_csv(profile)}},
                            started);
    }
    return kExitOk;
}

int cmd_simulate(const CommonArgs& args, double x0, int n_paths_override, bool binary) {
    std::string started = timestamp_now();
    feller::Scenario scenario = feller::load_scenario(args.scenario);
    feller::SimulationConfig cfg = load_config(args);
    if (n_paths_override > 0) cfg.n_paths = n_paths_override;
    if (cfg.scheme == feller::SimScheme::euler_interlaced)
        cfg.scheme = scenario.default_scheme();

    std::vector<feller::PathSample> paths;
    paths.reserve(cfg.n_paths);
    feller::Vec x0v = feller::Vec::Zero(scenario.d());
    x0v(0) = x0;
    int exploded = 0;
    for (int i = 0; i < cfg.n_paths; ++i) {
        paths.push_back(feller::simulate_interlaced(scenario, cfg, x0v, i));
        exploded += paths.back().exploded ? 1 : 0;
    }
    std::cout << "simulated " << paths.size() << " paths (" << exploded << " exploded)"
              << std::endl;

    if (!args.out.empty()) {
        fs::path dir(args.out);
        std::vector<std::pair<std::string, std::string>> files;
        files.emplace_back("paths.csv", feller::paths_to_csv(paths));
        if (binary) files.emplace_back("paths.bin", feller::paths_to_binary(paths, scenario.d()));
        write_with_manifest("simulate", scenario, cfg, dir, files, started);
    }
    return kExitOk;
}

int cmd_diagnose(const CommonArgs& args, const std::string& probe) {
    std::string started = timestamp_now();
    feller::Scenario scenario = feller::load_scenario(args.scenario);
    feller::SimulationConfig cfg = load_config(args);
    if (cfg.scheme == feller::SimScheme::euler_interlaced)
        cfg.scheme = scenario.default_scheme();
    feller::DiagnosticsPolicy policy;

    json out;
    std::vector<std::pair<std::string, std::string>> extra_files;
    if (probe == "cinf") {
        std::vector<double> grid{10.0, 100.0, 1000.0};
        feller::CinfReport rep = feller::cinf_decay_probe(scenario, cfg, 1.0, 1.0, grid, policy);
        out = feller::cinf_to_json(rep);
        extra_files.emplace_back("cinf.csv", feller::cinf_to_csv(rep));
        std::cout << "cinf probe: " << feller::probe_verdict_name(rep.verdict) << std::endl;
    } else if (probe == "dynkin") {
        feller::TestFunction f = feller::TestFunction::bump1(0.0, 2.0);
        feller::DynkinEstimate est =
            feller::dynkin_quotient(scenario, cfg, f, 0.0, 0.5, 50.0, policy);
        double gen = feller::generator_apply(scenario.sigma, scenario.driver, f, 0.0);
        out = feller::dynkin_to_json(est);
        out["generator_value"] = gen;
        std::cout << "dynkin quotient: " << est.quotient << " +- " << est.std_error
                  << " (generator " << gen << ")" << std::endl;
    } else if (probe == "martingale") {
        feller::TestFunction f = feller::TestFunction::bump1(0.0, 3.0);
        std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0};
        feller::MartingaleReport rep =
            feller::martingale_residual(scenario, cfg, f, 1.0, grid, policy);
        out = feller::martingale_to_json(rep);
        std::cout << "martingale residuals: " << (rep.all_pass ? "pass" : "FAIL") << std::endl;
    } else if (probe == "continuity") {
        feller::TestFunction f = feller::TestFunction::bump1(0.0, 2.0);
        std::vector<double> grid{-1.0, 0.0, 1.0};
        std::vector<double> ts{0.2, 0.1, 0.05, 0.0};
        feller::ContinuityReport rep =
            feller::strong_continuity_probe(scenario, cfg, f, grid, ts);
        out = feller::continuity_to_json(rep);
        std::cout << "continuity trend decreasing: " << (rep.trend_decreasing ? "yes" : "no")
                  << std::endl;
    } else if (probe == "lyapunov") {
        if (!(cfg.trunc_r < 1.0)) cfg.trunc_r = 0.5;
        feller::LyapunovReport rep = feller::lyapunov_bound_probe(
            scenario, cfg, 0.1, 1e4, {{0.0, 0.5}, {1.0, 0.5}, {5.0, 1.0}, {-3.0, 1.0}, {10.0, 0.25}},
            policy);
        out = feller::lyapunov_to_json(rep);
        std::cout << "lyapunov: fitted C " << rep.fitted_c
                  << (rep.premise_violation ? " (premise violation)" : "")
                  << (rep.all_pass ? ", bound holds" : ", bound FAILED") << std::endl;
    } else {
        throw feller::InputError("unknown probe: " + probe +
                                 " (expected cinf|dynkin|martingale|continuity|lyapunov)");
    }

    out["echo"] = scenario_echo(scenario, cfg);
    out["probe"] = probe;
    if (!args.out.empty()) {
        fs::path out_path(args.out);
        fs::path dir = out_path.parent_path();
        if (dir.empty()) dir = ".";
        std::vector<std::pair<std::string, std::string>> files;
        files.emplace_back(out_path.filename().string(), out.dump(2) + "\n");
        for (auto& f : extra_files) files.push_back(std::move(f));
        write_with_manifest("diagnose", scenario, cfg, dir, files, started);
    }
    return kExitOk;
}

int cmd_report(const CommonArgs& args) {
    std::string started = timestamp_now();
    feller::Scenario scenario = feller::load_scenario(args.scenario);
    feller::SimulationConfig cfg = load_config(args);
    if (cfg.scheme == feller::SimScheme::euler_interlaced)
        cfg.scheme = scenario.default_scheme();

    feller::ClassifyPolicy cpolicy;
    cpolicy.radii = args.radii;
    cpolicy.force_profiles = true;
    feller::ClassificationReport cls = feller::classify(scenario, cpolicy);

    feller::DiagnosticsPolicy dpolicy;
    std::vector<double> grid{10.0, 100.0, 1000.0};
    feller::CinfReport cinf = feller::cinf_decay_probe(scenario, cfg, 1.0, 1.0, grid, dpolicy);

    feller::GrowthProbeResult growth = feller::growth_probe(
        scenario.sigma, scenario.driver, {1.0, 4.0, 16.0, 64.0, 256.0});
    feller::IntegrabilityReport integ = feller::check_levy_integrability(scenario.driver.nu);

    json merged = {{"scenario", scenario.label},
                   {"classification", feller::classification_to_json(cls)},
                   {"cinf_probe", feller::cinf_to_json(cinf)},
                   {"symbol_growth", feller::growth_to_json(growth)},
                   {"driver_integrability",
                    {{"near_zero_ok", integ.near_zero_ok},
                     {"tail_ok", integ.tail_ok},
                     {"min_integral", integ.min_integral},
                     {"notes", integ.notes}}},
                   {"echo", scenario_echo(scenario, cfg)}};

    std::cout << "classification: " << feller::verdict_name(cls.verdict)
              << "; cinf probe: " << feller::probe_verdict_name(cinf.verdict) << std::endl;

    if (!args.out.empty()) {
        fs::path dir(args.out);
        std::vector<std::pair<std::string, std::string>> files;
        files.emplace_back("report.json", merged.dump(2) + "\n");
        files.emplace_back("cinf.csv", feller::cinf_to_csv(cinf));
        files.emplace_back("growth.csv", feller::growth_to_csv(growth));
        for (std::size_t i = 0; i < cls.profiles.size(); ++i) {
            files.emplace_back("profile_r" + std::to_string(i) + ".csv",
                               feller::profile_to_csv(cls.profiles[i]));
        }
        write_with_manifest("report", scenario, cfg, dir, files, started);
    }
    return kExitOk;
}

int cmd_selftest(const CommonArgs& args) {
    std::uint64_t seed = resolve_seed(0x20240729ULL);
    feller::SelftestResult result = feller::run_selftest(seed);
    for (const auto& row : result.report.at("scenarios")) {
        std::cout << (row.at("pass").get<bool>() ? "[PASS] " : "[FAIL] ")
                  << row.at("scenario").get<std::string>() << ": "
                  << row.at("verdict").get<std::string>() << " (expected "
                  << row.at("expected").get<std::string>() << ")" << std::endl;
    }
    std::cout << (result.all_pass ? "selftest: all checks passed"
                                  : "selftest: FAILURES detected")
              << std::endl;
    if (!args.out.empty()) {
        fs::create_directories(args.out);
        feller::write_text_file((fs::path(args.out) / "selftest_report.json").string(),
                                result.report.dump(2) + "\n");
        feller::write_text_file((fs::path(args.out) / "selftest_profile.csv").string(),
                                result.profile_csv);
    }
    return result.all_pass ? kExitOk : kExitVerdictMismatch;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"feller-lab: jump-SDE Feller-property classification and diagnostics"};
    app.set_version_flag("--version", feller::kToolVersion);
    app.require_subcommand(1);

    CommonArgs args;
    double r = 1.0, x_min = 1e2, x_max = 1e6;
    int n_points = 25;
    double alpha_override = -1.0, beta_override = -1.0;
    double x0 = 1.0;
    int n_paths_override = -1;
    bool binary = false;
    std::string probe = "cinf";

    auto add_common = [&](CLI::App* cmd, bool needs_scenario) {
        if (needs_scenario)
            cmd->add_option("--scenario", args.scenario, "scenario file or library name")
                ->required();
        cmd->add_option("--config", args.config_path, "simulation config JSON");
        cmd->add_option("--out", args.out, "output file or directory");
        cmd->add_option("--threads", args.threads, "worker thread budget (0 = hardware)");
    };

    CLI::App* classify = app.add_subcommand("classify", "evaluate the jump-measure criterion");
    add_common(classify, true);
    classify->add_option("--r", args.radii, "probe radii")->delimiter(',');

    CLI::App* profile = app.add_subcommand("profile", "criterion masses along an |x| grid");
    add_common(profile, true);
    profile->add_option("--radius", r, "probe radius");
    profile->add_option("--x-min", x_min, "grid start");
    profile->add_option("--x-max", x_max, "grid end");
    profile->add_option("--points", n_points, "grid points per sign");
    profile->add_option("--alpha", alpha_override, "replace driver by a normalized stable law");
    profile->add_option("--beta", beta_override, "override the sigma growth exponent");

    CLI::App* simulate = app.add_subcommand("simulate", "generate solution paths");
    add_common(simulate, true);
    simulate->add_option("--x0", x0, "initial state");
    simulate->add_option("--paths", n_paths_override, "number of paths");
    simulate->add_flag("--binary", binary, "also write the binary frame");

    CLI::App* diagnose = app.add_subcommand("diagnose", "Monte Carlo semigroup probes");
    add_common(diagnose, true);
    diagnose->add_option("--probe", probe, "cinf|dynkin|martingale|continuity|lyapunov");

    CLI::App* report = app.add_subcommand("report", "classification + diagnostics bundle");
    add_common(report, true);
    report->add_option("--r", args.radii, "probe radii")->delimiter(',');

    CLI::App* selftest = app.add_subcommand("selftest", "library regression suite");
    add_common(selftest, false);

    CLI11_PARSE(app, argc, argv);
    feller::set_thread_budget(args.threads);

    try {
        if (classify->parsed()) return cmd_classify(args);
        if (profile->parsed())
            return cmd_profile(args, r, x_min, x_max, n_points, alpha_override, beta_override);
        if (simulate->parsed()) return cmd_simulate(args, x0, n_paths_override, binary);
        if (diagnose->parsed()) return cmd_diagnose(args, probe);
        if (report->parsed()) return cmd_report(args);
        if (selftest->parsed()) return cmd_selftest(args);
    } catch (const feller::ToleranceFailure& e) {
        emit_error_json("tolerance_failure", e.what());
        return kExitToleranceFailure;
    } catch (const feller::InputError& e) {
        emit_error_json("input_error", e.what());
        return kExitInputError;
    } catch (const std::exception& e) {
        emit_error_json("error", e.what());
        return kExitInputError;
    }
    return kExitOk;
}
