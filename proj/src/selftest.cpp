#include "feller/selftest.hpp"

#include <cmath>

#include "feller/diagnostics.hpp"
#include "feller/report_io.hpp"
#include "feller/scenario_io.hpp"

namespace feller {

SelftestResult run_selftest(std::uint64_t master_seed) {
    SelftestResult result;
    nlohmann::json scenarios = nlohmann::json::array();

    ClassifyPolicy policy;
    for (const auto& name : library_scenario_names()) {
        Scenario s = library_scenario(name);
        ClassificationReport rep = classify(s, policy);
        bool pass = s.expected_verdict && rep.verdict == *s.expected_verdict;
        result.all_pass = result.all_pass && pass;
        scenarios.push_back({{"scenario", name},
                             {"expected", s.expected_verdict ? verdict_name(*s.expected_verdict)
                                                             : "none"},
                             {"verdict", verdict_name(rep.verdict)},
                             {"rule_fired", rep.rule_fired},
                             {"pass", pass}});
    }

    // deterministic numeric payload: one criterion profile, full precision
    Scenario stable = library_scenario("example-4.2-stable-beta");
    ConditionProfile profile = condition_profile(stable, 1.0, 1e2, 1e4, 17);
    result.profile_csv = profile_to_csv(profile);

    // simulation smoke check with the exact jump-chain law: the jump count in
    // [0, 1] is Poisson(1), so the no-jump fraction estimates e^{-1}
    Scenario poisson = library_scenario("intro-poisson-counterexample");
    SimulationConfig cfg;
    cfg.horizon = 1.0;
    cfg.dt = 0.05;
    cfg.n_paths = 4000;
    cfg.master_seed = master_seed;
    cfg.scheme = SimScheme::exact_poisson_linear;
    TransitionEstimate est = estimate_transition(
        poisson, cfg, [](const Vec& x) { return x.norm() > 1.0 ? 1.0 : 0.0; }, Vec::Constant(1, 5.0),
        1.0);
    double expected = std::exp(-1.0);
    bool sim_pass = std::abs(est.mean - expected) <= 4.0 * std::sqrt(expected * (1 - expected) /
                                                                     cfg.n_paths);
    result.all_pass = result.all_pass && sim_pass;

    result.report = {{"scenarios", scenarios},
                     {"simulation_smoke",
                      {{"estimate", est.mean},
                       {"stderr", est.std_error},
                       {"expected", expected},
                       {"pass", sim_pass}}},
                     {"master_seed", master_seed},
                     {"all_pass", result.all_pass}};
    return result;
}

}  // namespace feller
