#include "feller/report_io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "feller/errors.hpp"
#include "feller/version.hpp"

namespace feller {

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hash_hex(const std::string& bytes) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

nlohmann::json manifest_to_json(const RunManifest& m) {
    nlohmann::json j;
    j["command"] = m.command;
    j["scenario_hash"] = m.scenario_hash;
    j["config_hash"] = m.config_hash;
    j["master_seed"] = m.master_seed;
    j["tool_version"] = m.tool_version.empty() ? kToolVersion : m.tool_version;
    j["started_at"] = m.started_at;
    j["finished_at"] = m.finished_at;
    j["outputs"] = m.outputs;
    return j;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// --- CSV --------------------------------------------------------------------

std::string profile_to_csv(const ConditionProfile& p) {
    std::ostringstream out;
    out << "x,mass,stderr\n";
    for (const auto& pt : p.points) {
        out << format_double(pt.x) << ','
            << (pt.infinite ? "inf" : format_double(pt.mass)) << ','
            << format_double(pt.std_error) << '\n';
    }
    return out.str();
}

std::string growth_to_csv(const GrowthProbeResult& g) {
    std::ostringstream out;
    out << "r,sup_abs_q\n";
    for (const auto& row : g.rows) {
        out << format_double(row.r) << ',' << format_double(row.sup_abs_q) << '\n';
    }
    return out.str();
}

std::string cinf_to_csv(const CinfReport& r) {
    std::ostringstream out;
    out << "x,raw_estimate,raw_stderr,smooth_estimate,smooth_stderr,n_exploded\n";
    for (const auto& row : r.rows) {
        out << format_double(row.x) << ',' << format_double(row.raw_estimate) << ','
            << format_double(row.raw_se) << ',' << format_double(row.smooth_estimate) << ','
            << format_double(row.smooth_se) << ',' << row.n_exploded << '\n';
    }
    return out.str();
}

std::string paths_to_csv(const std::vector<PathSample>& paths) {
    std::ostringstream out;
    int d = paths.empty() || paths[0].states.empty() ? 1
                                                     : static_cast<int>(paths[0].states[0].size());
    out << "path_id,t";
    for (int i = 0; i < d; ++i) out << ",x" << (i + 1);
    out << '\n';
    for (const auto& p : paths) {
        for (std::size_t i = 0; i < p.times.size(); ++i) {
            out << p.path_index << ',' << format_double(p.times[i]);
            for (int c = 0; c < d; ++c) out << ',' << format_double(p.states[i](c));
            out << '\n';
        }
    }
    return out.str();
}

namespace {

template <typename T>
void append_le(std::string& buf, T value) {
    // x86-64 is little-endian; write bytes directly
    char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    buf.append(bytes, sizeof(T));
}

}  // namespace

std::string paths_to_binary(const std::vector<PathSample>& paths, int d) {
    std::string buf;
    for (const auto& p : paths) {
        append_le<std::uint32_t>(buf, static_cast<std::uint32_t>(d));
        append_le<std::uint64_t>(buf, static_cast<std::uint64_t>(p.times.size()));
        for (std::size_t i = 0; i < p.times.size(); ++i) {
            append_le<double>(buf, p.times[i]);
            for (int c = 0; c < d; ++c) append_le<double>(buf, p.states[i](c));
        }
    }
    return buf;
}

// --- JSON -------------------------------------------------------------------

nlohmann::json profile_to_json(const ConditionProfile& p) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& pt : p.points) {
        rows.push_back({{"x", pt.x},
                        {"mass", pt.infinite ? -1.0 : pt.mass},
                        {"stderr", pt.std_error},
                        {"infinite", pt.infinite}});
    }
    return {{"r", p.r},
            {"points", rows},
            {"limit_estimate", std::isfinite(p.limit_estimate) ? p.limit_estimate : -1.0},
            {"limit_infinite", !std::isfinite(p.limit_estimate)},
            {"loglog_slope", p.loglog_slope},
            {"verdict", profile_verdict_name(p.verdict)}};
}

nlohmann::json classification_to_json(const ClassificationReport& r) {
    nlohmann::json profiles = nlohmann::json::array();
    for (const auto& p : r.profiles) profiles.push_back(profile_to_json(p));
    return {{"verdict", verdict_name(r.verdict)},
            {"rule_fired", r.rule_fired},
            {"conditional", r.conditional},
            {"premise_warning", r.premise_warning},
            {"profiles", profiles},
            {"notes", r.notes}};
}

nlohmann::json growth_to_json(const GrowthProbeResult& g) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : g.rows) rows.push_back({{"r", row.r}, {"sup_abs_q", row.sup_abs_q}});
    const char* trend = g.trend == GrowthTrend::vanishing ? "vanishing"
                        : g.trend == GrowthTrend::not_vanishing ? "not_vanishing"
                                                                : "inconclusive";
    return {{"rows", rows}, {"trend", trend}};
}

nlohmann::json cinf_to_json(const CinfReport& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"x", row.x},
                        {"raw_estimate", row.raw_estimate},
                        {"raw_stderr", row.raw_se},
                        {"smooth_estimate", row.smooth_estimate},
                        {"smooth_stderr", row.smooth_se},
                        {"n_exploded", row.n_exploded}});
    }
    return {{"R", r.R},
            {"t", r.t},
            {"rows", rows},
            {"limit_estimate", r.limit_estimate},
            {"verdict", probe_verdict_name(r.verdict)},
            {"notes", r.notes}};
}

nlohmann::json continuity_to_json(const ContinuityReport& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"t", row.t}, {"sup_deviation", row.sup_deviation}});
    return {{"rows", rows}, {"trend_decreasing", r.trend_decreasing}};
}

nlohmann::json dynkin_to_json(const DynkinEstimate& e) {
    return {{"quotient", e.quotient},       {"stderr", e.std_error},
            {"mean_exit_time", e.mean_exit_time}, {"cap_hit_frac", e.cap_hit_frac},
            {"inconclusive", e.inconclusive},     {"n_paths", e.n_paths}};
}

nlohmann::json martingale_to_json(const MartingaleReport& r) {
    nlohmann::json incs = nlohmann::json::array();
    for (const auto& inc : r.increments) {
        incs.push_back({{"t0", inc.t0},
                        {"t1", inc.t1},
                        {"mean", inc.mean},
                        {"stderr", inc.std_error},
                        {"pass", inc.pass}});
    }
    nlohmann::json drift = nlohmann::json::array();
    for (const auto& [t, m] : r.drift) drift.push_back({{"t", t}, {"mean", m}});
    return {{"increments", incs}, {"drift", drift}, {"all_pass", r.all_pass}};
}

nlohmann::json lyapunov_to_json(const LyapunovReport& r) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks) {
        checks.push_back({{"x", c.x},
                          {"t", c.t},
                          {"estimate", c.estimate},
                          {"stderr", c.std_error},
                          {"bound", c.bound},
                          {"pass", c.pass}});
    }
    return {{"fitted_c", r.fitted_c},
            {"premise_violation", r.premise_violation},
            {"checks", checks},
            {"all_pass", r.all_pass},
            {"notes", r.notes}};
}

void write_text_file(const std::string& path, const std::string& payload) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write file: " + path);
    out << payload;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace feller
