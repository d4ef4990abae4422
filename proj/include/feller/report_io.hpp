#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "feller/diagnostics.hpp"
#include "feller/scenario_io.hpp"

namespace feller {

/// FNV-1a 64-bit over a byte string; stable across runs and platforms.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hash_hex(const std::string& bytes);

struct RunManifest {
    std::string command;
    std::string scenario_hash;
    std::string config_hash;
    std::uint64_t master_seed = 0;
    std::string tool_version;
    std::string started_at;
    std::string finished_at;
    std::vector<std::string> outputs;
};

nlohmann::json manifest_to_json(const RunManifest& m);

// numeric formatting helper: shortest round-trip decimal
std::string format_double(double v);

// --- CSV payloads -----------------------------------------------------------

std::string profile_to_csv(const ConditionProfile& p);
std::string growth_to_csv(const GrowthProbeResult& g);
std::string cinf_to_csv(const CinfReport& r);
std::string paths_to_csv(const std::vector<PathSample>& paths);

/// Little-endian binary frames, one per path:
///   u32 d | u64 n_times | n_times rows of (t, x_1..x_d) as f64.
std::string paths_to_binary(const std::vector<PathSample>& paths, int d);

// --- JSON payloads ----------------------------------------------------------

nlohmann::json profile_to_json(const ConditionProfile& p);
nlohmann::json classification_to_json(const ClassificationReport& r);
nlohmann::json growth_to_json(const GrowthProbeResult& g);
nlohmann::json cinf_to_json(const CinfReport& r);
nlohmann::json continuity_to_json(const ContinuityReport& r);
nlohmann::json dynkin_to_json(const DynkinEstimate& e);
nlohmann::json martingale_to_json(const MartingaleReport& r);
nlohmann::json lyapunov_to_json(const LyapunovReport& r);

void write_text_file(const std::string& path, const std::string& payload);
std::string read_text_file(const std::string& path);

}  // namespace feller
