#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vita/icp.hpp"
#include "vita/refiner.hpp"
#include "vita/synth.hpp"

namespace vita::cli {

std::string sha256_file(const std::filesystem::path& path);

/// UTC, ISO 8601. Honours SOURCE_DATE_EPOCH for reproducible manifests.
std::string timestamp_utc();

struct RunConfig {
  RefinementConfig refinement;
  NoiseModel noise;
  IcpConfig icp;
};

/// Top-level keys override RefinementConfig; optional "noise" and "icp"
/// objects override those models.
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json config_json(const RunConfig& c);

nlohmann::json make_manifest(const std::string& command, std::uint64_t seed, const RunConfig& config,
                             const std::vector<std::filesystem::path>& inputs,
                             const std::vector<std::filesystem::path>& outputs, nlohmann::json extra = {},
                             const std::filesystem::path& relative_to = {});

/// Writes `text` to `path`, throwing std::runtime_error on failure.
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace vita::cli
