#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vita::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInfeasible = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitFailure = 3;

struct CommonOptions {
  std::uint64_t seed = 0;
  std::string config;
  bool always_refine = false;
  std::size_t workers = 0;
  // Noise overrides; unset keeps the config file value.
  std::optional<double> translation_sigma;
  std::optional<double> rotation_sigma;
  std::optional<double> dropout;
  std::optional<double> outlier;
};

struct GenOptions {
  std::string scenario;
  std::size_t count = 1;
  std::size_t frames = 20;
  std::string out_dir;
  bool scenes = false;  // also write each frame as a standalone scene file
};

struct SceneInput {
  std::string scene;
  std::size_t frame = 0;
  std::string pose = "visual";
  std::vector<double> offset;
};

struct TrackOptions {
  std::vector<std::string> trajectories;
  std::string method = "vita";
  std::string out;
};

struct AblateOptions {
  std::vector<std::string> trajectories;
  std::vector<std::string> ablations;
  std::string out;
};

struct BenchOptions {
  std::vector<std::string> sizes{"2048:1024:30"};
  std::size_t repetitions = 100;
  std::vector<int> iterations{10};
  std::string out;
};

int cmd_gen(const GenOptions& o, const CommonOptions& c);
int cmd_check(const SceneInput& in, const CommonOptions& c);
int cmd_refine(const SceneInput& in, const CommonOptions& c);
int cmd_track(const TrackOptions& o, const CommonOptions& c);
int cmd_ablate(const AblateOptions& o, const CommonOptions& c);
int cmd_bench(const BenchOptions& o, const CommonOptions& c);

}  // namespace vita::cli
