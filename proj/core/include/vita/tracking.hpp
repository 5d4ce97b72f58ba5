#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "vita/icp.hpp"
#include "vita/metrics.hpp"
#include "vita/refiner.hpp"
#include "vita/synth.hpp"

namespace vita {

enum class Method { visual_only, icp, vita };
std::string_view to_string(Method m);
Method parse_method(std::string_view s);

struct TrackingOptions {
  Method method = Method::vita;
  NoiseModel noise;
  RefinementConfig refinement;
  IcpConfig icp;
  bool always_refine = false;
  std::uint64_t seed = 0;
  std::uint64_t scene_id = 0;
};

struct FrameResult {
  std::uint64_t scene_id = 0;
  std::size_t frame = 0;
  Method method = Method::vita;
  MetricSample metrics;     // output pose
  MetricSample estimate;    // mock visual estimate before any refinement
  bool feasible_before = false;
  bool feasible_after = false;
  bool refined = false;
  double refine_ms = 0.0;
  double overlap_before = 0.0;
  double overlap_after = 0.0;
  double final_gradient_norm = 0.0;  // last trace entry; vita only
  double initial_energy = 0.0;
  double final_energy = 0.0;
};

/// Estimate-then-track over one trajectory. Frame 0 perturbs the ground
/// truth; frame n perturbs the previous output moved by the ground-truth
/// relative motion. Refinement runs only on infeasible estimates unless
/// `always_refine` is set, and its output seeds the next frame.
std::vector<FrameResult> track(const Trajectory& traj, const TrackingOptions& options);

/// Runs `fn(i)` for i in [0, n) on up to `workers` threads (0 = hardware
/// concurrency). Callers write into per-index slots, so merges stay ordered.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

enum class Ablation { full, no_attractive, no_penetration, no_l2, no_init, icp };
std::string_view to_string(Ablation a);
Ablation parse_ablation(std::string_view s);
std::vector<Ablation> all_ablations();

/// Options for one ablation derived from a base configuration.
TrackingOptions ablation_options(Ablation a, const TrackingOptions& base);

struct AblationSummary {
  std::string ablation;
  std::size_t frames = 0;
  std::size_t refined_frames = 0;
  double auc_add = 0.0;
  double auc_adds = 0.0;
  double mean_pe = 0.0;
  double mean_overlap = 0.0;         // output overlap ratio over refined frames
  double gradient_norm_variance = 0.0;  // final gradient norm over refined frames
};

AblationSummary summarize(std::string name, const std::vector<FrameResult>& rows);

inline constexpr std::string_view kTrackCsvHeader =
    "scene_id,frame,method,add,adds,pe,feasible_before,feasible_after,refine_ms";
inline constexpr std::string_view kAblationCsvHeader =
    "ablation,frames,refined_frames,auc_add,auc_adds,mean_pe,mean_overlap,gradient_norm_variance";

/// Shortest text that reads back to the same double.
std::string format_double(double v);

void write_track_csv(std::ostream& out, const std::vector<FrameResult>& rows);
void write_ablation_csv(std::ostream& out, const std::vector<AblationSummary>& rows);

struct BenchSize {
  std::size_t object_points = 2048;
  std::size_t robot_points = 1024;
  std::size_t taxels = 30;
};

struct BenchRow {
  std::string component;
  BenchSize size;
  int iterations = 0;
  std::size_t repetitions = 0;
  double median_ms = 0.0;
  double p90_ms = 0.0;
};

/// Sphere grasp resized to the requested cloud and taxel counts.
GeneratedScene bench_scene(const BenchSize& size, std::uint64_t seed);

inline constexpr std::string_view kBenchCsvHeader =
    "component,object_points,robot_points,taxels,iterations,repetitions,median_ms,p90_ms";

/// Times check_all and refine (once per entry of `iterations`) on a
/// generated scene of each size. Single-threaded.
std::vector<BenchRow> run_bench(const std::vector<BenchSize>& sizes, std::size_t repetitions,
                                const std::vector<int>& iterations, const RefinementConfig& config,
                                std::uint64_t seed);

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace vita
