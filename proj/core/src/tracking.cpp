#include "vita/tracking.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "vita/feasibility.hpp"
#include "vita/random.hpp"

namespace vita {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::visual_only: return "visual-only";
    case Method::icp: return "icp";
    case Method::vita: return "vita";
  }
  return "unknown";
}

Method parse_method(std::string_view s) {
  if (s == "visual-only") return Method::visual_only;
  if (s == "icp") return Method::icp;
  if (s == "vita") return Method::vita;
  throw std::invalid_argument("unknown method '" + std::string(s) + "'");
}

std::vector<FrameResult> track(const Trajectory& traj, const TrackingOptions& options) {
  options.refinement.validate();
  options.noise.validate();
  const Thresholds& th = options.refinement.thresholds;
  const PointCloud& cloud = traj.object->cloud;
  std::vector<FrameResult> rows;
  rows.reserve(traj.frames.size());
  Pose last_output;

  for (std::size_t f = 0; f < traj.frames.size(); ++f) {
    const Pose& gt = traj.frames[f].ground_truth;
    const std::uint64_t frame_seed = derive_seed(options.seed, {options.scene_id, f});
    Pose estimate;
    std::optional<PreviousFrame> prev;
    if (f == 0) {
      estimate = perturb_pose(gt, options.noise, frame_seed);
    } else {
      // Body-frame error carried forward: zero error stays exactly zero.
      estimate = perturb_pose(gt * (traj.frames[f - 1].ground_truth.inverse() * last_output), options.noise, frame_seed);
      prev = previous_record(traj, f, last_output, th.contact);
    }
    const Scene scene = frame_scene(traj, f, std::move(prev));

    FrameResult r;
    r.scene_id = options.scene_id;
    r.frame = f;
    r.method = options.method;
    r.estimate = evaluate_pose(estimate, gt, cloud);
    const FeasibilityReport before = check_all(scene, estimate, th);
    r.feasible_before = before.overall_pass;
    r.overlap_before = before.penetration.overlap_ratio;

    Pose output = estimate;
    FeasibilityReport after = before;
    const bool run = options.method != Method::visual_only && (options.always_refine || !before.overall_pass);
    if (run) {
      const auto t0 = std::chrono::steady_clock::now();
      if (options.method == Method::vita) {
        const RefinementResult res = refine(scene, estimate, options.refinement);
        output = res.refined_pose;
        r.final_gradient_norm = res.trace.back().gradient_norm;
        r.initial_energy = res.initial_energy.total;
        r.final_energy = res.final_energy.total;
      } else {
        output = icp_refine(scene, estimate, options.icp).refined_pose;
      }
      r.refine_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      r.refined = true;
      after = check_all(scene, output, th);
    }
    r.feasible_after = after.overall_pass;
    r.overlap_after = after.penetration.overlap_ratio;
    r.metrics = evaluate_pose(output, gt, cloud);
    rows.push_back(r);
    last_output = output;
  }
  return rows;
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          const std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::string_view to_string(Ablation a) {
  switch (a) {
    case Ablation::full: return "full";
    case Ablation::no_attractive: return "no-attractive";
    case Ablation::no_penetration: return "no-penetration";
    case Ablation::no_l2: return "no-l2";
    case Ablation::no_init: return "no-init";
    case Ablation::icp: return "icp";
  }
  return "unknown";
}

Ablation parse_ablation(std::string_view s) {
  for (const Ablation a : all_ablations()) {
    if (to_string(a) == s) return a;
  }
  throw std::invalid_argument("unknown ablation '" + std::string(s) + "'");
}

std::vector<Ablation> all_ablations() {
  return {Ablation::full, Ablation::no_attractive, Ablation::no_penetration, Ablation::no_l2, Ablation::no_init,
          Ablation::icp};
}

TrackingOptions ablation_options(Ablation a, const TrackingOptions& base) {
  TrackingOptions o = base;
  o.method = Method::vita;
  switch (a) {
    case Ablation::full: break;
    case Ablation::no_attractive: o.refinement.attractive_stiffness = 0.0; break;
    case Ablation::no_penetration: o.refinement.repulsive_stiffness = 0.0; break;
    case Ablation::no_l2: o.refinement.regularization = 0.0; break;
    case Ablation::no_init: o.refinement.use_initialization = false; break;
    case Ablation::icp: o.method = Method::icp; break;
  }
  return o;
}

AblationSummary summarize(std::string name, const std::vector<FrameResult>& rows) {
  if (rows.empty()) throw std::invalid_argument("summarize: no rows");
  AblationSummary s;
  s.ablation = std::move(name);
  s.frames = rows.size();
  std::vector<double> add;
  std::vector<double> adds;
  double pe = 0.0;
  double overlap = 0.0;
  std::vector<double> grads;
  for (const auto& r : rows) {
    add.push_back(r.metrics.add);
    adds.push_back(r.metrics.adds);
    pe += r.metrics.position_error;
    if (r.refined) {
      ++s.refined_frames;
      overlap += r.overlap_after;
      grads.push_back(r.final_gradient_norm);
    }
  }
  s.auc_add = auc(add);
  s.auc_adds = auc(adds);
  s.mean_pe = pe / static_cast<double>(rows.size());
  if (s.refined_frames > 0) {
    s.mean_overlap = overlap / static_cast<double>(s.refined_frames);
    double mean = 0.0;
    for (const double g : grads) mean += g;
    mean /= static_cast<double>(grads.size());
    double var = 0.0;
    for (const double g : grads) var += (g - mean) * (g - mean);
    s.gradient_norm_variance = var / static_cast<double>(grads.size());
  }
  return s;
}

std::string format_double(double v) {
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

void write_track_csv(std::ostream& out, const std::vector<FrameResult>& rows) {
  out << kTrackCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.scene_id << ',' << r.frame << ',' << to_string(r.method) << ',' << format_double(r.metrics.add) << ','
        << format_double(r.metrics.adds) << ',' << format_double(r.metrics.position_error) << ','
        << (r.feasible_before ? 1 : 0) << ',' << (r.feasible_after ? 1 : 0) << ',' << format_double(r.refine_ms)
        << '\n';
  }
}

void write_ablation_csv(std::ostream& out, const std::vector<AblationSummary>& rows) {
  out << kAblationCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.ablation << ',' << r.frames << ',' << r.refined_frames << ',' << format_double(r.auc_add) << ','
        << format_double(r.auc_adds) << ',' << format_double(r.mean_pe) << ',' << format_double(r.mean_overlap) << ','
        << format_double(r.gradient_norm_variance) << '\n';
  }
}

namespace {

double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}


template <class F>
std::vector<double> time_calls(std::size_t reps, F&& fn) {
  std::vector<double> ms;
  ms.reserve(reps);
  for (std::size_t i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    ms.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  }
  return ms;
}

}  // namespace

GeneratedScene bench_scene(const BenchSize& size, std::uint64_t seed) {
  if (size.object_points == 0 || size.robot_points == 0 || size.taxels == 0) {
    throw std::invalid_argument("run_bench: sizes must be positive");
  }
  ShapeSpec shape;
  shape.kind = ShapeKind::sphere;
  shape.dimensions = Vec3(0.05, 0.0, 0.0);
  GraspSpec grasp = default_grasp(shape, seed);
  // Five fingers with a 2 x 3 grid give 30 taxels; other counts use one row.
  if (size.taxels % 6 == 0 && size.taxels / 6 >= 2) {
    grasp.fingers = static_cast<int>(size.taxels / 6);
  } else {
    grasp.fingers = static_cast<int>(std::max<std::size_t>(2, (size.taxels + 2) / 3));
    grasp.taxel_rows = 1;
    grasp.taxel_cols = static_cast<int>((size.taxels + grasp.fingers - 1) / grasp.fingers);
  }
  const std::size_t links = static_cast<std::size_t>(grasp.fingers) + 1;
  grasp.samples_per_link = (size.robot_points + links - 1) / links;
  ObjectSampling sampling;
  sampling.sample_count = size.object_points;
  GeneratedScene g = generate_scene(shape, grasp, seed, sampling);
  g.scene.robot.cloud.points.resize(size.robot_points);
  g.scene.robot.cloud.normals.resize(std::min(g.scene.robot.cloud.normals.size(), size.robot_points));
  if (g.scene.taxel_poses.size() > size.taxels) {
    g.scene.reading.values.resize(size.taxels);
    g.scene.taxel_poses.resize(size.taxels);
    g.scene.tactile = extract_contacts(g.scene.reading, g.scene.taxel_poses);
  }
  return g;
}

std::vector<BenchRow> run_bench(const std::vector<BenchSize>& sizes, std::size_t repetitions,
                                const std::vector<int>& iterations, const RefinementConfig& config,
                                std::uint64_t seed) {
  if (repetitions == 0) throw std::invalid_argument("run_bench: repetitions must be positive");
  std::vector<BenchRow> rows;
  for (const auto& size : sizes) {
    const GeneratedScene g = bench_scene(size, seed);
    NoiseModel noise;
    noise.translation_sigma = 0.02;
    noise.rotation_sigma = 0.1;
    const Pose visual = perturb_pose(g.ground_truth, noise, derive_seed(seed, {7}));

    volatile bool sink = false;
    auto ms = time_calls(repetitions, [&] { sink = check_all(g.scene, visual, config.thresholds).overall_pass; });
    (void)sink;
    rows.push_back({"feasibility", size, 0, repetitions, percentile(ms, 0.5), percentile(ms, 0.9)});

    for (const int it : iterations) {
      RefinementConfig c = config;
      c.iterations = it;
      volatile double e = 0.0;
      ms = time_calls(repetitions, [&] { e = refine(g.scene, visual, c).final_energy.total; });
      (void)e;
      rows.push_back({"refine", size, it, repetitions, percentile(ms, 0.5), percentile(ms, 0.9)});
    }
  }
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << kBenchCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.component << ',' << r.size.object_points << ',' << r.size.robot_points << ',' << r.size.taxels << ','
        << r.iterations << ',' << r.repetitions << ',' << format_double(r.median_ms) << ',' << format_double(r.p90_ms)
        << '\n';
  }
}

}  // namespace vita
