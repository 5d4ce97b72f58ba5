#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "manifest.hpp"
#include "vita/feasibility.hpp"
#include "vita/icp.hpp"
#include "vita/random.hpp"
#include "vita/refiner.hpp"
#include "vita/scene_io.hpp"
#include "vita/synth.hpp"
#include "vita/tracking.hpp"

namespace vita::cli {

namespace fs = std::filesystem;

namespace {

RunConfig run_config(const CommonOptions& c) {
  RunConfig rc = c.config.empty() ? RunConfig{} : load_config(c.config);
  if (c.translation_sigma) rc.noise.translation_sigma = *c.translation_sigma;
  if (c.rotation_sigma) rc.noise.rotation_sigma = *c.rotation_sigma;
  if (c.dropout) rc.noise.dropout_probability = *c.dropout;
  if (c.outlier) rc.noise.outlier_translation = *c.outlier;
  rc.noise.validate();
  return rc;
}

char name_buf[32];

std::string numbered(const char* stem, std::size_t i) {
  std::snprintf(name_buf, sizeof name_buf, "%s_%03zu.json", stem, i);
  return name_buf;
}

// A scene document from either a scene file or one frame of a trajectory file.
SceneDocument load_scene_input(const SceneInput& in) {
  const nlohmann::json j = read_json_file(in.scene);
  const fs::path dir = fs::path(in.scene).parent_path();
  if (j.is_object() && j.contains("frames")) {
    TrajectoryDocument t = parse_trajectory(j, dir);
    if (in.frame >= t.frames.size()) throw ParseError("--frame " + std::to_string(in.frame) + " out of range");
    return {t.trajectory.object, t.trajectory.shape, t.trajectory.chain, t.trajectory.sampling,
            std::move(t.frames[in.frame])};
  }
  return parse_scene(j, dir);
}

Pose input_pose(const SceneInput& in, const SceneDocument& doc) {
  Pose p;
  if (in.pose == "visual") {
    p = doc.frame.visual_pose;
  } else if (in.pose == "ground-truth") {
    if (!doc.frame.ground_truth) throw ParseError("frame.ground_truth_pose: missing field");
    p = *doc.frame.ground_truth;
  } else {
    throw ParseError("--pose must be visual or ground-truth");
  }
  if (!in.offset.empty()) {
    if (in.offset.size() != 3) throw ParseError("--offset takes three numbers");
    p.translation += Vec3(in.offset[0], in.offset[1], in.offset[2]);
  }
  return p;
}

std::vector<Trajectory> load_trajectories(const std::vector<std::string>& paths) {
  std::vector<Trajectory> out;
  out.reserve(paths.size());
  for (const auto& p : paths) out.push_back(load_trajectory(p).trajectory);
  return out;
}

std::vector<fs::path> as_paths(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

void print_summary(const AblationSummary& s) {
  std::cout << s.ablation << ": frames=" << s.frames << " refined=" << s.refined_frames
            << " auc_add=" << format_double(s.auc_add) << " auc_adds=" << format_double(s.auc_adds)
            << " mean_pe=" << format_double(s.mean_pe) << '\n';
}

}  // namespace

int cmd_gen(const GenOptions& o, const CommonOptions& c) {
  const Scenario scenario = parse_scenario(o.scenario);
  const RunConfig rc = run_config(c);
  const double contact = rc.refinement.thresholds.contact;
  fs::create_directories(o.out_dir);

  std::vector<Trajectory> trajs(o.count);
  parallel_for(o.count, c.workers, [&](std::size_t i) {
    trajs[i] = simulate_trajectory(scenario, o.frames, derive_seed(c.seed, {i}),
                                   {rc.refinement.sample_count, rc.refinement.voxel_size});
  });

  std::vector<fs::path> outputs;
  for (std::size_t i = 0; i < o.count; ++i) {
    const fs::path p = fs::path(o.out_dir) / numbered("traj", i);
    write_file(p, trajectory_to_json(trajs[i], contact).dump() + "\n");
    outputs.push_back(p);
    spdlog::info("wrote {} ({} frames, {})", p.string(), trajs[i].frames.size(), to_string(trajs[i].shape.kind));
    if (o.scenes) {
      for (std::size_t f = 0; f < trajs[i].frames.size(); ++f) {
        char name[48];
        std::snprintf(name, sizeof name, "scene_%03zu_%03zu.json", i, f);
        const fs::path sp = fs::path(o.out_dir) / name;
        write_file(sp, scene_to_json(trajs[i], f, contact).dump() + "\n");
        outputs.push_back(sp);
      }
    }
  }
  const nlohmann::json params{{"scenario", o.scenario}, {"count", o.count}, {"frames", o.frames}};
  write_file(fs::path(o.out_dir) / "manifest.json", make_manifest("gen", c.seed, rc, {}, outputs, params, o.out_dir).dump(2) + "\n");
  return kExitOk;
}

int cmd_check(const SceneInput& in, const CommonOptions& c) {
  const RunConfig rc = run_config(c);
  const SceneDocument doc = load_scene_input(in);
  const Pose pose = input_pose(in, doc);
  const Scene scene = make_scene(doc);
  const FeasibilityReport report = check_all(scene, pose, rc.refinement.thresholds);
  nlohmann::json j = report;
  std::cout << j.dump(2) << '\n';
  return report.overall_pass ? kExitOk : kExitInfeasible;
}

int cmd_refine(const SceneInput& in, const CommonOptions& c) {
  const RunConfig rc = run_config(c);
  const SceneDocument doc = load_scene_input(in);
  const Pose pose = input_pose(in, doc);
  const Scene scene = make_scene(doc);
  const Thresholds& th = rc.refinement.thresholds;
  const FeasibilityReport before = check_all(scene, pose, th);
  nlohmann::json out{{"input_pose", pose_to_json(pose)}, {"feasibility_before", before}};
  Pose result = pose;
  if (c.always_refine || !before.overall_pass) {
    const RefinementResult r = refine(scene, pose, rc.refinement);
    result = r.refined_pose;
    out["initial_energy"] = r.initial_energy;
    out["final_energy"] = r.final_energy;
    out["trace"] = r.trace;
  }
  out["refined"] = c.always_refine || !before.overall_pass;
  out["refined_pose"] = pose_to_json(result);
  const FeasibilityReport after = check_all(scene, result, th);
  out["feasibility_after"] = after;
  std::cout << out.dump(2) << '\n';
  return after.overall_pass ? kExitOk : kExitInfeasible;
}

int cmd_track(const TrackOptions& o, const CommonOptions& c) {
  const RunConfig rc = run_config(c);
  const Method method = parse_method(o.method);
  const std::vector<Trajectory> trajs = load_trajectories(o.trajectories);

  std::vector<std::vector<FrameResult>> per(trajs.size());
  parallel_for(trajs.size(), c.workers, [&](std::size_t i) {
    TrackingOptions t{method, rc.noise, rc.refinement, rc.icp, c.always_refine, c.seed, i};
    per[i] = track(trajs[i], t);
  });
  std::vector<FrameResult> rows;
  for (auto& p : per) rows.insert(rows.end(), p.begin(), p.end());

  std::ostringstream csv;
  write_track_csv(csv, rows);
  write_file(o.out, csv.str());
  const nlohmann::json params{{"method", o.method}, {"always_refine", c.always_refine}};
  write_file(o.out + ".manifest.json",
             make_manifest("track", c.seed, rc, as_paths(o.trajectories), {o.out}, params).dump(2) + "\n");
  print_summary(summarize(o.method, rows));
  return kExitOk;
}

int cmd_ablate(const AblateOptions& o, const CommonOptions& c) {
  const RunConfig rc = run_config(c);
  std::vector<Ablation> ablations;
  if (o.ablations.empty()) {
    ablations = all_ablations();
  } else {
    for (const auto& a : o.ablations) {
      const Ablation parsed = parse_ablation(a);
      if (std::find(ablations.begin(), ablations.end(), parsed) == ablations.end()) ablations.push_back(parsed);
    }
  }
  const std::vector<Trajectory> trajs = load_trajectories(o.trajectories);
  TrackingOptions base{Method::vita, rc.noise, rc.refinement, rc.icp, c.always_refine, c.seed, 0};

  std::vector<AblationSummary> summaries;
  for (const Ablation a : ablations) {
    const TrackingOptions opt = ablation_options(a, base);
    std::vector<std::vector<FrameResult>> per(trajs.size());
    parallel_for(trajs.size(), c.workers, [&](std::size_t i) {
      TrackingOptions t = opt;
      t.scene_id = i;
      per[i] = track(trajs[i], t);
    });
    std::vector<FrameResult> rows;
    for (auto& p : per) rows.insert(rows.end(), p.begin(), p.end());
    summaries.push_back(summarize(std::string(to_string(a)), rows));
    print_summary(summaries.back());
  }
  std::ostringstream csv;
  write_ablation_csv(csv, summaries);
  write_file(o.out, csv.str());
  nlohmann::json names = nlohmann::json::array();
  for (const Ablation a : ablations) names.push_back(to_string(a));
  write_file(o.out + ".manifest.json",
             make_manifest("ablate", c.seed, rc, as_paths(o.trajectories), {o.out}, {{"ablations", names}}).dump(2) +
                 "\n");
  return kExitOk;
}

int cmd_bench(const BenchOptions& o, const CommonOptions& c) {
  const RunConfig rc = run_config(c);
  std::vector<BenchSize> sizes;
  for (const auto& s : o.sizes) {
    BenchSize b;
    char colon1 = 0;
    char colon2 = 0;
    std::istringstream ss(s);
    if (!(ss >> b.object_points >> colon1 >> b.robot_points >> colon2 >> b.taxels) || colon1 != ':' || colon2 != ':') {
      throw ParseError("--sizes expects OBJECT:ROBOT:TAXELS, got '" + s + "'");
    }
    sizes.push_back(b);
  }
  const std::vector<BenchRow> rows = run_bench(sizes, o.repetitions, o.iterations, rc.refinement, c.seed);
  std::ostringstream csv;
  write_bench_csv(csv, rows);
  if (o.out.empty()) {
    std::cout << csv.str();
  } else {
    write_file(o.out, csv.str());
  }
  return kExitOk;
}

}  // namespace vita::cli
