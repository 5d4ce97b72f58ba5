#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "vita/scene_io.hpp"

using namespace vita::cli;

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("vita");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("VITA_LOG_LEVEL")) {
    const std::string s = level;
    if (s == "error" || s == "warn" || s == "info" || s == "debug") {
      spdlog::set_level(spdlog::level::from_str(s));
    } else {
      spdlog::warn("ignoring VITA_LOG_LEVEL={} (expected error, warn, info or debug)", s);
    }
  }
}

void add_common(CLI::App* cmd, CommonOptions& c, bool noise) {
  cmd->add_option("--seed", c.seed, "Root seed");
  cmd->add_option("--config", c.config, "JSON file overriding refinement defaults")->check(CLI::ExistingFile);
  cmd->add_option("--workers", c.workers, "Worker threads (0 = all cores)");
  if (noise) {
    cmd->add_flag("--always-refine", c.always_refine, "Refine every frame, not only infeasible ones");
    cmd->add_option("--translation-sigma", c.translation_sigma, "Visual translation noise (m)");
    cmd->add_option("--rotation-sigma", c.rotation_sigma, "Visual rotation noise (rad)");
    cmd->add_option("--dropout", c.dropout, "Chance of a gross outlier per frame");
    cmd->add_option("--outlier", c.outlier, "Outlier translation (m)");
  }
}

void add_scene_input(CLI::App* cmd, SceneInput& in) {
  cmd->add_option("--scene", in.scene, "Scene or trajectory JSON")->required()->check(CLI::ExistingFile);
  cmd->add_option("--frame", in.frame, "Frame index when --scene is a trajectory");
  cmd->add_option("--pose", in.pose, "Pose to evaluate")->check(CLI::IsMember({"visual", "ground-truth"}));
  cmd->add_option("--offset", in.offset, "Translation added to the pose (m)")->expected(3);
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Tactile and kinematic feasibility checks and test-time pose refinement"};
  app.set_version_flag("--version", VITA_VERSION);
  app.require_subcommand(1);

  CommonOptions common;
  GenOptions gen;
  SceneInput scene_in;
  TrackOptions track;
  AblateOptions ablate;
  BenchOptions bench;

  auto* g = app.add_subcommand("gen", "Generate synthetic trajectories");
  g->add_option("--scenario", gen.scenario, "grasp, pick or handover")
      ->required()
      ->check(CLI::IsMember({"grasp", "pick", "handover"}));
  g->add_option("--count", gen.count, "Number of trajectories")->check(CLI::PositiveNumber);
  g->add_option("--frames", gen.frames, "Frames per trajectory")->check(CLI::Range(2, 100000));
  g->add_option("--out", gen.out_dir, "Output directory")->required();
  g->add_flag("--scenes", gen.scenes, "Also write every frame as a scene file");
  add_common(g, common, false);

  auto* c = app.add_subcommand("check", "Feasibility report for one frame; exit 1 when infeasible");
  add_scene_input(c, scene_in);
  add_common(c, common, false);

  auto* r = app.add_subcommand("refine", "Check and, if infeasible, refine one frame");
  add_scene_input(r, scene_in);
  add_common(r, common, false);
  r->add_flag("--always-refine", common.always_refine, "Refine even when feasible");

  auto* t = app.add_subcommand("track", "Track trajectories and write per-frame metrics");
  t->add_option("--trajectory", track.trajectories, "Trajectory files")->required()->check(CLI::ExistingFile);
  t->add_option("--method", track.method, "visual-only, icp or vita")
      ->check(CLI::IsMember({"visual-only", "icp", "vita"}));
  t->add_option("--out", track.out, "Output CSV")->required();
  add_common(t, common, true);

  auto* a = app.add_subcommand("ablate", "Aggregate metrics per ablation");
  a->add_option("--trajectory", ablate.trajectories, "Trajectory files")->required()->check(CLI::ExistingFile);
  a->add_option("--ablation", ablate.ablations, "Subset of ablations (default: all)")->delimiter(',')
      ->check(CLI::IsMember({"full", "no-attractive", "no-penetration", "no-l2", "no-init", "icp"}));
  a->add_option("--out", ablate.out, "Output CSV")->required();
  add_common(a, common, true);

  auto* b = app.add_subcommand("bench", "Median timings of feasibility checking and refinement");
  b->add_option("--sizes", bench.sizes, "OBJECT:ROBOT:TAXELS point counts")->delimiter(',');
  b->add_option("--repetitions", bench.repetitions, "Calls per measurement")->check(CLI::PositiveNumber);
  b->add_option("--iterations", bench.iterations, "Refinement iteration counts")->delimiter(',')->check(CLI::PositiveNumber);
  b->add_option("--out", bench.out, "Output CSV (default: stdout)");
  add_common(b, common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (g->parsed()) return cmd_gen(gen, common);
    if (c->parsed()) return cmd_check(scene_in, common);
    if (r->parsed()) return cmd_refine(scene_in, common);
    if (t->parsed()) return cmd_track(track, common);
    if (a->parsed()) return cmd_ablate(ablate, common);
    if (b->parsed()) return cmd_bench(bench, common);
  } catch (const vita::ParseError& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitFailure;
  }
  return kExitUsage;
}
