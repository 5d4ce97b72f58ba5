#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vita/geometry.hpp"
#include "vita/mesh.hpp"
#include "vita/scene.hpp"
#include "vita/synth.hpp"

namespace vita {

/// Malformed document. The message starts with the offending field path
/// (e.g. `frame.base_pose.rotation[4]`) or a line number for syntax errors.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json pose_to_json(const Pose& pose);
nlohmann::json mesh_to_json(const TriangleMesh& mesh);
nlohmann::json chain_to_json(const KinematicChain& chain);

struct PreviousRecord {
  Pose pose;
  std::vector<std::size_t> patch;
  // Optional; needed only for taxel-motion initialization.
  std::optional<std::vector<double>> joints;
  std::optional<Pose> base_pose;
  std::optional<std::vector<double>> taxel_values;
};

struct FrameRecord {
  std::vector<double> joints;
  Pose base_pose;
  std::vector<double> taxel_values;
  double threshold = 0.5;
  Pose visual_pose;
  std::optional<Pose> ground_truth;
  std::optional<PreviousRecord> previous;
};

struct SceneDocument {
  std::shared_ptr<const ObjectModel> object;
  std::optional<ShapeSpec> shape;
  std::shared_ptr<const KinematicChain> chain;
  RobotSampling sampling;
  FrameRecord frame;
};

struct TrajectoryDocument {
  Trajectory trajectory;
  std::vector<FrameRecord> frames;
};

/// Relative mesh paths resolve against `base_dir`.
SceneDocument parse_scene(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
TrajectoryDocument parse_trajectory(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

/// Reads and parses a file; syntax errors report the line.
nlohmann::json read_json_file(const std::filesystem::path& path);
SceneDocument load_scene(const std::filesystem::path& path);
TrajectoryDocument load_trajectory(const std::filesystem::path& path);

/// Scene with the previous record rebuilt from the document.
Scene make_scene(const SceneDocument& doc);

/// Trajectory file with every previous record taken from the ground truth.
nlohmann::json trajectory_to_json(const Trajectory& traj, double contact_threshold);
/// Frame `f` of a trajectory as a standalone scene document.
nlohmann::json scene_to_json(const Trajectory& traj, std::size_t f, double contact_threshold);

}  // namespace vita
