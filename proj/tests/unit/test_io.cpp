#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "vita/feasibility.hpp"
#include "vita/mesh.hpp"
#include "vita/scene_io.hpp"
#include "vita/synth.hpp"

using namespace vita;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path d = fs::temp_directory_path() / ("vita_io_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

std::string error_of(const nlohmann::json& doc) {
  try {
    parse_scene(doc);
  } catch (const ParseError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("OBJ and PLY round trips") {
  const fs::path dir = scratch_dir();
  const TriangleMesh m = make_cylinder(0.03, 0.1);
  save_obj(m, dir / "c.obj");
  save_ply(m, dir / "c.ply");
  for (const TriangleMesh& back : {load_mesh(dir / "c.obj"), load_mesh(dir / "c.ply")}) {
    REQUIRE(back.vertices.size() == m.vertices.size());
    CHECK(back.triangles == m.triangles);
    for (std::size_t i = 0; i < m.vertices.size(); ++i) CHECK((back.vertices[i] - m.vertices[i]).norm() < 1e-7);
  }
  fs::remove_all(dir);
}

TEST_CASE("OBJ quads are fanned and negative indices resolve") {
  const fs::path dir = scratch_dir();
  std::ofstream(dir / "q.obj") << "# quad\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\nf -4 -3 -2\n";
  const TriangleMesh m = load_obj(dir / "q.obj");
  CHECK(m.triangles.size() == 3);
  CHECK(m.area() == doctest::Approx(1.5));
  std::ofstream(dir / "bad.obj") << "v 0 0 0\nv 1 0 0\nf 1 2 7\n";
  CHECK_THROWS_AS(load_obj(dir / "bad.obj"), MeshIoError);
  std::ofstream(dir / "bad.ply") << "not a ply\n";
  CHECK_THROWS_AS(load_ply(dir / "bad.ply"), MeshIoError);
  CHECK_THROWS_AS(load_mesh(dir / "missing.stl"), MeshIoError);
  fs::remove_all(dir);
}

TEST_CASE("trajectory documents round trip") {
  const Trajectory t = simulate_trajectory(Scenario::pick, 4, 8);
  const nlohmann::json j = trajectory_to_json(t, 0.05);
  CHECK(j["header"]["scenario"] == "pick");
  CHECK(j["header"]["n_frames"] == 4);
  const TrajectoryDocument doc = parse_trajectory(nlohmann::json::parse(j.dump()));
  REQUIRE(doc.frames.size() == 4);
  CHECK(doc.trajectory.object->cloud.points == t.object->cloud.points);
  CHECK(trajectory_to_json(doc.trajectory, 0.05) == j);

  for (std::size_t f = 0; f < 4; ++f) {
    const nlohmann::json sj = scene_to_json(t, f, 0.05);
    const SceneDocument sd = parse_scene(nlohmann::json::parse(sj.dump()));
    CHECK(sd.frame.joints == t.frames[f].joints);
    CHECK(sd.frame.ground_truth->translation == t.frames[f].ground_truth.translation);
    CHECK(sd.frame.visual_pose.rotation == t.frames[f].visual.rotation);
    const Scene from_file = make_scene(sd);
    const auto prev = previous_record(t, f, f == 0 ? Pose{} : t.frames[f - 1].ground_truth, 0.05);
    const Scene direct = frame_scene(t, f, prev);
    CHECK(from_file.robot.cloud.points == direct.robot.cloud.points);
    CHECK(from_file.tactile.points == direct.tactile.points);
    CHECK(from_file.previous.has_value() == (f > 0));
    if (f > 0) {
      CHECK(from_file.previous->patch == direct.previous->patch);
      CHECK(from_file.previous->activated == direct.previous->activated);
    }
    const FeasibilityReport a = check_all(from_file, t.frames[f].visual, {});
    const FeasibilityReport b = check_all(direct, t.frames[f].visual, {});
    CHECK(a.contact.min_distance == b.contact.min_distance);
    CHECK(a.penetration.overlap_ratio == b.penetration.overlap_ratio);
    CHECK(a.kinematic.displacement == b.kinematic.displacement);
  }
}

TEST_CASE("mesh paths resolve relative to the document") {
  const fs::path dir = scratch_dir();
  const Trajectory t = simulate_trajectory(Scenario::grasp, 2, 2);
  save_obj(t.object->mesh, dir / "object.obj");
  nlohmann::json j = scene_to_json(t, 1, 0.05);
  j["object"].erase("mesh");
  j["object"]["mesh_path"] = "object.obj";
  std::ofstream(dir / "scene.json") << j.dump();
  const SceneDocument sd = load_scene(dir / "scene.json");
  CHECK(sd.object->cloud.size() == t.object->cloud.size());
  fs::remove_all(dir);
}

TEST_CASE("parse errors name the field") {
  const Trajectory t = simulate_trajectory(Scenario::grasp, 2, 3);
  const nlohmann::json good = scene_to_json(t, 1, 0.05);

  nlohmann::json j = good;
  j["frame"]["base_pose"]["rotation"] = {1, 0, 0};
  CHECK(error_of(j).find("frame.base_pose.rotation") != std::string::npos);

  j = good;
  j["frame"].erase("taxel_values");
  CHECK(error_of(j).find("frame.taxel_values") != std::string::npos);

  j = good;
  j["frame"]["joints"].push_back(0.0);
  CHECK(error_of(j).find("frame.joints") != std::string::npos);

  j = good;
  j["object"]["voxel_size"] = -1;
  CHECK(error_of(j).find("object.voxel_size") != std::string::npos);

  j = good;
  j["frame"]["visual_pose"]["translation"][1] = "x";
  CHECK(error_of(j).find("frame.visual_pose.translation[1]") != std::string::npos);

  j = good;
  j["gripper"]["chain"][0]["parent"] = 3;
  CHECK(error_of(j).find("gripper.chain") != std::string::npos);

  CHECK(error_of(good).empty());
}

TEST_CASE("syntax errors report the line") {
  const fs::path dir = scratch_dir();
  std::ofstream(dir / "broken.json") << "{\n  \"object\": {\n    \"mesh\": [1, 2,\n";
  try {
    read_json_file(dir / "broken.json");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
  CHECK_THROWS_AS(read_json_file(dir / "absent.json"), ParseError);
  fs::remove_all(dir);
}
