#include "vita/scene_io.hpp"

#include <fstream>
#include <sstream>

namespace vita {

using nlohmann::json;

namespace {

// A JSON node plus the path that led to it, so every error names its field.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError((path_.empty() ? std::string("<root>") : path_) + ": " + what);
  }

  const json& raw() const { return j_; }
  const std::string& path() const { return path_; }

  bool has(const char* key) const { return j_.is_object() && j_.contains(key) && !j_.at(key).is_null(); }

  Node at(const char* key) const {
    if (!j_.is_object()) fail("expected an object");
    if (!j_.contains(key)) Node(j_, join(key)).fail("missing field");
    return Node(j_.at(key), join(key));
  }

  std::optional<Node> find(const char* key) const {
    if (!has(key)) return std::nullopt;
    return Node(j_.at(key), join(key));
  }

  std::size_t size() const {
    if (!j_.is_array()) fail("expected an array");
    return j_.size();
  }

  Node operator[](std::size_t i) const { return Node(j_.at(i), path_ + "[" + std::to_string(i) + "]"); }

  double number() const {
    if (!j_.is_number()) fail("expected a number");
    const double v = j_.get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  std::int64_t integer() const {
    if (!j_.is_number_integer()) fail("expected an integer");
    return j_.get<std::int64_t>();
  }

  std::uint64_t unsigned_integer() const {
    if (!j_.is_number_unsigned() && !(j_.is_number_integer() && j_.get<std::int64_t>() >= 0)) {
      fail("expected a non-negative integer");
    }
    return j_.get<std::uint64_t>();
  }

  std::string string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }

  std::vector<double> numbers(std::optional<std::size_t> expected = std::nullopt) const {
    const std::size_t n = size();
    if (expected && n != *expected) fail("expected " + std::to_string(*expected) + " numbers, got " + std::to_string(n));
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back((*this)[i].number());
    return out;
  }

  Vec3 vec3() const {
    const auto v = numbers(3);
    return {v[0], v[1], v[2]};
  }

 private:
  std::string join(const char* key) const { return path_.empty() ? std::string(key) : path_ + "." + key; }

  const json& j_;
  std::string path_;
};

Pose parse_pose(const Node& n) {
  const auto r = n.at("rotation").numbers(9);
  Pose p;
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) p.rotation(i, k) = r[static_cast<std::size_t>(3 * i + k)];
  }
  p.translation = n.at("translation").vec3();
  if (!p.is_valid(1e-6)) n.at("rotation").fail("not a rotation matrix");
  return p;
}

TriangleMesh parse_mesh(const Node& n) {
  TriangleMesh m;
  const Node v = n.at("vertices");
  for (std::size_t i = 0; i < v.size(); ++i) m.vertices.push_back(v[i].vec3());
  const Node t = n.at("triangles");
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Node tri = t[i];
    if (tri.size() != 3) tri.fail("expected 3 indices");
    std::array<std::uint32_t, 3> idx{};
    for (std::size_t k = 0; k < 3; ++k) {
      const std::uint64_t x = tri[k].unsigned_integer();
      if (x >= m.vertices.size()) tri[k].fail("vertex index out of range");
      idx[k] = static_cast<std::uint32_t>(x);
    }
    m.triangles.push_back(idx);
  }
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    n.fail(e.what());
  }
  return m;
}

JointType parse_joint_type(const Node& n) {
  const std::string s = n.string();
  if (s == "fixed") return JointType::fixed;
  if (s == "revolute") return JointType::revolute;
  if (s == "prismatic") return JointType::prismatic;
  n.fail("unknown joint type '" + s + "'");
}

std::string_view joint_type_name(JointType t) {
  switch (t) {
    case JointType::fixed: return "fixed";
    case JointType::revolute: return "revolute";
    case JointType::prismatic: return "prismatic";
  }
  return "fixed";
}

struct ObjectPart {
  std::shared_ptr<const ObjectModel> model;
  std::optional<ShapeSpec> shape;
};

ObjectPart parse_object(const Node& n, const std::filesystem::path& base_dir) {
  TriangleMesh mesh;
  if (const auto inline_mesh = n.find("mesh")) {
    mesh = parse_mesh(*inline_mesh);
  } else {
    const Node p = n.at("mesh_path");
    std::filesystem::path path = p.string();
    if (path.is_relative()) path = base_dir / path;
    try {
      mesh = load_mesh(path);
    } catch (const std::exception& e) {
      p.fail(e.what());
    }
  }
  const std::uint64_t samples = n.at("sample_count").unsigned_integer();
  if (samples == 0) n.at("sample_count").fail("must be positive");
  const double voxel = n.at("voxel_size").number();
  if (!(voxel > 0.0)) n.at("voxel_size").fail("must be positive");
  const std::uint64_t seed = n.has("seed") ? n.at("seed").unsigned_integer() : 0;
  ObjectPart out;
  out.model = make_object_model(std::move(mesh), samples, voxel, seed);
  if (const auto s = n.find("shape")) {
    ShapeSpec spec;
    try {
      spec.kind = parse_shape_kind(s->at("kind").string());
    } catch (const std::invalid_argument& e) {
      s->at("kind").fail(e.what());
    }
    spec.dimensions = s->at("dimensions").vec3();
    if (const auto mp = s->find("mesh_path")) spec.mesh_path = mp->string();
    out.shape = spec;
  }
  return out;
}

struct GripperPart {
  std::shared_ptr<const KinematicChain> chain;
  RobotSampling sampling;
};

GripperPart parse_gripper(const Node& n) {
  std::vector<Link> links;
  const Node chain = n.at("chain");
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const Node l = chain[i];
    Link link;
    link.name = l.at("name").string();
    link.parent = static_cast<int>(l.at("parent").integer());
    link.origin = parse_pose(l.at("origin"));
    const Node jt = l.at("joint");
    link.joint.type = parse_joint_type(jt.at("type"));
    link.joint.axis = jt.at("axis").vec3();
    if (const auto m = l.find("mesh")) link.mesh = parse_mesh(*m);
    links.push_back(std::move(link));
  }
  std::vector<TaxelMount> taxels;
  const Node tx = n.at("taxels");
  for (std::size_t i = 0; i < tx.size(); ++i) {
    taxels.push_back({static_cast<std::size_t>(tx[i].at("link").unsigned_integer()), parse_pose(tx[i].at("pose"))});
  }
  GripperPart out;
  try {
    out.chain = std::make_shared<const KinematicChain>(std::move(links), std::move(taxels));
  } catch (const std::invalid_argument& e) {
    chain.fail(e.what());
  }
  out.sampling.samples_per_link = n.has("samples_per_link") ? n.at("samples_per_link").unsigned_integer() : 256;
  out.sampling.seed = n.has("seed") ? n.at("seed").unsigned_integer() : 0;
  return out;
}

FrameRecord parse_frame(const Node& n, const KinematicChain& chain) {
  FrameRecord f;
  f.joints = n.at("joints").numbers(chain.movable_joint_count());
  f.base_pose = parse_pose(n.at("base_pose"));
  f.taxel_values = n.at("taxel_values").numbers(chain.taxels().size());
  f.threshold = n.has("threshold") ? n.at("threshold").number() : 0.5;
  f.visual_pose = parse_pose(n.at("visual_pose"));
  if (const auto gt = n.find("ground_truth_pose")) f.ground_truth = parse_pose(*gt);
  if (const auto p = n.find("previous")) {
    PreviousRecord prev;
    prev.pose = parse_pose(p->at("pose"));
    const Node idx = p->at("patch_indices");
    for (std::size_t i = 0; i < idx.size(); ++i) prev.patch.push_back(idx[i].unsigned_integer());
    if (const auto j = p->find("joints")) prev.joints = j->numbers(chain.movable_joint_count());
    if (const auto b = p->find("base_pose")) prev.base_pose = parse_pose(*b);
    if (const auto v = p->find("taxel_values")) prev.taxel_values = v->numbers(chain.taxels().size());
    f.previous = std::move(prev);
  }
  return f;
}

std::size_t line_of(const std::string& text, std::size_t byte) {
  const auto end = text.begin() + static_cast<std::ptrdiff_t>(std::min(byte, text.size()));
  return 1 + static_cast<std::size_t>(std::count(text.begin(), end, '\n'));
}

json mesh_json(const TriangleMesh& m) { return mesh_to_json(m); }

json frame_json(const Trajectory& traj, std::size_t f, double contact_threshold) {
  const TrajectoryFrame& fr = traj.frames[f];
  json j{{"joints", fr.joints},
         {"base_pose", pose_to_json(fr.base_pose)},
         {"taxel_values", fr.taxel_values},
         {"threshold", traj.binary_threshold},
         {"visual_pose", pose_to_json(fr.visual)},
         {"ground_truth_pose", pose_to_json(fr.ground_truth)}};
  if (f > 0) {
    const TrajectoryFrame& pf = traj.frames[f - 1];
    const auto prev = previous_record(traj, f, pf.ground_truth, contact_threshold);
    j["previous"] = json{{"pose", pose_to_json(pf.ground_truth)},
                         {"patch_indices", prev->patch},
                         {"joints", pf.joints},
                         {"base_pose", pose_to_json(pf.base_pose)},
                         {"taxel_values", pf.taxel_values}};
  }
  return j;
}

json object_json(const Trajectory& traj) {
  json j{{"mesh", mesh_json(traj.object->mesh)},
         {"sample_count", traj.object->cloud.size()},
         {"voxel_size", traj.object->voxels.voxel_size()},
         {"seed", traj.object->sample_seed}};
  json shape{{"kind", to_string(traj.shape.kind)},
             {"dimensions", {traj.shape.dimensions.x(), traj.shape.dimensions.y(), traj.shape.dimensions.z()}}};
  if (!traj.shape.mesh_path.empty()) shape["mesh_path"] = traj.shape.mesh_path;
  j["shape"] = std::move(shape);
  return j;
}

json gripper_json(const Trajectory& traj) {
  json j = chain_to_json(*traj.chain);
  j["samples_per_link"] = traj.sampling.samples_per_link;
  j["seed"] = traj.sampling.seed;
  return j;
}

}  // namespace

json pose_to_json(const Pose& p) {
  json r = json::array();
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) r.push_back(p.rotation(i, k));
  }
  return json{{"rotation", r}, {"translation", {p.translation.x(), p.translation.y(), p.translation.z()}}};
}

json mesh_to_json(const TriangleMesh& m) {
  json v = json::array();
  for (const auto& p : m.vertices) v.push_back({p.x(), p.y(), p.z()});
  json t = json::array();
  for (const auto& tri : m.triangles) t.push_back({tri[0], tri[1], tri[2]});
  return json{{"vertices", std::move(v)}, {"triangles", std::move(t)}};
}

json chain_to_json(const KinematicChain& chain) {
  json links = json::array();
  for (const auto& l : chain.links()) {
    json j{{"name", l.name},
           {"parent", l.parent},
           {"origin", pose_to_json(l.origin)},
           {"joint", {{"type", joint_type_name(l.joint.type)}, {"axis", {l.joint.axis.x(), l.joint.axis.y(), l.joint.axis.z()}}}}};
    if (l.mesh) j["mesh"] = mesh_to_json(*l.mesh);
    links.push_back(std::move(j));
  }
  json taxels = json::array();
  for (const auto& t : chain.taxels()) taxels.push_back({{"link", t.link}, {"pose", pose_to_json(t.mount)}});
  return json{{"chain", std::move(links)}, {"taxels", std::move(taxels)}};
}

SceneDocument parse_scene(const json& doc, const std::filesystem::path& base_dir) {
  const Node root(doc, "");
  SceneDocument out;
  ObjectPart obj = parse_object(root.at("object"), base_dir);
  out.object = std::move(obj.model);
  out.shape = std::move(obj.shape);
  GripperPart g = parse_gripper(root.at("gripper"));
  out.chain = std::move(g.chain);
  out.sampling = g.sampling;
  out.frame = parse_frame(root.at("frame"), *out.chain);
  return out;
}

TrajectoryDocument parse_trajectory(const json& doc, const std::filesystem::path& base_dir) {
  const Node root(doc, "");
  const Node header = root.at("header");
  TrajectoryDocument out;
  Trajectory& t = out.trajectory;
  try {
    t.scenario = parse_scenario(header.at("scenario").string());
  } catch (const std::invalid_argument& e) {
    header.at("scenario").fail(e.what());
  }
  t.seed = header.at("seed").unsigned_integer();
  const std::uint64_t n = header.at("n_frames").unsigned_integer();

  ObjectPart obj = parse_object(root.at("object"), base_dir);
  t.object = std::move(obj.model);
  if (obj.shape) t.shape = *obj.shape;
  GripperPart g = parse_gripper(root.at("gripper"));
  t.chain = std::move(g.chain);
  t.sampling = g.sampling;

  const Node frames = root.at("frames");
  if (frames.size() != n) frames.fail("header says " + std::to_string(n) + " frames, found " + std::to_string(frames.size()));
  for (std::size_t i = 0; i < frames.size(); ++i) {
    FrameRecord rec = parse_frame(frames[i], *t.chain);
    if (!rec.ground_truth) frames[i].at("ground_truth_pose").fail("required in trajectories");
    t.binary_threshold = rec.threshold;
    t.frames.push_back({rec.joints, rec.base_pose, rec.taxel_values, *rec.ground_truth, rec.visual_pose});
    out.frames.push_back(std::move(rec));
  }
  return out;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
  }
}

SceneDocument load_scene(const std::filesystem::path& path) {
  return parse_scene(read_json_file(path), path.parent_path());
}

TrajectoryDocument load_trajectory(const std::filesystem::path& path) {
  return parse_trajectory(read_json_file(path), path.parent_path());
}

Scene make_scene(const SceneDocument& doc) {
  std::optional<PreviousFrame> prev;
  const FrameRecord& f = doc.frame;
  if (f.previous) {
    PreviousFrame p;
    p.pose = f.previous->pose;
    p.patch = f.previous->patch;
    if (f.previous->joints && f.previous->base_pose) {
      p.taxel_poses = taxel_poses(*doc.chain, forward_kinematics(*doc.chain, *f.previous->joints, *f.previous->base_pose));
    }
    if (f.previous->taxel_values) {
      p.activated = TactileReading{*f.previous->taxel_values, f.threshold}.activated();
    }
    prev = std::move(p);
  }
  return build_scene(doc.object, doc.chain, f.joints, f.base_pose, TactileReading{f.taxel_values, f.threshold},
                     doc.sampling, std::move(prev));
}

json trajectory_to_json(const Trajectory& traj, double contact_threshold) {
  json frames = json::array();
  for (std::size_t f = 0; f < traj.frames.size(); ++f) frames.push_back(frame_json(traj, f, contact_threshold));
  return json{{"header", {{"scenario", to_string(traj.scenario)}, {"seed", traj.seed}, {"n_frames", traj.frames.size()}}},
              {"object", object_json(traj)},
              {"gripper", gripper_json(traj)},
              {"frames", std::move(frames)}};
}

json scene_to_json(const Trajectory& traj, std::size_t f, double contact_threshold) {
  if (f >= traj.frames.size()) throw std::out_of_range("scene_to_json: frame index out of range");
  return json{{"object", object_json(traj)}, {"gripper", gripper_json(traj)}, {"frame", frame_json(traj, f, contact_threshold)}};
}

}  // namespace vita
