#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "vita/mesh.hpp"

namespace vita {

static_assert(std::endian::native == std::endian::little, "PLY reader assumes a little-endian host");

namespace {

std::uint32_t resolve_obj_index(long long idx, std::size_t vertex_count, std::size_t line_no) {
  long long resolved = idx > 0 ? idx - 1 : static_cast<long long>(vertex_count) + idx;
  if (idx == 0 || resolved < 0 || resolved >= static_cast<long long>(vertex_count)) {
    throw MeshIoError("OBJ line " + std::to_string(line_no) + ": face index out of range");
  }
  return static_cast<std::uint32_t>(resolved);
}

std::size_t ply_type_size(const std::string& type) {
  if (type == "char" || type == "uchar" || type == "int8" || type == "uint8") return 1;
  if (type == "short" || type == "ushort" || type == "int16" || type == "uint16") return 2;
  if (type == "int" || type == "uint" || type == "int32" || type == "uint32" || type == "float" ||
      type == "float32")
    return 4;
  if (type == "double" || type == "float64") return 8;
  throw MeshIoError("PLY: unsupported property type '" + type + "'");
}

template <typename T>
T read_le(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

double read_scalar(const char* p, const std::string& type) {
  if (type == "float" || type == "float32") return read_le<float>(p);
  if (type == "double" || type == "float64") return read_le<double>(p);
  if (type == "int" || type == "int32") return read_le<std::int32_t>(p);
  if (type == "uint" || type == "uint32") return read_le<std::uint32_t>(p);
  if (type == "short" || type == "int16") return read_le<std::int16_t>(p);
  if (type == "ushort" || type == "uint16") return read_le<std::uint16_t>(p);
  if (type == "char" || type == "int8") return read_le<std::int8_t>(p);
  return read_le<std::uint8_t>(p);
}

struct PlyProperty {
  std::string name;
  std::string type;
  bool is_list = false;
  std::string count_type;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

}  // namespace

TriangleMesh load_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MeshIoError("cannot open OBJ file: " + path.string());
  TriangleMesh mesh;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag)) continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ss >> x >> y >> z)) throw MeshIoError("OBJ line " + std::to_string(line_no) + ": malformed vertex");
      mesh.vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<std::uint32_t> face;
      std::string tok;
      while (ss >> tok) {
        const auto slash = tok.find('/');
        long long idx = 0;
        try {
          idx = std::stoll(tok.substr(0, slash));
        } catch (const std::exception&) {
          throw MeshIoError("OBJ line " + std::to_string(line_no) + ": malformed face index '" + tok + "'");
        }
        face.push_back(resolve_obj_index(idx, mesh.vertices.size(), line_no));
      }
      if (face.size() < 3) throw MeshIoError("OBJ line " + std::to_string(line_no) + ": face with < 3 vertices");
      for (std::size_t k = 1; k + 1 < face.size(); ++k) mesh.triangles.push_back({face[0], face[k], face[k + 1]});
    }
  }
  return mesh;
}

void save_obj(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw MeshIoError("cannot write OBJ file: " + path.string());
  out.precision(17);
  for (const auto& v : mesh.vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& t : mesh.triangles) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  if (!out) throw MeshIoError("failed writing OBJ file: " + path.string());
}

TriangleMesh load_ply(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MeshIoError("cannot open PLY file: " + path.string());

  std::string line;
  std::getline(in, line);
  if (line.rfind("ply", 0) != 0) throw MeshIoError("PLY: missing magic");
  std::vector<PlyElement> elements;
  bool binary_le = false;
  for (;;) {
    if (!std::getline(in, line)) throw MeshIoError("PLY: unterminated header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string kw;
    ss >> kw;
    if (kw == "format") {
      std::string fmt;
      ss >> fmt;
      binary_le = fmt == "binary_little_endian";
    } else if (kw == "element") {
      PlyElement e;
      ss >> e.name >> e.count;
      elements.push_back(std::move(e));
    } else if (kw == "property") {
      if (elements.empty()) throw MeshIoError("PLY: property before element");
      PlyProperty p;
      std::string type;
      ss >> type;
      if (type == "list") {
        p.is_list = true;
        ss >> p.count_type >> p.type >> p.name;
      } else {
        p.type = type;
        ss >> p.name;
      }
      elements.back().properties.push_back(std::move(p));
    } else if (kw == "end_header") {
      break;
    }
  }
  if (!binary_le) throw MeshIoError("PLY: only binary_little_endian is supported");

  const std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t pos = 0;
  auto need = [&](std::size_t n) {
    if (pos + n > body.size()) throw MeshIoError("PLY: truncated body");
  };

  TriangleMesh mesh;
  for (const auto& e : elements) {
    for (std::size_t i = 0; i < e.count; ++i) {
      Vec3 v = Vec3::Zero();
      for (const auto& p : e.properties) {
        if (p.is_list) {
          const std::size_t cs = ply_type_size(p.count_type);
          need(cs);
          const auto count = static_cast<std::size_t>(read_scalar(body.data() + pos, p.count_type));
          pos += cs;
          const std::size_t is = ply_type_size(p.type);
          need(count * is);
          if (e.name == "face" && (p.name == "vertex_indices" || p.name == "vertex_index")) {
            std::vector<std::uint32_t> face(count);
            for (std::size_t k = 0; k < count; ++k) {
              const double idx = read_scalar(body.data() + pos + k * is, p.type);
              if (idx < 0) throw MeshIoError("PLY: negative face index");
              face[k] = static_cast<std::uint32_t>(idx);
            }
            if (count < 3) throw MeshIoError("PLY: face with < 3 vertices");
            for (std::size_t k = 1; k + 1 < count; ++k) mesh.triangles.push_back({face[0], face[k], face[k + 1]});
          }
          pos += count * is;
        } else {
          const std::size_t sz = ply_type_size(p.type);
          need(sz);
          if (e.name == "vertex") {
            const double val = read_scalar(body.data() + pos, p.type);
            if (p.name == "x") v.x() = val;
            if (p.name == "y") v.y() = val;
            if (p.name == "z") v.z() = val;
          }
          pos += sz;
        }
      }
      if (e.name == "vertex") mesh.vertices.push_back(v);
    }
  }
  for (const auto& t : mesh.triangles) {
    for (const auto idx : t) {
      if (idx >= mesh.vertices.size()) throw MeshIoError("PLY: face index out of range");
    }
  }
  return mesh;
}

void save_ply(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MeshIoError("cannot write PLY file: " + path.string());
  out << "ply\nformat binary_little_endian 1.0\n"
      << "element vertex " << mesh.vertices.size() << "\n"
      << "property float x\nproperty float y\nproperty float z\n"
      << "element face " << mesh.triangles.size() << "\n"
      << "property list uchar int vertex_indices\nend_header\n";
  for (const auto& v : mesh.vertices) {
    const float xyz[3] = {static_cast<float>(v.x()), static_cast<float>(v.y()), static_cast<float>(v.z())};
    out.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
  }
  for (const auto& t : mesh.triangles) {
    const std::uint8_t n = 3;
    const std::int32_t idx[3] = {static_cast<std::int32_t>(t[0]), static_cast<std::int32_t>(t[1]),
                                 static_cast<std::int32_t>(t[2])};
    out.write(reinterpret_cast<const char*>(&n), 1);
    out.write(reinterpret_cast<const char*>(idx), sizeof(idx));
  }
  if (!out) throw MeshIoError("failed writing PLY file: " + path.string());
}

TriangleMesh load_mesh(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".obj") return load_obj(path);
  if (ext == ".ply") return load_ply(path);
  throw MeshIoError("unsupported mesh format: " + path.string());
}

}  // namespace vita
