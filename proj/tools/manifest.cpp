#include "manifest.hpp"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include <openssl/evp.h>

#include "vita/scene_io.hpp"

namespace vita::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md.data(), &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", md[i]);
    hex += byte;
  }
  return hex;
}

std::string timestamp_utc() {
  std::time_t t = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

void noise_from_json(const nlohmann::json& j, NoiseModel& n) {
  n.translation_sigma = j.value("translation_sigma", n.translation_sigma);
  n.rotation_sigma = j.value("rotation_sigma", n.rotation_sigma);
  n.dropout_probability = j.value("dropout_probability", n.dropout_probability);
  n.outlier_translation = j.value("outlier_translation", n.outlier_translation);
}

nlohmann::json noise_json(const NoiseModel& n) {
  return {{"translation_sigma", n.translation_sigma},
          {"rotation_sigma", n.rotation_sigma},
          {"dropout_probability", n.dropout_probability},
          {"outlier_translation", n.outlier_translation}};
}

}  // namespace

RunConfig load_config(const std::filesystem::path& path) {
  const nlohmann::json j = read_json_file(path);
  if (!j.is_object()) throw ParseError(path.string() + ": expected a JSON object");
  RunConfig c;
  try {
    from_json(j, c.refinement);
    if (j.contains("noise")) noise_from_json(j.at("noise"), c.noise);
    if (j.contains("icp")) from_json(j.at("icp"), c.icp);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  c.refinement.validate();
  c.noise.validate();
  c.icp.validate();
  return c;
}

nlohmann::json config_json(const RunConfig& c) {
  nlohmann::json icp;
  to_json(icp, c.icp);
  nlohmann::json refinement;
  to_json(refinement, c.refinement);
  return {{"refinement", refinement}, {"noise", noise_json(c.noise)}, {"icp", icp}};
}

nlohmann::json make_manifest(const std::string& command, std::uint64_t seed, const RunConfig& config,
                             const std::vector<std::filesystem::path>& inputs,
                             const std::vector<std::filesystem::path>& outputs, nlohmann::json extra,
                             const std::filesystem::path& relative_to) {
  const auto shown = [&](const std::filesystem::path& p) {
    return relative_to.empty() ? p.generic_string() : p.lexically_relative(relative_to).generic_string();
  };
  nlohmann::json in = nlohmann::json::array();
  for (const auto& p : inputs) in.push_back({{"path", shown(p)}, {"sha256", sha256_file(p)}});
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : outputs) out.push_back({{"path", shown(p)}, {"sha256", sha256_file(p)}});
  nlohmann::json m{{"tool", "vita"},
                   {"version", VITA_VERSION},
                   {"command", command},
                   {"seed", seed},
                   {"timestamp", timestamp_utc()},
                   {"config", config_json(config)},
                   {"inputs", std::move(in)},
                   {"outputs", std::move(out)}};
  if (!extra.is_null()) m["parameters"] = std::move(extra);
  return m;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace vita::cli
