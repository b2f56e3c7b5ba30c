#include "fracsar/manifest.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <memory>

#include "fracsar/error.hpp"
#include "fracsar/raster_io.hpp"

namespace fracsar {

std::string sha256_file(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw DataError("sha256 failed for '" + path.string() + "'");
  }
  std::string hex;
  hex.reserve(2 * len);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof(buf), "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

RunManifest::RunManifest(std::string command) : command_(std::move(command)) {}

void RunManifest::add_input(const std::string& role, const std::filesystem::path& path) {
  inputs_.push_back({role, path, sha256_file(path)});
}

void RunManifest::add_output(const std::string& role, const std::filesystem::path& path) {
  outputs_.push_back({role, path, sha256_file(path)});
}

nlohmann::json RunManifest::to_json() const {
  using nlohmann::json;
  json inputs = json::array();
  json outputs = json::array();
  json paths = json::object();
  for (const auto& e : inputs_) {
    inputs.push_back({{"role", e.role}, {"sha256", e.sha256}});
    paths["input:" + e.role] = e.path.string();
  }
  for (const auto& e : outputs_) {
    outputs.push_back({{"role", e.role}, {"sha256", e.sha256}});
    paths["output:" + e.role] = e.path.string();
  }
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return {
      {"tool", "fracsar"},
      {"command", command_},
      {"parameters", parameters_},
      {"inputs", inputs},
      {"outputs", outputs},
      {"results", results_},
      {"volatile", {{"timestamp", stamp}, {"paths", paths}}},
  };
}

std::filesystem::path RunManifest::write_next_to(const std::filesystem::path& primary_output) const {
  auto path = primary_output;
  path += ".manifest.json";
  write_file_atomic(path, to_json().dump(2) + "\n");
  return path;
}

}  // namespace fracsar
