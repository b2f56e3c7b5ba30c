#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace fracsar {

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Run record written next to a command's outputs. Everything outside
/// "volatile" is a pure function of the effective parameters and input bytes.
class RunManifest {
 public:
  explicit RunManifest(std::string command);

  void set_parameters(nlohmann::json parameters) { parameters_ = std::move(parameters); }
  void add_input(const std::string& role, const std::filesystem::path& path);
  void add_output(const std::string& role, const std::filesystem::path& path);
  void set_result(const std::string& key, nlohmann::json value) { results_[key] = std::move(value); }

  nlohmann::json to_json() const;
  /// Writes "<primary_output>.manifest.json".
  std::filesystem::path write_next_to(const std::filesystem::path& primary_output) const;

 private:
  struct Entry {
    std::string role;
    std::filesystem::path path;
    std::string sha256;
  };
  std::string command_;
  nlohmann::json parameters_ = nlohmann::json::object();
  nlohmann::json results_ = nlohmann::json::object();
  std::vector<Entry> inputs_;
  std::vector<Entry> outputs_;
};

}  // namespace fracsar
