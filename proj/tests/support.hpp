#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "fracsar/grid.hpp"

namespace fracsar::test_support {

inline FieldGrid random_field(int width, int height, std::uint64_t seed, double spacing = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  std::vector<double> v(static_cast<std::size_t>(width) * height);
  for (auto& x : v) x = n01(rng);
  return FieldGrid({width, height, spacing}, std::move(v));
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("fracsar_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace fracsar::test_support
