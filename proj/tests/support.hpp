#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "herald/text.hpp"

namespace herald::testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(HERALD_FIXTURES_DIR) / name;
}

inline std::filesystem::path data_file(const std::string& name) {
  return std::filesystem::path(HERALD_DATA_DIR) / name;
}

inline std::string read_fixture(const std::string& name) { return read_file(fixture(name)); }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("herald-test-" + std::to_string(rd()) + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

 private:
  std::filesystem::path path_;
};

}  // namespace herald::testing
