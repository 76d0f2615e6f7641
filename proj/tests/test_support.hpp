#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fusionhar/core.hpp"

namespace testsupport {

inline std::mt19937_64 rng_for(std::uint64_t seed) { return std::mt19937_64(seed); }

inline std::size_t uniform_int(std::mt19937_64& g, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(g);
}

inline double uniform_real(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline std::vector<fusionhar::ClassIndex> random_labels(std::mt19937_64& g, std::size_t n, std::size_t k) {
  std::vector<fusionhar::ClassIndex> out(n);
  for (auto& v : out) v = uniform_int(g, 0, k - 1);
  return out;
}

// Fresh per-test scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("fusionhar_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
}

template <class F>
fusionhar::ErrorKind error_kind_of(F&& f) {
  try {
    f();
  } catch (const fusionhar::Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected a fusionhar::Error";
  return fusionhar::ErrorKind::Io;
}

}  // namespace testsupport
