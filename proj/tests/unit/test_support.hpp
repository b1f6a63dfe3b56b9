#pragma once

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "eclipse/embedding_store.hpp"

namespace eclipse::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("eclipse_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline EmbeddingMatrix matrix(std::vector<std::string> ids,
                              const std::vector<std::vector<float>>& rows) {
  const std::size_t d = rows.empty() ? 1 : rows.front().size();
  std::vector<float> data;
  for (const auto& r : rows) data.insert(data.end(), r.begin(), r.end());
  return EmbeddingMatrix(std::move(ids), d, std::move(data));
}

inline std::vector<std::string> numbered_ids(std::size_t n, const std::string& prefix = "d") {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%05zu", prefix.c_str(), i);
    ids.emplace_back(buf);
  }
  return ids;
}

inline EmbeddingMatrix random_matrix(std::mt19937_64& rng, std::size_t n,
                                     std::size_t d, bool coarse = false) {
  std::normal_distribution<float> normal(0.0f, 1.0f);
  std::uniform_int_distribution<int> small(-2, 2);
  std::vector<float> data(n * d);
  // Coarse integer values force many exact score ties.
  for (auto& v : data) v = coarse ? static_cast<float>(small(rng)) : normal(rng);
  return EmbeddingMatrix(numbered_ids(n), d, std::move(data));
}

inline Embedding random_embedding(std::mt19937_64& rng, std::size_t d, bool coarse = false) {
  std::normal_distribution<float> normal(0.0f, 1.0f);
  std::uniform_int_distribution<int> small(-2, 2);
  std::vector<float> v(d);
  for (auto& x : v) x = coarse ? static_cast<float>(small(rng)) : normal(rng);
  return Embedding(std::move(v));
}

}  // namespace eclipse::testing
