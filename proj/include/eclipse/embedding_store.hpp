#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace eclipse {

/// A single dense vector (query, LLM answer, centroid).
class Embedding {
 public:
  Embedding() = default;
  explicit Embedding(std::vector<float> values);

  /// All-zero vector of the given dimension.
  static Embedding zeros(std::size_t dim);

  std::size_t dim() const noexcept { return values_.size(); }
  std::span<const float> values() const noexcept { return values_; }
  float operator[](std::size_t i) const noexcept { return values_[i]; }

  friend bool operator==(const Embedding&, const Embedding&) = default;

 private:
  std::vector<float> values_;
};

/// Row-major n x d float32 matrix with one unique string id per row.
/// Immutable once built; every constructor validates the type invariants
/// (unique ids, finite values, dim >= 1).
class EmbeddingMatrix {
 public:
  EmbeddingMatrix(std::vector<std::string> ids, std::size_t dim,
                  std::vector<float> data);

  std::size_t size() const noexcept { return ids_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return ids_.empty(); }

  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const std::string& id(std::size_t row) const { return ids_.at(row); }
  std::span<const float> row(std::size_t i) const noexcept {
    return {data_.data() + i * dim_, dim_};
  }
  std::span<const float> data() const noexcept { return data_; }

  std::optional<std::size_t> find(std::string_view id) const;
  /// Row index of `id`; throws InvalidArgument when absent.
  std::size_t index_of(std::string_view id) const;
  Embedding embedding(std::size_t row) const;

  friend bool operator==(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
    return a.dim_ == b.dim_ && a.ids_ == b.ids_ && a.data_ == b.data_;
  }

 private:
  std::vector<std::string> ids_;
  std::size_t dim_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class MatrixFormat { kBinary, kJsonl };

/// Picks jsonl for a ".jsonl" extension, binary otherwise.
MatrixFormat format_from_path(const std::filesystem::path& path);

/// Binary layout: "EMB1", u32 n, u32 d (little endian), then n*d float32 LE
/// row-major; ids live in the sidecar `<path>.ids`, one per line.
EmbeddingMatrix load_matrix(const std::filesystem::path& path,
                            MatrixFormat format);
void save_matrix(const EmbeddingMatrix& matrix,
                 const std::filesystem::path& path, MatrixFormat format);

inline EmbeddingMatrix load_matrix(const std::filesystem::path& path) {
  return load_matrix(path, format_from_path(path));
}
inline void save_matrix(const EmbeddingMatrix& matrix,
                        const std::filesystem::path& path) {
  save_matrix(matrix, path, format_from_path(path));
}

std::filesystem::path ids_sidecar(const std::filesystem::path& path);

}  // namespace eclipse
