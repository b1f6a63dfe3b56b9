#include "eclipse/embedding_store.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "eclipse/errors.hpp"

namespace eclipse {

namespace fs = std::filesystem;

namespace {

constexpr std::array<char, 4> kMagic = {'E', 'M', 'B', '1'};
constexpr std::size_t kHeaderBytes = 12;

void require_finite(std::span<const float> values) {
  for (float v : values) {
    if (!std::isfinite(v)) {
      throw InvalidArgument("embedding contains a non-finite value");
    }
  }
}

std::uint32_t byteswap32(std::uint32_t v) {
  return ((v & 0x000000FFu) << 24) | ((v & 0x0000FF00u) << 8) |
         ((v & 0x00FF0000u) >> 8) | ((v & 0xFF000000u) >> 24);
}

std::uint32_t to_little(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) return byteswap32(v);
  return v;
}

void put_u32(std::ostream& out, std::uint32_t v) {
  v = to_little(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(const unsigned char* p) {
  std::uint32_t v;
  std::memcpy(&v, p, sizeof v);
  return to_little(v);
}

EmbeddingMatrix load_binary(const fs::path& path) {
  const std::string where = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + where);

  std::array<unsigned char, kHeaderBytes> header{};
  in.read(reinterpret_cast<char*>(header.data()), header.size());
  if (in.gcount() != static_cast<std::streamsize>(header.size()) ||
      std::memcmp(header.data(), kMagic.data(), kMagic.size()) != 0) {
    throw ParseError(ParseErrorKind::kMalformedHeader, where, 0,
                     "expected EMB1 magic and 12-byte header");
  }
  const std::uint32_t n = read_u32(header.data() + 4);
  const std::uint32_t d = read_u32(header.data() + 8);
  if (d == 0) {
    throw ParseError(ParseErrorKind::kMalformedHeader, where, 0,
                     "dimension must be positive");
  }

  const std::uint64_t count = static_cast<std::uint64_t>(n) * d;
  in.seekg(0, std::ios::end);
  const auto file_size = static_cast<std::uint64_t>(in.tellg());
  if (file_size != kHeaderBytes + count * sizeof(float)) {
    throw ParseError(ParseErrorKind::kMalformedHeader, where, 0,
                     "payload size does not match n=" + std::to_string(n) +
                         ", d=" + std::to_string(d));
  }
  in.seekg(kHeaderBytes);
  std::vector<float> data(count);
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(count * sizeof(float)));
  if constexpr (std::endian::native == std::endian::big) {
    for (float& v : data) {
      auto bits = std::bit_cast<std::uint32_t>(v);
      v = std::bit_cast<float>(byteswap32(bits));
    }
  }
  for (std::uint64_t i = 0; i < count; ++i) {
    if (!std::isfinite(data[i])) {
      throw ParseError(ParseErrorKind::kNonFinite, where, 0,
                       "row " + std::to_string(i / d) + ", column " +
                           std::to_string(i % d));
    }
  }

  const fs::path sidecar = ids_sidecar(path);
  std::ifstream ids_in(sidecar);
  if (!ids_in) throw IoError("cannot open ids sidecar " + sidecar.string());
  std::vector<std::string> ids;
  ids.reserve(n);
  std::string line;
  while (std::getline(ids_in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ids.push_back(line);
  }
  if (ids.size() != n) {
    throw ParseError(ParseErrorKind::kMalformedHeader, sidecar.string(), 0,
                     "sidecar has " + std::to_string(ids.size()) +
                         " ids, header says " + std::to_string(n));
  }
  // Duplicate detection with the line number of the second occurrence.
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!seen.emplace(ids[i], i).second) {
      throw ParseError(ParseErrorKind::kDuplicateId, sidecar.string(), i + 1,
                       ids[i]);
    }
  }
  return EmbeddingMatrix(std::move(ids), d, std::move(data));
}

EmbeddingMatrix load_jsonl(const fs::path& path) {
  const std::string where = path.string();
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + where);

  std::vector<std::string> ids;
  std::vector<float> data;
  std::unordered_map<std::string, std::size_t> seen;
  std::size_t dim = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(ParseErrorKind::kMalformedRecord, where, lineno,
                       e.what());
    }
    if (!rec.is_object() || !rec.contains("id") || !rec["id"].is_string() ||
        !rec.contains("vector") || !rec["vector"].is_array()) {
      throw ParseError(ParseErrorKind::kMalformedRecord, where, lineno,
                       "expected {\"id\": string, \"vector\": [numbers]}");
    }
    const auto& vec = rec["vector"];
    if (vec.empty()) {
      throw ParseError(ParseErrorKind::kMalformedRecord, where, lineno,
                       "empty vector");
    }
    if (dim == 0) {
      dim = vec.size();
    } else if (vec.size() != dim) {
      throw ParseError(ParseErrorKind::kDimensionMismatch, where, lineno,
                       "expected " + std::to_string(dim) + " values, got " +
                           std::to_string(vec.size()));
    }
    for (const auto& x : vec) {
      if (!x.is_number()) {
        throw ParseError(ParseErrorKind::kBadNumber, where, lineno,
                         "non-numeric vector entry");
      }
      const auto v = static_cast<float>(x.get<double>());
      if (!std::isfinite(v)) {
        throw ParseError(ParseErrorKind::kNonFinite, where, lineno, "");
      }
      data.push_back(v);
    }
    auto id = rec["id"].get<std::string>();
    if (!seen.emplace(id, ids.size()).second) {
      throw ParseError(ParseErrorKind::kDuplicateId, where, lineno, id);
    }
    ids.push_back(std::move(id));
  }
  if (dim == 0) {
    throw ParseError(ParseErrorKind::kMalformedRecord, where, 0,
                     "jsonl file has no records; dimension is undefined");
  }
  return EmbeddingMatrix(std::move(ids), dim, std::move(data));
}

void save_binary(const EmbeddingMatrix& m, const fs::path& path) {
  if (m.size() > UINT32_MAX || m.dim() > UINT32_MAX) {
    throw InvalidArgument("matrix too large for EMB1 header");
  }
  for (const auto& id : m.ids()) {
    if (id.find_first_of("\r\n") != std::string::npos) {
      throw InvalidArgument("id contains a newline: cannot write sidecar");
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, static_cast<std::uint32_t>(m.size()));
  put_u32(out, static_cast<std::uint32_t>(m.dim()));
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(m.data().data()),
              static_cast<std::streamsize>(m.data().size() * sizeof(float)));
  } else {
    for (float v : m.data()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  }
  if (!out) throw IoError("write failed for " + path.string());

  std::ofstream ids_out(ids_sidecar(path), std::ios::trunc);
  if (!ids_out) throw IoError("cannot write " + ids_sidecar(path).string());
  for (const auto& id : m.ids()) ids_out << id << '\n';
  if (!ids_out) throw IoError("write failed for " + ids_sidecar(path).string());
}

void save_jsonl(const EmbeddingMatrix& m, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (std::size_t i = 0; i < m.size(); ++i) {
    nlohmann::json rec;
    rec["id"] = m.id(i);
    auto row = m.row(i);
    rec["vector"] = std::vector<double>(row.begin(), row.end());
    out << rec.dump() << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

Embedding::Embedding(std::vector<float> values) : values_(std::move(values)) {
  require_finite(values_);
}

Embedding Embedding::zeros(std::size_t dim) {
  return Embedding(std::vector<float>(dim, 0.0f));
}

EmbeddingMatrix::EmbeddingMatrix(std::vector<std::string> ids, std::size_t dim,
                                 std::vector<float> data)
    : ids_(std::move(ids)), dim_(dim), data_(std::move(data)) {
  if (dim_ == 0) throw InvalidArgument("embedding dimension must be >= 1");
  if (data_.size() != ids_.size() * dim_) {
    throw InvalidArgument("matrix data size " + std::to_string(data_.size()) +
                          " != rows * dim " +
                          std::to_string(ids_.size() * dim_));
  }
  require_finite(data_);
  index_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!index_.emplace(ids_[i], i).second) {
      throw InvalidArgument("duplicate id: " + ids_[i]);
    }
  }
}

std::optional<std::size_t> EmbeddingMatrix::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t EmbeddingMatrix::index_of(std::string_view id) const {
  auto row = find(id);
  if (!row) throw InvalidArgument("unknown id: " + std::string(id));
  return *row;
}

Embedding EmbeddingMatrix::embedding(std::size_t row) const {
  auto r = this->row(row);
  return Embedding(std::vector<float>(r.begin(), r.end()));
}

MatrixFormat format_from_path(const fs::path& path) {
  return path.extension() == ".jsonl" ? MatrixFormat::kJsonl
                                      : MatrixFormat::kBinary;
}

fs::path ids_sidecar(const fs::path& path) {
  fs::path sidecar = path;
  sidecar += ".ids";
  return sidecar;
}

EmbeddingMatrix load_matrix(const fs::path& path, MatrixFormat format) {
  if (!fs::exists(path)) throw IoError("no such file: " + path.string());
  return format == MatrixFormat::kBinary ? load_binary(path)
                                         : load_jsonl(path);
}

void save_matrix(const EmbeddingMatrix& matrix, const fs::path& path,
                 MatrixFormat format) {
  if (format == MatrixFormat::kBinary) {
    save_binary(matrix, path);
  } else {
    save_jsonl(matrix, path);
  }
}

}  // namespace eclipse
