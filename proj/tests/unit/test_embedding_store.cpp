#include <cmath>
#include <cstring>
#include <functional>
#include <fstream>
#include <limits>

#include <gtest/gtest.h>

#include "eclipse/embedding_store.hpp"
#include "eclipse/errors.hpp"
#include "test_support.hpp"

using namespace eclipse;
using eclipse::testing::TempDir;

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

ParseErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ParseError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no ParseError raised";
  return ParseErrorKind::kMalformedRecord;
}

}  // namespace

TEST(EmbeddingMatrix, RejectsDuplicateIdsAndNonFinite) {
  EXPECT_THROW(EmbeddingMatrix({"a", "a"}, 1, {1.0f, 2.0f}), InvalidArgument);
  EXPECT_THROW(EmbeddingMatrix({"a"}, 2, {1.0f, std::nanf("")}), InvalidArgument);
  EXPECT_THROW(EmbeddingMatrix({"a"}, 0, {}), InvalidArgument);
  EXPECT_THROW(EmbeddingMatrix({"a"}, 2, {1.0f}), InvalidArgument);
  EXPECT_THROW(Embedding({std::numeric_limits<float>::infinity()}), InvalidArgument);
}

TEST(EmbeddingMatrix, Lookup) {
  auto m = eclipse::testing::matrix({"x", "y"}, {{1, 2}, {3, 4}});
  EXPECT_EQ(m.index_of("y"), 1u);
  EXPECT_FALSE(m.find("z").has_value());
  EXPECT_THROW(m.index_of("z"), InvalidArgument);
  EXPECT_EQ(m.embedding(1), Embedding({3, 4}));
}

TEST(BinaryFormat, TwoByThreeRoundtrip) {
  TempDir dir("emb");
  auto m = eclipse::testing::matrix({"a", "b"}, {{1, 2, 3}, {4, 5, 6}});
  save_matrix(m, dir / "m.emb");
  auto back = load_matrix(dir / "m.emb");
  EXPECT_EQ(back.ids(), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(back, m);
  EXPECT_EQ(read_file(ids_sidecar(dir / "m.emb")), "a\nb\n");
}

TEST(BinaryFormat, SingleZeroIsHeaderPlusFourBytes) {
  TempDir dir("emb");
  auto m = eclipse::testing::matrix({"only"}, {{0.0f}});
  save_matrix(m, dir / "z.emb");
  const auto bytes = read_file(dir / "z.emb");
  ASSERT_EQ(bytes.size(), 12u + 4u);
  EXPECT_EQ(bytes.substr(0, 4), "EMB1");
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[8], 1);
  EXPECT_EQ(read_file(dir / "z.emb.ids"), "only\n");
}

TEST(BinaryFormat, EmptyMatrix) {
  TempDir dir("emb");
  EmbeddingMatrix empty({}, 8, {});
  save_matrix(empty, dir / "e.emb");
  EXPECT_EQ(read_file(dir / "e.emb").size(), 12u);
  auto back = load_matrix(dir / "e.emb");
  EXPECT_EQ(back.size(), 0u);
  EXPECT_EQ(back.dim(), 8u);
}

TEST(BinaryFormat, RandomRoundtripIsBitwise) {
  TempDir dir("emb");
  std::mt19937_64 rng(3);
  auto m = eclipse::testing::random_matrix(rng, 100, 64);
  save_matrix(m, dir / "r.emb");
  auto back = load_matrix(dir / "r.emb");
  ASSERT_EQ(back.data().size(), m.data().size());
  EXPECT_EQ(std::memcmp(back.data().data(), m.data().data(), m.data().size_bytes()), 0);
}

TEST(BinaryFormat, ExtremeFiniteValuesSurvive) {
  TempDir dir("emb");
  const float denorm = std::numeric_limits<float>::denorm_min();
  auto m = eclipse::testing::matrix(
      {"a"}, {{-0.0f, denorm, std::numeric_limits<float>::max(),
               std::numeric_limits<float>::lowest()}});
  save_matrix(m, dir / "x.emb");
  auto back = load_matrix(dir / "x.emb");
  EXPECT_EQ(std::memcmp(back.data().data(), m.data().data(), m.data().size_bytes()), 0);
  EXPECT_TRUE(std::signbit(back.row(0)[0]));
}

TEST(BinaryFormat, HeaderErrors) {
  TempDir dir("emb");
  write_file(dir / "bad.emb", "EMB2\1\0\0\0\1\0\0\0\0\0\0\0");
  EXPECT_EQ(kind_of([&] { load_matrix(dir / "bad.emb"); }),
            ParseErrorKind::kMalformedHeader);

  save_matrix(eclipse::testing::matrix({"a", "b"}, {{1}, {2}}), dir / "t.emb");
  auto bytes = read_file(dir / "t.emb");
  write_file(dir / "t.emb", bytes.substr(0, bytes.size() - 2));
  EXPECT_EQ(kind_of([&] { load_matrix(dir / "t.emb"); }),
            ParseErrorKind::kMalformedHeader);
}

TEST(BinaryFormat, SidecarErrors) {
  TempDir dir("emb");
  save_matrix(eclipse::testing::matrix({"a", "b"}, {{1}, {2}}), dir / "s.emb");
  write_file(dir / "s.emb.ids", "a\na\n");
  try {
    load_matrix(dir / "s.emb");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseErrorKind::kDuplicateId);
    EXPECT_EQ(e.line(), 2u);
  }
  write_file(dir / "s.emb.ids", "a\n");
  EXPECT_EQ(kind_of([&] { load_matrix(dir / "s.emb"); }),
            ParseErrorKind::kMalformedHeader);
  std::filesystem::remove(dir / "s.emb.ids");
  EXPECT_THROW(load_matrix(dir / "s.emb"), IoError);
}

TEST(BinaryFormat, NanPayloadRejected) {
  TempDir dir("emb");
  save_matrix(eclipse::testing::matrix({"a"}, {{1.0f, 2.0f}}), dir / "n.emb");
  auto bytes = read_file(dir / "n.emb");
  const float nan = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(bytes.data() + 16, &nan, 4);
  write_file(dir / "n.emb", bytes);
  EXPECT_EQ(kind_of([&] { load_matrix(dir / "n.emb"); }), ParseErrorKind::kNonFinite);
}

TEST(JsonlFormat, SingleRecord) {
  TempDir dir("emb");
  write_file(dir / "q.jsonl", "{\"id\":\"q1\",\"vector\":[0.5,-0.5]}\n");
  auto m = load_matrix(dir / "q.jsonl");
  EXPECT_EQ(m.size(), 1u);
  EXPECT_EQ(m.dim(), 2u);
  EXPECT_EQ(m.embedding(0), Embedding({0.5f, -0.5f}));
}

TEST(JsonlFormat, Errors) {
  TempDir dir("emb");
  write_file(dir / "a.jsonl",
             "{\"id\":\"a\",\"vector\":[1,2,3]}\n{\"id\":\"b\",\"vector\":[1,2,3,4]}\n");
  try {
    load_matrix(dir / "a.jsonl");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseErrorKind::kDimensionMismatch);
    EXPECT_EQ(e.line(), 2u);
  }
  write_file(dir / "b.jsonl", "{\"id\":\"a\",\"vector\":[1]}\n{\"id\":\"a\",\"vector\":[2]}\n");
  EXPECT_EQ(kind_of([&] { load_matrix(dir / "b.jsonl"); }), ParseErrorKind::kDuplicateId);
  write_file(dir / "c.jsonl", "{\"id\":\"a\",\"vector\":[1,\"x\"]}\n");
  EXPECT_EQ(kind_of([&] { load_matrix(dir / "c.jsonl"); }), ParseErrorKind::kBadNumber);
  write_file(dir / "d.jsonl", "not json\n");
  EXPECT_EQ(kind_of([&] { load_matrix(dir / "d.jsonl"); }),
            ParseErrorKind::kMalformedRecord);
  write_file(dir / "e.jsonl", "{\"vector\":[1]}\n");
  EXPECT_EQ(kind_of([&] { load_matrix(dir / "e.jsonl"); }),
            ParseErrorKind::kMalformedRecord);
}

TEST(JsonlFormat, Roundtrip) {
  TempDir dir("emb");
  std::mt19937_64 rng(5);
  auto m = eclipse::testing::random_matrix(rng, 7, 5);
  save_matrix(m, dir / "m.jsonl");
  EXPECT_EQ(load_matrix(dir / "m.jsonl"), m);
}

TEST(SaveMatrix, UnwritablePath) {
  auto m = eclipse::testing::matrix({"a"}, {{1}});
  EXPECT_THROW(save_matrix(m, "/nonexistent_dir/x/m.emb"), IoError);
}
