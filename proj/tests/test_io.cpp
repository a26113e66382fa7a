#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "frolic/io.hpp"
#include "test_util.hpp"

using namespace frolic;
using frolic::testing::code_of;
using frolic::testing::float_exact;
using frolic::testing::TempDir;

namespace {

std::string header(std::uint32_t rows, std::uint32_t cols) {
  std::string s = "FMAT1\n";
  for (std::uint32_t v : {rows, cols})
    for (int b = 0; b < 4; ++b) s.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
  return s;
}

void append_f32(std::string& s, float f) {
  const auto u = std::bit_cast<std::uint32_t>(f);
  for (int b = 0; b < 4; ++b) s.push_back(static_cast<char>((u >> (8 * b)) & 0xFF));
}

}  // namespace

TEST(FeatureMatrix, LayoutIsLittleEndianRowMajor) {
  Matrix m(2, 3);
  m << 1, 0, 0, 0, 1, 0;
  std::string expected = header(2, 3);
  for (float v : {1.f, 0.f, 0.f, 0.f, 1.f, 0.f}) append_f32(expected, v);
  EXPECT_EQ(io::encode_feature_matrix(m), expected);
  EXPECT_EQ(expected.substr(6, 8), std::string("\x02\0\0\0\x03\0\0\0", 8));
}

TEST(FeatureMatrix, LoadTwoByThree) {
  TempDir dir;
  Matrix m(2, 3);
  m << 1, 0, 0, 0, 1, 0;
  io::save_feature_matrix(m, dir / "m.fmat");
  const auto e = io::load_embeddings(dir / "m.fmat");
  EXPECT_EQ(e.rows(), 2);
  EXPECT_EQ(e.dim(), 3);
  EXPECT_EQ(e.data, m);
}

TEST(FeatureMatrix, ZeroColumnsRejected) {
  EXPECT_EQ(code_of([] { io::decode_feature_matrix(header(2, 0)); }), ErrorCode::kInvalidHeader);
  EXPECT_EQ(code_of([] { io::decode_feature_matrix(header(0, 2)); }), ErrorCode::kInvalidHeader);
}

TEST(FeatureMatrix, BadMagic) {
  std::string bytes = header(1, 1);
  append_f32(bytes, 1.f);
  bytes[4] = '2';
  EXPECT_EQ(code_of([&] { io::decode_feature_matrix(bytes); }), ErrorCode::kMagicMismatch);
  EXPECT_EQ(code_of([] { io::decode_feature_matrix("FMA"); }), ErrorCode::kMagicMismatch);
}

TEST(FeatureMatrix, TruncatedAndOverlongPayload) {
  std::string bytes = header(2, 2);
  for (int i = 0; i < 3; ++i) append_f32(bytes, 1.f);
  EXPECT_EQ(code_of([&] { io::decode_feature_matrix(bytes); }), ErrorCode::kTruncatedFile);
  append_f32(bytes, 1.f);
  append_f32(bytes, 1.f);
  EXPECT_EQ(code_of([&] { io::decode_feature_matrix(bytes); }), ErrorCode::kTruncatedFile);
  EXPECT_EQ(code_of([] { io::decode_feature_matrix(std::string("FMAT1\n\x01\0", 8)); }),
            ErrorCode::kTruncatedFile);
}

TEST(FeatureMatrix, NonFiniteEntryNamesPosition) {
  std::string bytes = header(2, 3);
  for (float v : {1.f, 2.f, 3.f, 4.f, std::numeric_limits<float>::quiet_NaN(), 6.f}) append_f32(bytes, v);
  try {
    io::decode_feature_matrix(bytes);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFiniteEntry);
    EXPECT_NE(std::string(e.what()).find("row 1, col 1"), std::string::npos) << e.what();
  }
  std::string inf = header(1, 1);
  append_f32(inf, std::numeric_limits<float>::infinity());
  EXPECT_EQ(code_of([&] { io::decode_feature_matrix(inf); }), ErrorCode::kNonFiniteEntry);
}

TEST(FeatureMatrix, SingletonAndIdentityRoundTrip) {
  TempDir dir;
  Matrix one(1, 1);
  one << 0.5;
  io::save_feature_matrix(one, dir / "a.fmat");
  EXPECT_EQ(io::load_feature_matrix(dir / "a.fmat"), one);
  const Matrix eye = Matrix::Identity(3, 3);
  io::save_feature_matrix(eye, dir / "b.fmat");
  EXPECT_EQ(io::load_feature_matrix(dir / "b.fmat"), eye);
}

TEST(FeatureMatrix, RandomRoundTripIsBitExact) {
  TempDir dir;
  for (auto [rows, cols, seed] : {std::tuple{100, 16, 0}, std::tuple{1000, 64, 1}}) {
    const Matrix m = float_exact(rows, cols, seed);
    io::save_feature_matrix(m, dir / "m.fmat");
    const Matrix back = io::load_feature_matrix(dir / "m.fmat");
    ASSERT_EQ(back.rows(), rows);
    for (Index i = 0; i < m.size(); ++i) {
      ASSERT_EQ(std::bit_cast<std::uint64_t>(back.data()[i]), std::bit_cast<std::uint64_t>(m.data()[i]));
    }
    EXPECT_EQ(io::encode_feature_matrix(back), io::detail::read_file(dir / "m.fmat"));
  }
}

TEST(FeatureMatrix, EmptySaveRejectedAndMissingFile) {
  TempDir dir;
  EXPECT_EQ(code_of([&] { io::save_feature_matrix(Matrix(0, 3), dir / "x.fmat"); }), ErrorCode::kEmptyInput);
  EXPECT_EQ(code_of([&] { io::load_feature_matrix(dir / "missing.fmat"); }), ErrorCode::kIoFailure);
  EXPECT_EQ(code_of([&] { io::save_feature_matrix(Matrix::Ones(1, 1), dir / "no" / "such" / "x.fmat"); }),
            ErrorCode::kIoFailure);
}

TEST(Normalize, ThreeFourFive) {
  Matrix m(1, 2);
  m << 3, 4;
  const Matrix n = io::l2_normalize_rows(m);
  EXPECT_DOUBLE_EQ(n(0, 0), 0.6);
  EXPECT_DOUBLE_EQ(n(0, 1), 0.8);
}

TEST(Normalize, AxisVectors) {
  Matrix m(2, 2);
  m << 1, 0, 0, 2;
  EXPECT_EQ(io::l2_normalize_rows(m), Matrix::Identity(2, 2));
}

TEST(Normalize, ZeroRowReportsIndex) {
  Matrix m(3, 2);
  m << 1, 1, 0, 0, 2, 2;
  try {
    io::l2_normalize_rows(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroRow);
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos);
  }
}

TEST(Normalize, IdempotentAndDirectionPreserving) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix m = synth::gaussian_matrix(50, 7, seed) * (1.0 + seed);
    const Matrix once = io::l2_normalize_rows(m);
    const Matrix twice = io::l2_normalize_rows(once);
    EXPECT_LE((once - twice).cwiseAbs().maxCoeff(), 1e-7);
    for (Index i = 0; i < m.rows(); ++i) {
      EXPECT_NEAR(once.row(i).norm(), 1.0, 1e-12);
      EXPECT_NEAR(once.row(i).dot(m.row(i)), m.row(i).norm(), 1e-9 * m.row(i).norm());
    }
  }
}

TEST(Normalize, SetsFlagOnSets) {
  const EmbeddingSet e{synth::gaussian_matrix(4, 3, 9), false};
  EXPECT_TRUE(io::normalized(e).normalized);
  const PrototypeSet p{synth::gaussian_matrix(2, 3, 9), {"a", "b"}, false};
  const auto pn = io::normalized(p);
  EXPECT_TRUE(pn.normalized);
  EXPECT_EQ(pn.class_names, p.class_names);
}

TEST(Labels, RoundTripAndHeader) {
  TempDir dir;
  const LabelSet labels{{2, 0, 1, 1}};
  io::save_labels(labels, dir / "l.csv");
  EXPECT_EQ(io::detail::read_file(dir / "l.csv"), "index,label\n0,2\n1,0\n2,1\n3,1\n");
  EXPECT_EQ(io::load_labels(dir / "l.csv").labels, labels.labels);
}

TEST(Labels, AcceptsShuffledRowsAndCrlf) {
  EXPECT_EQ(io::decode_index_csv("index,label\r\n1,5\r\n0,3\r\n", "label"), (std::vector<Index>{3, 5}));
}

TEST(Labels, Malformed) {
  EXPECT_EQ(code_of([] { io::decode_index_csv("idx,label\n0,1\n", "label"); }), ErrorCode::kInvalidHeader);
  EXPECT_EQ(code_of([] { io::decode_index_csv("index,label\n0,-1\n", "label"); }), ErrorCode::kInvalidLabel);
  EXPECT_EQ(code_of([] { io::decode_index_csv("index,label\n0,x\n", "label"); }), ErrorCode::kInvalidLabel);
  EXPECT_EQ(code_of([] { io::decode_index_csv("index,label\n0,1\n0,1\n", "label"); }), ErrorCode::kInvalidLabel);
  EXPECT_EQ(code_of([] { io::decode_index_csv("index,label\n5,1\n", "label"); }), ErrorCode::kInvalidLabel);
  EXPECT_EQ(code_of([] { io::validate_labels(LabelSet{{0, 3}}, 3); }), ErrorCode::kInvalidLabel);
  EXPECT_NO_THROW(io::validate_labels(LabelSet{{0, 2}}, 3));
}

TEST(ClassNames, LoadSaveAndValidate) {
  TempDir dir;
  io::save_class_names({"cat", "dog", "sea lion"}, dir / "c.txt");
  EXPECT_EQ(io::load_class_names(dir / "c.txt"), (std::vector<std::string>{"cat", "dog", "sea lion"}));
  io::detail::write_file(dir / "dup.txt", "cat\ndog\ncat\n");
  EXPECT_EQ(code_of([&] { io::load_class_names(dir / "dup.txt"); }), ErrorCode::kInvalidArgument);
  io::detail::write_file(dir / "empty.txt", "cat\n\ndog\n");
  EXPECT_EQ(code_of([&] { io::load_class_names(dir / "empty.txt"); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(io::default_class_names(2), (std::vector<std::string>{"class_0", "class_1"}));
}

TEST(TextOutputs, VectorCsvRoundTripsExactly) {
  Vector v(3);
  v << 0.1, 1.0 / 3.0, 2e-300;
  const auto text = io::encode_vector_csv(v, "class", "beta");
  EXPECT_EQ(text.substr(0, 11), "class,beta\n");
  EXPECT_EQ(io::decode_vector_csv(text, "class", "beta"), v);
  EXPECT_EQ(code_of([] { io::decode_vector_csv("class,beta\n1,0.5\n", "class", "beta"); }),
            ErrorCode::kInvalidArgument);
}

TEST(TextOutputs, PredictionsTrajectoryKeyValues) {
  EXPECT_EQ(io::encode_predictions({1, 0}), "index,prediction\n0,1\n1,0\n");
  EXPECT_EQ(io::encode_trajectory({0.5, 0.25}), "iteration,l1_delta\n1,0.5\n2,0.25\n");
  const auto kv = io::parse_key_values("# comment\n a = 1 \nb=two # tail\n\na = 3\n");
  EXPECT_EQ(kv.at("a"), "3");
  EXPECT_EQ(kv.at("b"), "two");
  EXPECT_EQ(io::encode_key_values({{"x", "1"}, {"y", "z"}}), "x = 1\ny = z\n");
  EXPECT_EQ(code_of([] { io::parse_key_values("novalue\n"); }), ErrorCode::kInvalidArgument);
}

TEST(TextOutputs, FormatDoubleIsShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 1e-8, 123456789.0, -2.5}) {
    EXPECT_EQ(std::stod(io::format_double(v)), v);
  }
  EXPECT_EQ(io::format_double(0.01), "0.01");
}
