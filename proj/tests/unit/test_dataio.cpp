#include <gtest/gtest.h>

#include <set>

#include "payloads.hpp"
#include "serlab/common/error.hpp"
#include "serlab/common/hash.hpp"
#include "serlab/dataio/binary_io.hpp"
#include "serlab/dataio/dataset.hpp"
#include "serlab/dataio/labels.hpp"
#include "serlab/dataio/synthetic.hpp"
#include "test_util.hpp"

using namespace serlab;
using namespace serlab::dataio;
using serlab::testing::TempDir;

namespace {

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

std::uint64_t format_offset(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const FormatError& e) {
    return e.offset();
  }
  ADD_FAILURE() << "no FormatError";
  return ~0ull;
}

}  // namespace

TEST(ByteIo, LittleEndian) {
  ByteWriter w;
  w.u16(0x0102);
  w.u32(0x03040506);
  w.u64(0x0708090a0b0c0d0eull);
  EXPECT_EQ(w.str(), std::string("\x02\x01\x06\x05\x04\x03\x0e\x0d\x0c\x0b\x0a\x09\x08\x07", 14));
  ByteReader r(w.str());
  EXPECT_EQ(r.u16("a"), 0x0102);
  EXPECT_EQ(r.u32("b"), 0x03040506u);
  EXPECT_EQ(r.offset(), 6u);
  EXPECT_EQ(format_offset([&] { r.u64("c"); r.u16("d"); }), 14u);
}

TEST(Embeddings, EmptyIsHeaderOnly) {
  EmbeddingFile f;
  f.dim = 4;
  std::string bytes = encode_embeddings(f);
  EXPECT_EQ(bytes.size(), 4u + 4 + 4 + 8);
  EmbeddingFile back = decode_embeddings(bytes);
  EXPECT_EQ(back.dim, 4u);
  EXPECT_TRUE(back.records.empty());
}

TEST(Embeddings, RoundTripRandom) {
  TempDir dir("femb");
  for (std::uint64_t s = 0; s < 200; ++s) {
    Rng rng(s);
    EmbeddingFile f = serlab::testing::random_embeddings(rng);
    std::string bytes = encode_embeddings(f);
    EmbeddingFile back = decode_embeddings(bytes);
    ASSERT_TRUE(serlab::testing::same_embeddings(f, back)) << "seed " << s;
    ASSERT_EQ(encode_embeddings(back), bytes);
    if (s % 20 == 0) {
      write_embeddings(dir / "x.femb", f);
      ASSERT_TRUE(serlab::testing::same_embeddings(read_embeddings(dir / "x.femb"), f));
    }
  }
}

TEST(Embeddings, RoundsToFloat32) {
  EmbeddingFile f;
  f.dim = 1;
  f.records.push_back({"a", numerics::Tensor::matrix(1, 1, {0.1})});
  EmbeddingFile back = decode_embeddings(encode_embeddings(f));
  EXPECT_EQ(back.records[0].frames[0], static_cast<double>(0.1f));
  EXPECT_EQ(round_to_f32(f.records[0].frames)[0], static_cast<double>(0.1f));
}

TEST(Embeddings, CorruptionOffsets) {
  EmbeddingFile f;
  f.dim = 2;
  f.records.push_back({"utt", numerics::Tensor::matrix(2, 2, {1, 2, 3, 4})});
  std::string good = encode_embeddings(f);
  std::string bad = good;
  bad[1] = 'X';
  EXPECT_EQ(format_offset([&] { decode_embeddings(bad); }), 0u);
  bad = good;
  bad[4] = 9;
  EXPECT_EQ(format_offset([&] { decode_embeddings(bad); }), 4u);
  EXPECT_EQ(format_offset([&] { decode_embeddings(good.substr(0, 10)); }), 8u);
  EXPECT_EQ(format_offset([&] { decode_embeddings(good.substr(0, good.size() - 1)); }), 20u + 2 + 3 + 4);
  EXPECT_EQ(format_offset([&] { decode_embeddings(good + "z"); }), good.size());
}

TEST(Checkpoint, RoundTripRandom) {
  TempDir dir("fckp");
  for (std::uint64_t s = 0; s < 200; ++s) {
    Rng rng(s);
    Checkpoint c = serlab::testing::random_checkpoint(rng);
    std::string bytes = encode_checkpoint(c);
    Checkpoint back = decode_checkpoint(bytes);
    ASSERT_TRUE(serlab::testing::same_checkpoint(c, back)) << "seed " << s;
    ASSERT_EQ(encode_checkpoint(back), bytes);
    if (s % 20 == 0) {
      write_checkpoint(dir / "c.fckp", c);
      ASSERT_TRUE(serlab::testing::same_checkpoint(read_checkpoint(dir / "c.fckp"), c));
      EXPECT_EQ(sha256_file(dir / "c.fckp"), sha256_hex(bytes));
    }
  }
}

TEST(Checkpoint, ErrorsAndRequire) {
  Checkpoint c;
  c.metadata = {{"stage", 1}};
  c.params.add("speech.frame.W", numerics::Tensor::zeros({2, 2}));
  std::string good = encode_checkpoint(c);
  EXPECT_EQ(format_offset([&] { decode_checkpoint("FCKQ" + good.substr(4)); }), 0u);
  EXPECT_GT(format_offset([&] { decode_checkpoint(good.substr(0, good.size() - 3)); }), 0u);
  std::vector<std::string> need{"speech.frame.W", "speech.frame.b"};
  EXPECT_NE(error_of([&] { c.require(need); }).find("speech.frame.b"), std::string::npos);
  EXPECT_EQ(c.stage(), 1);
  EXPECT_EQ(Checkpoint{}.stage(), 0);
  numerics::Tensor a = numerics::Tensor::vector({1, 2}), b = numerics::Tensor::matrix(1, 2, {1, 2});
  EXPECT_NE(tensor_sha256(a), tensor_sha256(b));
}

TEST(Labels, RowKinds) {
  auto rows = parse_labels("id,split,emotion,arousal,valence,dominance\nu1,train,A,,,\nu2,dev,,2.0,3.5,4.0\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].emotion, metrics::Emotion::kAnger);
  EXPECT_FALSE(rows[0].attributes.has_value());
  EXPECT_FALSE(rows[1].emotion.has_value());
  EXPECT_EQ(rows[1].split, Split::kDev);
  EXPECT_EQ(rows[1].attributes->valence, 3.5);
}

TEST(Labels, Rejections) {
  const std::string h = "id,split,emotion,arousal,valence,dominance\n";
  std::string range = error_of([&] { parse_labels(h + "u1,train,A,,,\nu2,dev,,2.0,7.5,4.0\n", "labels.csv"); });
  EXPECT_NE(range.find("labels.csv line 3"), std::string::npos) << range;
  EXPECT_NE(range.find("attribute out of range"), std::string::npos);
  EXPECT_NE(range.find("[1,7]"), std::string::npos);
  std::string code = error_of([&] { parse_labels(h + "u1,train,X,,,\n"); });
  EXPECT_NE(code.find("line 2"), std::string::npos);
  EXPECT_NE(code.find("unknown emotion code"), std::string::npos);
  EXPECT_NE(error_of([&] { parse_labels(h + "u1,train,A,,,\nu1,dev,C,,,\n"); }).find("line 3: duplicate id"),
            std::string::npos);
  EXPECT_NE(error_of([&] { parse_labels(h + "u1,train,,,,\n"); }).find("line 2"), std::string::npos);
  EXPECT_NE(error_of([&] { parse_labels(h + "u1,train,A,1,,\n"); }).find("line 2"), std::string::npos);
  EXPECT_NE(error_of([&] { parse_labels(h + "u1,valid,A,,,\n"); }).find("line 2"), std::string::npos);
  EXPECT_NE(error_of([&] { parse_labels("id,emotion\n"); }).find("line 1"), std::string::npos);
}

TEST(Labels, RoundTrip) {
  TempDir dir("labels");
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng rng(s);
    std::vector<LabelRow> rows;
    for (std::size_t i = 0; i < 20; ++i) {
      LabelRow r{"u" + std::to_string(i), static_cast<Split>(rng.below(3)), std::nullopt, std::nullopt};
      std::uint64_t kind = rng.below(3);
      if (kind != 1) r.emotion = metrics::emotion_from_index(rng.below(8));
      if (kind != 0) r.attributes = AttributeVector{rng.uniform(1, 7), rng.uniform(1, 7), rng.uniform(1, 7)};
      rows.push_back(r);
    }
    std::string text = format_labels(rows);
    auto back = parse_labels(text);
    ASSERT_EQ(format_labels(back), text);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      EXPECT_EQ(back[i].attributes, rows[i].attributes);
      EXPECT_EQ(back[i].emotion, rows[i].emotion);
    }
  }
}

TEST(Predictions, RoundTripAllowsOutOfRange) {
  PredictionSet set;
  set.items.push_back({"a", metrics::Emotion::kSadness, AttributeVector{0.5, 3.0, 8.25}});
  set.items.push_back({"b", std::nullopt, AttributeVector{1.0 / 3.0, 2, 7}});
  set.items.push_back({"c", metrics::Emotion::kFear, std::nullopt});
  TempDir dir("pred");
  write_predictions(dir / "p.csv", set);
  EXPECT_EQ(read_predictions(dir / "p.csv"), set);
  EXPECT_EQ(format_double(0.1), "0.1");
}

TEST(Synthetic, DeterministicAndValid) {
  SynthConfig cfg;
  cfg.seed = 11;
  cfg.counts = {30, 5, 12, 0, 9, 40, 3, 7};
  TempDir dir("synth");
  auto first = save_dataset(dir / "a", gen_synthetic(cfg));
  auto second = save_dataset(dir / "b", gen_synthetic(cfg));
  ASSERT_EQ(first.size(), second.size());
  for (std::size_t i = 0; i < first.size(); ++i) EXPECT_EQ(sha256_file(first[i]), sha256_file(second[i]));
  Dataset ds = load_dataset_dir(dir / "a");
  EXPECT_EQ(ds.records.size(), 106u);
  std::array<std::size_t, 8> seen{};
  for (const auto& r : ds.records) {
    ASSERT_TRUE(r.emotion && r.attributes);
    EXPECT_TRUE(r.attributes->in_range());
    ++seen[metrics::index_of(*r.emotion)];
    EXPECT_EQ(r.speech.cols(), cfg.speech_dim);
    EXPECT_GE(r.speech.rows(), cfg.min_frames);
    EXPECT_LE(r.text.rows(), cfg.max_frames);
  }
  EXPECT_EQ(seen, cfg.counts);
  cfg.seed = 12;
  EXPECT_NE(sha256_file(save_dataset(dir / "c", gen_synthetic(cfg))[0]), sha256_file(first[0]));
}

TEST(Synthetic, ConfigValidation) {
  SynthConfig cfg;
  cfg.counts = {10, 0, 0, 0, 0, 0, 0, 0};
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = SynthConfig{};
  cfg.noise = 0;
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = SynthConfig{};
  cfg.anchors[2].valence = 7.5;
  EXPECT_THROW(cfg.validate(), ValidationError);
}

TEST(Dataset, UnlabelledEmbeddingRejected) {
  TempDir dir("ds");
  write_labels(dir / "labels.csv", {{"u1", Split::kTrain, metrics::Emotion::kAnger, std::nullopt}});
  EmbeddingFile f;
  f.dim = 2;
  f.records.push_back({"u1", numerics::Tensor::matrix(1, 2, {1, 2})});
  f.records.push_back({"u2", numerics::Tensor::matrix(1, 2, {1, 2})});
  write_embeddings(dir / "speech.femb", f);
  EXPECT_NE(error_of([&] { load_dataset_dir(dir.path()); }).find("'u2' has no label row"), std::string::npos);
  EXPECT_THROW(load_dataset_dir(dir / "nowhere"), ValidationError);
}
