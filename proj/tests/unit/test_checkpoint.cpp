#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "fixtures.hpp"
#include "oracular/checkpoint.hpp"

using namespace oracular;
using namespace oracular::cvrnn;

namespace {

Checkpoint sample_checkpoint() {
  std::mt19937_64 rng(21);
  Architecture arch = Architecture::shrunken();
  arch.candidate_bias = CandidateBias::kCandidate;
  TrainingConfig cfg;
  cfg.epochs = 7;
  cfg.rng_seed = 99;
  cfg.z_dim = arch.z_dim;
  return {fixtures::random_params(arch, 1.0, rng), cfg};
}

CheckpointErrc error_of(const std::vector<std::uint8_t>& bytes) {
  try {
    deserialize_checkpoint(bytes);
  } catch (const CheckpointError& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected CheckpointError";
  return CheckpointErrc::kIo;
}

}  // namespace

TEST(Checkpoint, RoundTripIsExact) {
  const Checkpoint c = sample_checkpoint();
  const auto path = std::filesystem::temp_directory_path() / "oracular_ckpt_test.bin";
  save_checkpoint(path, c);
  const Checkpoint back = load_checkpoint(path);
  std::filesystem::remove(path);
  EXPECT_EQ(back.params.arch, c.params.arch);
  EXPECT_EQ(back.config, c.config);
  const auto a = c.params.named_tensors(), b = back.params.named_tensors();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(*a[i].second, *b[i].second) << a[i].first;
}

TEST(Checkpoint, StartsWithMagicAndVersion) {
  const auto bytes = serialize_checkpoint(sample_checkpoint());
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 7), "ORCVRNN");
  EXPECT_EQ(bytes[7], 0);
  EXPECT_EQ(bytes[8], kCheckpointVersion);
}

TEST(Checkpoint, ShapeMismatchIsTyped) {
  // Tensors of one architecture under the header of another.
  Checkpoint small = sample_checkpoint();
  Checkpoint wide = small;
  wide.params.arch.decoder_hidden = 9;
  auto bytes = serialize_checkpoint(small);
  const auto wide_bytes = serialize_checkpoint(Checkpoint{CvrnnParams::zeros(wide.params.arch), wide.config});
  // Splice: header from `wide`, tensors from `small`.
  auto header_end = [](const std::vector<std::uint8_t>& b) {
    std::uint64_t len = 0;
    for (int i = 7; i >= 0; --i) len = (len << 8) | b[12 + static_cast<std::size_t>(i)];
    return 20 + len;
  };
  std::vector<std::uint8_t> spliced(wide_bytes.begin(), wide_bytes.begin() + static_cast<long>(header_end(wide_bytes)));
  spliced.insert(spliced.end(), bytes.begin() + static_cast<long>(header_end(bytes)), bytes.end());
  EXPECT_EQ(error_of(spliced), CheckpointErrc::kShapeMismatch);
}

TEST(Checkpoint, CorruptInputsAreTyped) {
  auto bytes = serialize_checkpoint(sample_checkpoint());
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_EQ(error_of(bad_magic), CheckpointErrc::kBadMagic);
  auto bad_version = bytes;
  bad_version[8] = 77;
  EXPECT_EQ(error_of(bad_version), CheckpointErrc::kUnsupportedVersion);
  auto truncated = bytes;
  truncated.resize(bytes.size() - 3);
  EXPECT_EQ(error_of(truncated), CheckpointErrc::kTruncated);
  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_EQ(error_of(trailing), CheckpointErrc::kTruncated);
  EXPECT_THROW(load_checkpoint("/nonexistent/dir/x.ckpt"), CheckpointError);
}
