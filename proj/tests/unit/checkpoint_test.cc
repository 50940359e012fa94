// Copyright 2026 The delhate Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "delhate/checkpoint.h"

#include <cstring>

#include <gtest/gtest.h>

#include "delhate/errors.h"
#include "unit/test_support.h"

namespace delhate {
namespace {

EnsembleBundle SmallBundle() {
  EnsembleBundle b;
  b.topology = TopologyConfig::Tiny();
  b.topology.rnn = RnnKind::kLstm;
  b.fingerprint = {"synthetic:1:6", 6, 8};
  b.members = {BuildModel(b.topology, 1), BuildModel(b.topology, 2)};
  b.members[1].feature.trainable = false;
  b.provenance = {{"seed", "1"}, {"loss_mode", "supervised"}};
  return b;
}

TEST(CheckpointTest, MemberRoundTripIsBitExact) {
  const ModelParams m = BuildModel(TopologyConfig::Tiny(), 3);
  const std::string bytes = EncodeMember(m, 42);
  EXPECT_EQ(bytes.substr(0, 8), "DLHTCKPT");
  const MemberCheckpoint back = DecodeMember(bytes);
  EXPECT_EQ(back.topology_hash, 42u);
  EXPECT_EQ(back.params, m);
  EXPECT_EQ(EncodeMember(back.params, 42), bytes);
}

TEST(CheckpointTest, EveryFlippedByteIsDetected) {
  const ModelParams m = BuildModel(TopologyConfig::Tiny(), 3);
  const std::string bytes = EncodeMember(m, 42);
  for (std::size_t i = 0; i < bytes.size(); i += 7) {
    std::string bad = bytes;
    bad[i] = char(bad[i] ^ 0x5a);
    EXPECT_THROW(DecodeMember(bad), Error) << "byte " << i;
  }
  EXPECT_THROW(DecodeMember(bytes.substr(0, bytes.size() - 1)), IntegrityError);
  EXPECT_THROW(DecodeMember(bytes + "x"), IntegrityError);
  EXPECT_THROW(DecodeMember(""), IntegrityError);
}

TEST(CheckpointTest, UnknownVersion) {
  std::string bytes = EncodeMember(BuildModel(TopologyConfig::Tiny(), 3), 1);
  const std::uint32_t version = kCheckpointVersion + 1;
  std::memcpy(bytes.data() + 8, &version, 4);  // little-endian host assumed
  EXPECT_THROW(DecodeMember(bytes), VersionError);
}

TEST(CheckpointTest, BundleRoundTrip) {
  const auto dir = testing::ScratchDir("bundle");
  const EnsembleBundle b = SmallBundle();
  SaveBundle(b, dir);
  EXPECT_TRUE(std::filesystem::exists(dir / "bundle.meta"));
  EXPECT_TRUE(std::filesystem::exists(MemberPath(dir, 1)));
  EXPECT_EQ(LoadBundle(dir), b);
}

TEST(CheckpointTest, BundleTopologyMismatch) {
  const auto dir = testing::ScratchDir("bundle");
  EnsembleBundle b = SmallBundle();
  SaveBundle(b, dir);
  // Swap in a member saved under a different topology.
  TopologyConfig other = TopologyConfig::Tiny();
  const std::string foreign =
      EncodeMember(BuildModel(other, 1), other.Hash());
  testing::WriteFile(MemberPath(dir, 0), foreign);
  EXPECT_THROW(LoadBundle(dir), IntegrityError);
}

TEST(CheckpointTest, BundleMetaErrors) {
  const auto dir = testing::ScratchDir("bundle");
  SaveBundle(SmallBundle(), dir);
  std::string meta = testing::ReadFile(dir / "bundle.meta");
  testing::WriteFile(dir / "bundle.meta", meta.substr(0, meta.size() / 2));
  EXPECT_THROW(LoadBundle(dir), IntegrityError);

  const auto pos = meta.find("\"format_version\": 1");
  ASSERT_NE(pos, std::string::npos) << meta;
  meta.replace(pos, 19, "\"format_version\": 9");
  testing::WriteFile(dir / "bundle.meta", meta);
  EXPECT_THROW(LoadBundle(dir), VersionError);

  std::filesystem::remove_all(dir);
  EXPECT_THROW(LoadBundle(dir), IoError);
}

}  // namespace
}  // namespace delhate
