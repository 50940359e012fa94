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


#ifndef DELHATE_CHECKPOINT_H_
#define DELHATE_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "delhate/ensemble.h"
#include "delhate/topology.h"

namespace delhate {

// Member checkpoint layout (all integers little-endian):
//
//   magic     8 bytes  "DLHTCKPT"
//   version   u32      kCheckpointVersion
//   topology  u64      TopologyConfig::Hash()
//   groups    u32      number of parameter groups
//   per group:
//     name      u32 length + bytes
//     trainable u8
//     tensors   u32
//     per tensor:
//       name    u32 length + bytes
//       rank    u32, then rank x u64 dims
//       values  product(dims) x f64 (IEEE-754 bits)
//   checksum  u64      FNV-1a of every preceding byte
inline constexpr std::uint32_t kCheckpointVersion = 1;
inline constexpr std::uint32_t kBundleFormatVersion = 1;

struct MemberCheckpoint {
  ModelParams params;
  std::uint64_t topology_hash = 0;
};

std::string EncodeMember(const ModelParams& params,
                         std::uint64_t topology_hash);
// Throws IntegrityError on a bad magic, truncation or checksum mismatch and
// VersionError on an unknown version.
MemberCheckpoint DecodeMember(std::string_view bytes);

// Writes <dir>/member_<i>.ckpt for each member and <dir>/bundle.meta (JSON
// holding the topology, fingerprint, member count and provenance).
void SaveBundle(const EnsembleBundle& bundle, const std::filesystem::path& dir);
EnsembleBundle LoadBundle(const std::filesystem::path& dir);

std::filesystem::path MemberPath(const std::filesystem::path& dir,
                                 std::size_t index);

}  // namespace delhate

#endif  // DELHATE_CHECKPOINT_H_
