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

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "delhate/errors.h"
#include "delhate/rng.h"
#include "json.hpp"

namespace delhate {
namespace {

constexpr char kMagic[8] = {'D', 'L', 'H', 'T', 'C', 'K', 'P', 'T'};

class Writer {
 public:
  void Bytes(const void* p, std::size_t n) {
    out_.append(static_cast<const char*>(p), n);
  }
  template <typename T>
  void Int(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out_.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff));
    }
  }
  void F64(double v) { Int(std::bit_cast<std::uint64_t>(v)); }
  void Str(const std::string& s) {
    Int(static_cast<std::uint32_t>(s.size()));
    Bytes(s.data(), s.size());
  }
  std::string& buffer() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  void Need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw IntegrityError("checkpoint is truncated");
  }
  std::size_t remaining() const { return in_.size() - pos_; }
  template <typename T>
  T Int() {
    Need(sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[pos_ + i]))
           << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }
  double F64() { return std::bit_cast<double>(Int<std::uint64_t>()); }
  std::string Str() {
    const auto n = Int<std::uint32_t>();
    Need(n);
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  std::string_view Raw(std::size_t n) {
    Need(n);
    auto s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  std::string_view in_;
  std::size_t pos_ = 0;
};

std::uint64_t Checksum(std::string_view bytes) {
  return Fnv1a64(std::span<const unsigned char>(
      reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size()));
}

}  // namespace

std::string EncodeMember(const ModelParams& params,
                         std::uint64_t topology_hash) {
  Writer w;
  w.Bytes(kMagic, sizeof(kMagic));
  w.Int(kCheckpointVersion);
  w.Int(topology_hash);
  const auto groups = params.groups();
  w.Int(static_cast<std::uint32_t>(groups.size()));
  for (const ParamGroup* group : groups) {
    w.Str(group->name);
    w.Int(static_cast<std::uint8_t>(group->trainable ? 1 : 0));
    w.Int(static_cast<std::uint32_t>(group->params.size()));
    for (const Parameter& p : group->params) {
      w.Str(p.name);
      w.Int(static_cast<std::uint32_t>(p.value.rank()));
      for (std::size_t d : p.value.shape()) w.Int(static_cast<std::uint64_t>(d));
      for (double v : p.value.values()) w.F64(v);
    }
  }
  const std::uint64_t sum = Checksum(w.buffer());
  w.Int(sum);
  return std::move(w.buffer());
}

MemberCheckpoint DecodeMember(std::string_view bytes) {
  if (bytes.size() < sizeof(kMagic) + 4 + 8 ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw IntegrityError("not a delhate checkpoint (bad magic)");
  }
  Reader r(bytes);
  r.Raw(sizeof(kMagic));
  const auto version = r.Int<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw VersionError("checkpoint version " + std::to_string(version) +
                       " is not supported (expected " +
                       std::to_string(kCheckpointVersion) + ")");
  }
  if (bytes.size() < 8) throw IntegrityError("checkpoint is truncated");
  const std::string_view body = bytes.substr(0, bytes.size() - 8);
  Reader tail(bytes.substr(bytes.size() - 8));
  if (Checksum(body) != tail.Int<std::uint64_t>()) {
    throw IntegrityError("checkpoint checksum mismatch");
  }
  Reader br(body);
  br.Raw(sizeof(kMagic) + 4);
  MemberCheckpoint out;
  out.topology_hash = br.Int<std::uint64_t>();
  const auto n_groups = br.Int<std::uint32_t>();
  if (n_groups != 2) throw IntegrityError("checkpoint must hold 2 groups");
  for (std::uint32_t gi = 0; gi < n_groups; ++gi) {
    const std::string name = br.Str();
    ParamGroup* group = nullptr;
    if (name == kFeatureGroup) {
      group = &out.params.feature;
    } else if (name == kClassifierGroup) {
      group = &out.params.classifier;
    } else {
      throw IntegrityError("unknown parameter group '" + name + "'");
    }
    group->trainable = br.Int<std::uint8_t>() != 0;
    const auto n_tensors = br.Int<std::uint32_t>();
    for (std::uint32_t ti = 0; ti < n_tensors; ++ti) {
      std::string pname = br.Str();
      const auto rank = br.Int<std::uint32_t>();
      if (rank > 8) throw IntegrityError("implausible tensor rank");
      std::vector<std::size_t> shape(rank);
      std::size_t count = 1;
      for (auto& d : shape) {
        d = static_cast<std::size_t>(br.Int<std::uint64_t>());
        if (d != 0 && count > br.remaining() / d) {
          throw IntegrityError("checkpoint is truncated");
        }
        count *= d;
      }
      br.Need(count * 8);
      std::vector<double> values(count);
      for (double& v : values) v = br.F64();
      group->Add(std::move(pname), Tensor(std::move(shape), std::move(values)));
    }
  }
  if (br.remaining() != 0) throw IntegrityError("trailing bytes in checkpoint");
  return out;
}

std::filesystem::path MemberPath(const std::filesystem::path& dir,
                                 std::size_t index) {
  return dir / ("member_" + std::to_string(index) + ".ckpt");
}

namespace {

nlohmann::json TopologyToJson(const TopologyConfig& t) {
  return {
      {"variant", VariantName(t.variant)},
      {"rnn", RnnKindName(t.rnn)},
      {"seq_len", t.seq_len},
      {"emb_dim", t.emb_dim},
      {"conv_filters", t.conv_filters},
      {"conv_width", t.conv_width},
      {"conv_pad", t.conv_pad},
      {"pool_rate", t.pool_rate},
      {"rnn_hidden", t.rnn_hidden},
      {"fc_hidden", t.fc_hidden},
      {"dropout", t.dropout},
      {"n_classes", t.n_classes},
      {"conv_axis", ConvAxisName(t.conv_axis)},
  };
}

TopologyConfig TopologyFromJson(const nlohmann::json& j) {
  TopologyConfig t;
  t.variant = ParseVariant(j.at("variant").get<std::string>());
  t.rnn = ParseRnnKind(j.at("rnn").get<std::string>());
  t.seq_len = j.at("seq_len").get<std::size_t>();
  t.emb_dim = j.at("emb_dim").get<std::size_t>();
  t.conv_filters = j.at("conv_filters").get<std::size_t>();
  t.conv_width = j.at("conv_width").get<std::size_t>();
  t.conv_pad = j.at("conv_pad").get<std::size_t>();
  t.pool_rate = j.at("pool_rate").get<std::size_t>();
  t.rnn_hidden = j.at("rnn_hidden").get<std::size_t>();
  t.fc_hidden = j.at("fc_hidden").get<std::size_t>();
  t.dropout = j.at("dropout").get<double>();
  t.n_classes = j.at("n_classes").get<std::size_t>();
  t.conv_axis = ParseConvAxis(j.at("conv_axis").get<std::string>());
  return t;
}

void WriteFile(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void SaveBundle(const EnsembleBundle& bundle, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const std::uint64_t hash = bundle.topology.Hash();
  for (std::size_t i = 0; i < bundle.members.size(); ++i) {
    WriteFile(MemberPath(dir, i), EncodeMember(bundle.members[i], hash));
  }
  nlohmann::json meta = {
      {"format_version", kBundleFormatVersion},
      {"topology", TopologyToJson(bundle.topology)},
      {"topology_hash", hash},
      {"fingerprint",
       {{"embedding", bundle.fingerprint.embedding_name},
        {"emb_dim", bundle.fingerprint.emb_dim},
        {"seq_len", bundle.fingerprint.seq_len}}},
      {"members", bundle.members.size()},
      {"provenance", bundle.provenance},
  };
  WriteFile(dir / "bundle.meta", meta.dump(2) + "\n");
}

EnsembleBundle LoadBundle(const std::filesystem::path& dir) {
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(ReadFile(dir / "bundle.meta"));
  } catch (const nlohmann::json::exception& e) {
    throw IntegrityError("bundle.meta is not valid JSON: " +
                         std::string(e.what()));
  }
  EnsembleBundle bundle;
  try {
    const auto version = meta.at("format_version").get<std::uint32_t>();
    if (version != kBundleFormatVersion) {
      throw VersionError("bundle format version " + std::to_string(version) +
                         " is not supported (expected " +
                         std::to_string(kBundleFormatVersion) + ")");
    }
    bundle.topology = TopologyFromJson(meta.at("topology"));
    const auto& fp = meta.at("fingerprint");
    bundle.fingerprint.embedding_name = fp.at("embedding").get<std::string>();
    bundle.fingerprint.emb_dim = fp.at("emb_dim").get<std::size_t>();
    bundle.fingerprint.seq_len = fp.at("seq_len").get<std::size_t>();
    bundle.provenance =
        meta.at("provenance").get<std::map<std::string, std::string>>();
    const auto members = meta.at("members").get<std::size_t>();
    const std::uint64_t hash = bundle.topology.Hash();
    if (meta.at("topology_hash").get<std::uint64_t>() != hash) {
      throw IntegrityError("bundle.meta topology hash mismatch");
    }
    for (std::size_t i = 0; i < members; ++i) {
      MemberCheckpoint ckpt = DecodeMember(ReadFile(MemberPath(dir, i)));
      if (ckpt.topology_hash != hash) {
        throw IntegrityError(MemberPath(dir, i).string() +
                             " was saved for a different topology");
      }
      if (ckpt.params.ElementCount() != ExpectedParameterCount(bundle.topology)) {
        throw IntegrityError(MemberPath(dir, i).string() +
                             " has the wrong parameter count");
      }
      bundle.members.push_back(std::move(ckpt.params));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IntegrityError("bundle.meta is malformed: " + std::string(e.what()));
  }
  if (bundle.members.empty()) throw IntegrityError("bundle has no members");
  return bundle;
}

}  // namespace delhate
