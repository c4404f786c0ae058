// Copyright 2026 The firstint Authors
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

#pragma once

// Line-delimited JSON records, dedup by canonical id, seeded splits,
// blending, and Normal/Hard test-set construction.

#include "firstint/backgen.hpp"
#include "firstint/reward.hpp"

#include "json.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace firstint {

using Json = nlohmann::ordered_json;

enum class SourceTag { BwdBase, BwdSyn, Fwd, External };
const char* to_string(SourceTag s);
/// Throws std::invalid_argument.
SourceTag source_tag_from_string(std::string_view s);

struct DatasetRecord {
  std::string id;
  std::array<std::string, 2> system;  // Polish rhs of x' and y'
  std::vector<std::string> integrals;
  Json meta = Json::object();
  SourceTag source_tag = SourceTag::BwdBase;

  bool operator==(const DatasetRecord&) const = default;
};

/// SHA-256 over the simplified system and the sorted simplified integrals.
std::string canonical_id(const OdeSystem& sys, const std::vector<Expr>& integrals);

DatasetRecord make_record(const IntegralPair& pair, SourceTag tag);
DatasetRecord make_record(const OdeSystem& sys, const std::vector<Expr>& integrals, SourceTag tag,
                          Json meta = Json::object());

OdeSystem system_of(const DatasetRecord& r);
std::vector<Expr> integrals_of(const DatasetRecord& r);

class MalformedRecord : public std::runtime_error {
 public:
  MalformedRecord(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }  // 1-based

 private:
  std::size_t line_;
};

Json to_json(const DatasetRecord& r);
/// Checks the key set and that every expression parses and prints back
/// unchanged. Throws MalformedRecord.
DatasetRecord record_from_json(const Json& j, std::size_t line = 0);

void write_records(std::ostream& out, const std::vector<DatasetRecord>& records);
std::vector<DatasetRecord> read_records(std::istream& in);
void write_records(const std::filesystem::path& path, const std::vector<DatasetRecord>& records);
std::vector<DatasetRecord> read_records(const std::filesystem::path& path);

/// `<file>.manifest.json` next to a record file.
std::filesystem::path manifest_path(const std::filesystem::path& records);
void write_manifest(const std::filesystem::path& records, const Json& manifest);

struct DedupResult {
  std::vector<DatasetRecord> records;
  std::size_t removed = 0;
  std::vector<std::string> notes;  // duplicates that crossed source tags
};

/// Keeps the first record per canonical id (recomputed from the content).
DedupResult dedup(const std::vector<DatasetRecord>& records);

struct SplitSpec {
  std::string name;
  double fraction = 0;
};

struct SplitManifest {
  std::uint64_t seed = 0;
  std::vector<SplitSpec> splits;
  std::vector<std::size_t> counts;
  std::size_t dedup_removed = 0;
  std::size_t excluded = 0;  // dropped because their id is reserved for a test set

  Json to_json() const;
};

struct SplitResult {
  SplitManifest manifest;
  std::vector<std::vector<DatasetRecord>> parts;
};

/// Dedups, drops records whose id is in `exclude`, shuffles by seed and cuts
/// by the largest-remainder rule (ties go to the earlier split). Fractions
/// must be non-negative and sum to 1.
SplitResult split(const std::vector<DatasetRecord>& records, const std::vector<SplitSpec>& splits, std::uint64_t seed,
                  const std::set<std::string>& exclude = {});

class InsufficientExtras : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Output has |base| records of which round(a |base|) are drawn from extra;
/// the rest is a uniform subsample of base. Order is a seeded shuffle.
std::vector<DatasetRecord> blend(const std::vector<DatasetRecord>& base, const std::vector<DatasetRecord>& extra,
                                 double a, std::uint64_t seed);

enum class TestsetKind { Normal, Hard };
const char* to_string(TestsetKind k);

/// has_t and has_nonlinear_op for every integral.
bool hard_predicate(const IntegralPair& pair);

class TestsetBudgetExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TestsetResult {
  std::vector<DatasetRecord> records;
  RejectionCounts rejections{};
  std::uint64_t predicate_rejections = 0;
};

/// Generates `count` records with the batch settings in `cfg` (count and
/// accept are overridden). Throws TestsetBudgetExhausted when a record slot
/// runs out of attempts.
TestsetResult make_testset(TestsetKind kind, std::size_t count, BatchConfig cfg);

/// Reward scoring of one {system, references, candidates} object; returns the
/// input with a "scores" array of {reward, branch, L, E_k} per candidate.
Json score_reward_record(const Json& in, const RewardConfig& cfg);

}  // namespace firstint
