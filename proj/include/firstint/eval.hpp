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

// Predict-and-verify evaluation of candidate integrals, and a brute-force
// enumeration baseline that proposes candidates without a model.

#include "firstint/calculus.hpp"
#include "firstint/dataset.hpp"
#include "firstint/notation.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace firstint {

enum class CandidateVerdict { Verified, NotIntegral, Invalid, Timeout };
const char* to_string(CandidateVerdict v);

struct CandidateSet {
  std::string system_id;
  std::vector<TokenSeq> candidates;  // beam order
};

/// Per-candidate limit: wall-clock seconds in production, a step budget for
/// reproducible runs.
struct TimeoutPolicy {
  enum class Mode { WallClock, Steps };
  Mode mode = Mode::Steps;
  double seconds = 300;
  std::uint64_t steps = 2'000'000;

  static TimeoutPolicy wall_clock(double s) { return {Mode::WallClock, s, 0}; }
  static TimeoutPolicy step_budget(std::uint64_t n) { return {Mode::Steps, 0, n}; }
};

struct EvalConfig {
  TimeoutPolicy timeout;
  ZeroTestConfig zero_test;
  unsigned workers = 1;
};

/// One verdict per candidate, in order. Throws std::invalid_argument for an
/// empty beam.
std::vector<CandidateVerdict> verify_candidates(const OdeSystem& sys, const CandidateSet& cands,
                                                const EvalConfig& cfg = {});

struct SystemResult {
  std::string system_id;
  bool correct = false;  // at least one verified candidate
  bool missing = false;  // no candidate set for this system
  std::vector<CandidateVerdict> verdicts;
};

struct EvalReport {
  std::vector<SystemResult> systems;  // dataset order
  std::size_t total_systems = 0;
  std::size_t verified_systems = 0;
  double accuracy = 0;
  std::size_t missing_systems = 0;
  std::size_t candidates = 0;
  std::size_t verified = 0, not_integral = 0, invalid = 0, timeouts = 0;
  double mean_tokens_per_candidate = 0;
  double mean_tokens_per_sample = 0;     // whole beam, per system with candidates
  std::vector<std::string> unknown_ids;  // candidate sets with no dataset record
  std::vector<std::string> duplicate_ids;

  Json to_json() const;
  std::string table() const;
};

EvalReport evaluate(const std::vector<DatasetRecord>& dataset, const std::vector<CandidateSet>& candidates,
                    const EvalConfig& cfg = {});

/// Candidates file: one {system_id, candidates: [Polish strings]} per line.
std::vector<CandidateSet> read_candidates(std::istream& in);
std::vector<CandidateSet> read_candidates(const std::filesystem::path& path);
void write_candidates(std::ostream& out, const std::vector<CandidateSet>& sets);

/// The dataset's own integrals as candidates.
std::vector<CandidateSet> ground_truth_candidates(const std::vector<DatasetRecord>& dataset);

struct EnumerateOptions {
  int max_ops = 3;
  std::vector<Expr> leaves;  // empty: x, y, t, 1, 2
  std::uint64_t step_budget = 0;  // 0: unlimited
  double seconds = 0;             // 0: unlimited
  std::size_t max_results = 0;    // stop after this many verified; 0: all
  ZeroTestConfig zero_test;
};

struct EnumerateResult {
  std::vector<Expr> verified;  // simplified, in enumeration order
  std::size_t distinct = 0;    // canonical forms visited
  std::size_t screened = 0;    // candidates that reached symbolic verification
  bool complete = true;        // false when a budget or max_results cut the search short
};

/// Bottom-up enumeration of expressions with up to max_ops operators over the
/// leaves, one representative per canonical form, each checked with
/// verify_first_integral after a cheap finite-difference screen.
EnumerateResult enumerate_baseline(const OdeSystem& sys, const EnumerateOptions& opt = {});

}  // namespace firstint
