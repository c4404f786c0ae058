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

// Reward for a proposed first integral: a verification bonus, a shaped reward
// from the token edit distance to the references, and validity penalties.

#include "firstint/calculus.hpp"
#include "firstint/notation.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace firstint {

struct RewardConfig {
  double r_max = 100;
  double omega = 50;  // 0 gives the sparse (binary) reward
  double k_penalty = 1;
  double k_l = 0.1;
  double k_s = 0.01;

  static RewardConfig shaped() { return {}; }
  static RewardConfig binary() {
    RewardConfig c;
    c.omega = 0;
    return c;
  }
  /// Throws std::invalid_argument.
  void validate() const;
};

struct Validity {
  enum class Kind { Valid, Unbalanced, UnknownSymbol, DegenerateVars };
  Kind kind = Kind::Valid;
  Expr expr;              // Valid
  long e_k = 0;           // Unbalanced: operand/operator imbalance
  std::string token;      // UnknownSymbol
  std::size_t var_count = 0;  // DegenerateVars

  bool valid() const { return kind == Kind::Valid; }
};

const char* to_string(Validity::Kind k);

/// Checked in order: unknown symbol, arity balance, parse, variable count.
/// Fewer than two distinct variables is DegenerateVars.
Validity classify(const TokenSeq& tokens, VarSet vocab = VarSet::all());

/// Token-level edit distance, unit costs.
std::size_t levenshtein(const TokenSeq& a, const TokenSeq& b);

/// exp(-k_l * distance), in (0, 1].
double shaping(std::size_t distance, const RewardConfig& cfg);

/// Penalty in [0, 1] for an invalid candidate. Throws std::invalid_argument
/// for a Valid one.
double penalty(const Validity& v, const RewardConfig& cfg);

enum class RewardBranch { Verified, Shaped, Penalty };
const char* to_string(RewardBranch b);

struct RewardDetail {
  double reward = 0;
  RewardBranch branch = RewardBranch::Penalty;
  Validity validity;
  std::optional<std::size_t> distance;  // shaped branch only
  bool inconclusive = false;            // verification could not decide
};

/// references must be non-empty and each must parse.
RewardDetail score_candidate(const OdeSystem& sys, const std::vector<TokenSeq>& references, const TokenSeq& candidate,
                             const RewardConfig& cfg, const ZeroTestConfig& zero_test = {});

double reward_one(const OdeSystem& sys, const std::vector<TokenSeq>& references, const TokenSeq& candidate,
                  const RewardConfig& cfg);

/// Maximum over the candidates; throws std::invalid_argument when empty.
double reward_group(const OdeSystem& sys, const std::vector<TokenSeq>& references,
                    const std::vector<TokenSeq>& candidates, const RewardConfig& cfg);

}  // namespace firstint
