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

#include "firstint/reward.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace firstint {

void RewardConfig::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0) || !std::isfinite(v)) throw std::invalid_argument(std::string("RewardConfig: ") + what + " must be > 0");
  };
  positive(r_max, "r_max");
  positive(k_penalty, "k_penalty");
  positive(k_l, "k_l");
  positive(k_s, "k_s");
  if (!(omega >= 0) || !std::isfinite(omega)) throw std::invalid_argument("RewardConfig: omega must be >= 0");
  if (omega > r_max) throw std::invalid_argument("RewardConfig: omega exceeds r_max");
}

const char* to_string(Validity::Kind k) {
  switch (k) {
    case Validity::Kind::Valid: return "valid";
    case Validity::Kind::Unbalanced: return "unbalanced";
    case Validity::Kind::UnknownSymbol: return "unknown_symbol";
    case Validity::Kind::DegenerateVars: return "degenerate_vars";
  }
  return "?";
}

const char* to_string(RewardBranch b) {
  switch (b) {
    case RewardBranch::Verified: return "verified";
    case RewardBranch::Shaped: return "shaped";
    case RewardBranch::Penalty: return "penalty";
  }
  return "?";
}

Validity classify(const TokenSeq& tokens, VarSet vocab) {
  Validity v;
  try {
    v.expr = parse_polish(tokens, vocab);
  } catch (const ParseError& e) {
    if (e.kind() == ParseError::Kind::UnknownToken) {
      v.kind = Validity::Kind::UnknownSymbol;
      v.token = e.token();
    } else {
      v.kind = Validity::Kind::Unbalanced;
      v.e_k = e.imbalance();
    }
    return v;
  }
  v.var_count = v.expr.variables().size();
  if (v.var_count < 2) v.kind = Validity::Kind::DegenerateVars;
  return v;
}

std::size_t levenshtein(const TokenSeq& a, const TokenSeq& b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

double shaping(std::size_t distance, const RewardConfig& cfg) {
  return std::exp(-cfg.k_l * static_cast<double>(distance));
}

double penalty(const Validity& v, const RewardConfig& cfg) {
  switch (v.kind) {
    case Validity::Kind::Unbalanced: return 1 - std::exp(-static_cast<double>(std::labs(v.e_k)) * cfg.k_s);
    case Validity::Kind::UnknownSymbol: return 1;
    case Validity::Kind::DegenerateVars: return 0;
    case Validity::Kind::Valid: break;
  }
  throw std::invalid_argument("penalty: candidate is valid");
}

RewardDetail score_candidate(const OdeSystem& sys, const std::vector<TokenSeq>& references, const TokenSeq& candidate,
                             const RewardConfig& cfg, const ZeroTestConfig& zero_test) {
  if (references.empty()) throw std::invalid_argument("score_candidate: no reference integrals");
  for (const TokenSeq& ref : references) {
    try {
      parse_polish(ref);
    } catch (const ParseError& e) {
      throw std::invalid_argument(std::string("score_candidate: reference does not parse: ") + e.what());
    }
  }
  RewardDetail out;
  out.validity = classify(candidate);
  if (!out.validity.valid()) {
    out.branch = RewardBranch::Penalty;
    const double p = penalty(out.validity, cfg);
    out.reward = p == 0 ? 0.0 : -cfg.k_penalty * p;
    return out;
  }
  try {
    if (verify_first_integral(out.validity.expr, sys, zero_test).verdict) {
      out.branch = RewardBranch::Verified;
      out.reward = cfg.r_max;
      return out;
    }
  } catch (const Inconclusive&) {
    out.inconclusive = true;
  }
  std::size_t best = SIZE_MAX;
  for (const TokenSeq& ref : references) best = std::min(best, levenshtein(candidate, ref));
  out.branch = RewardBranch::Shaped;
  out.distance = best;
  out.reward = cfg.omega * shaping(best, cfg);
  return out;
}

double reward_one(const OdeSystem& sys, const std::vector<TokenSeq>& references, const TokenSeq& candidate,
                  const RewardConfig& cfg) {
  return score_candidate(sys, references, candidate, cfg).reward;
}

double reward_group(const OdeSystem& sys, const std::vector<TokenSeq>& references,
                    const std::vector<TokenSeq>& candidates, const RewardConfig& cfg) {
  if (candidates.empty()) throw std::invalid_argument("reward_group: no candidates");
  double best = -HUGE_VAL;
  for (const TokenSeq& c : candidates) best = std::max(best, reward_one(sys, references, c, cfg));
  return best;
}

}  // namespace firstint
