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

#include "firstint/eval.hpp"

#include "firstint/budget.hpp"
#include "firstint/polynomial.hpp"
#include "firstint/rng.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <mutex>
#include <new>
#include <ostream>
#include <sstream>
#include <thread>
#include <unordered_set>

namespace firstint {

const char* to_string(CandidateVerdict v) {
  switch (v) {
    case CandidateVerdict::Verified: return "verified";
    case CandidateVerdict::NotIntegral: return "not_integral";
    case CandidateVerdict::Invalid: return "invalid";
    case CandidateVerdict::Timeout: return "timeout";
  }
  return "?";
}

namespace {

// Runs fn(i) for i in [0, n) on up to `workers` threads. The first exception
// is rethrown after all threads stop.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

Budget make_budget(const TimeoutPolicy& p) {
  return p.mode == TimeoutPolicy::Mode::WallClock ? Budget::seconds(p.seconds) : Budget::steps(p.steps);
}

CandidateVerdict verify_one(const OdeSystem& sys, const TokenSeq& cand, const EvalConfig& cfg) {
  Expr v;
  try {
    v = parse_polish(cand);
  } catch (const ParseError&) {
    return CandidateVerdict::Invalid;
  }
  Budget budget = make_budget(cfg.timeout);
  ScopedBudget scope(budget);
  try {
    return verify_first_integral(v, sys, cfg.zero_test).verdict ? CandidateVerdict::Verified
                                                                 : CandidateVerdict::NotIntegral;
  } catch (const Inconclusive&) {
    return CandidateVerdict::NotIntegral;
  } catch (const BudgetExceeded&) {
    return CandidateVerdict::Timeout;
  } catch (const canon::PolyOverflow&) {
    return CandidateVerdict::Timeout;
  } catch (const std::bad_alloc&) {
    return CandidateVerdict::Timeout;
  }
}

}  // namespace

std::vector<CandidateVerdict> verify_candidates(const OdeSystem& sys, const CandidateSet& cands, const EvalConfig& cfg) {
  if (cands.candidates.empty()) throw std::invalid_argument("verify_candidates: empty beam for " + cands.system_id);
  std::vector<CandidateVerdict> out(cands.candidates.size());
  parallel_for(out.size(), cfg.workers, [&](std::size_t i) { out[i] = verify_one(sys, cands.candidates[i], cfg); });
  return out;
}

EvalReport evaluate(const std::vector<DatasetRecord>& dataset, const std::vector<CandidateSet>& candidates,
                    const EvalConfig& cfg) {
  EvalReport rep;
  std::map<std::string, const CandidateSet*> by_id;
  for (const auto& c : candidates)
    if (!by_id.emplace(c.system_id, &c).second) rep.duplicate_ids.push_back(c.system_id);
  std::map<std::string, bool> known;
  for (const auto& r : dataset) known[r.id] = true;
  for (const auto& [id, c] : by_id)
    if (!known.count(id)) rep.unknown_ids.push_back(id);

  struct Unit {
    std::size_t system;
    std::size_t candidate;
  };
  std::vector<OdeSystem> systems;
  std::vector<Unit> units;
  rep.systems.resize(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    systems.push_back(system_of(dataset[i]));
    SystemResult& s = rep.systems[i];
    s.system_id = dataset[i].id;
    auto it = by_id.find(dataset[i].id);
    if (it == by_id.end() || it->second->candidates.empty()) {
      s.missing = true;
      continue;
    }
    s.verdicts.resize(it->second->candidates.size());
    for (std::size_t j = 0; j < s.verdicts.size(); ++j) units.push_back({i, j});
  }

  parallel_for(units.size(), cfg.workers, [&](std::size_t u) {
    const Unit& w = units[u];
    const CandidateSet& c = *by_id.at(dataset[w.system].id);
    rep.systems[w.system].verdicts[w.candidate] = verify_one(systems[w.system], c.candidates[w.candidate], cfg);
  });

  std::size_t tokens = 0, sampled = 0;
  for (auto& s : rep.systems) {
    ++rep.total_systems;
    if (s.missing) {
      ++rep.missing_systems;
      continue;
    }
    ++sampled;
    for (CandidateVerdict v : s.verdicts) {
      ++rep.candidates;
      switch (v) {
        case CandidateVerdict::Verified: ++rep.verified; s.correct = true; break;
        case CandidateVerdict::NotIntegral: ++rep.not_integral; break;
        case CandidateVerdict::Invalid: ++rep.invalid; break;
        case CandidateVerdict::Timeout: ++rep.timeouts; break;
      }
    }
    if (s.correct) ++rep.verified_systems;
    for (const auto& c : by_id.at(s.system_id)->candidates) tokens += c.size();
  }
  if (rep.total_systems)
    rep.accuracy = static_cast<double>(rep.verified_systems) / static_cast<double>(rep.total_systems);
  if (rep.candidates) rep.mean_tokens_per_candidate = static_cast<double>(tokens) / static_cast<double>(rep.candidates);
  if (sampled) rep.mean_tokens_per_sample = static_cast<double>(tokens) / static_cast<double>(sampled);
  return rep;
}

Json EvalReport::to_json() const {
  Json j;
  j["total_systems"] = total_systems;
  j["verified_systems"] = verified_systems;
  j["accuracy"] = accuracy;
  j["missing_systems"] = missing_systems;
  j["candidates"] = candidates;
  j["verified"] = verified;
  j["not_integral"] = not_integral;
  j["invalid"] = invalid;
  j["timeouts"] = timeouts;
  j["mean_tokens_per_candidate"] = mean_tokens_per_candidate;
  j["mean_tokens_per_sample"] = mean_tokens_per_sample;
  j["unknown_ids"] = unknown_ids;
  j["duplicate_ids"] = duplicate_ids;
  Json per = Json::array();
  for (const auto& s : systems) {
    Json v = Json::array();
    for (CandidateVerdict c : s.verdicts) v.push_back(to_string(c));
    per.push_back({{"system_id", s.system_id}, {"correct", s.correct}, {"missing", s.missing}, {"verdicts", v}});
  }
  j["systems"] = std::move(per);
  return j;
}

std::string EvalReport::table() const {
  std::ostringstream o;
  char buf[128];
  auto row = [&](const char* label, const std::string& value) {
    std::snprintf(buf, sizeof buf, "%-28s %s\n", label, value.c_str());
    o << buf;
  };
  std::snprintf(buf, sizeof buf, "%.4f", accuracy);
  row("accuracy", buf);
  row("systems (verified / total)", std::to_string(verified_systems) + " / " + std::to_string(total_systems));
  row("systems without candidates", std::to_string(missing_systems));
  row("candidates", std::to_string(candidates));
  row("  verified", std::to_string(verified));
  row("  not integral", std::to_string(not_integral));
  row("  invalid", std::to_string(invalid));
  row("  timeout", std::to_string(timeouts));
  std::snprintf(buf, sizeof buf, "%.2f", mean_tokens_per_candidate);
  row("tokens per candidate", buf);
  std::snprintf(buf, sizeof buf, "%.2f", mean_tokens_per_sample);
  row("tokens per sample", buf);
  if (!unknown_ids.empty()) row("unknown system ids", std::to_string(unknown_ids.size()));
  if (!duplicate_ids.empty()) row("duplicate system ids", std::to_string(duplicate_ids.size()));
  return o.str();
}

std::vector<CandidateSet> read_candidates(std::istream& in) {
  std::vector<CandidateSet> out;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw MalformedRecord(line_no, e.what());
    }
    if (!j.is_object() || !j.contains("system_id") || !j["system_id"].is_string() || !j.contains("candidates") ||
        !j["candidates"].is_array())
      throw MalformedRecord(line_no, "expected {system_id, candidates}");
    CandidateSet c;
    c.system_id = j["system_id"].get<std::string>();
    for (const Json& s : j["candidates"]) {
      if (!s.is_string()) throw MalformedRecord(line_no, "candidates must be strings");
      c.candidates.push_back(tokenize(s.get<std::string>()));
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<CandidateSet> read_candidates(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return read_candidates(in);
}

void write_candidates(std::ostream& out, const std::vector<CandidateSet>& sets) {
  for (const auto& c : sets) {
    Json j;
    j["system_id"] = c.system_id;
    Json arr = Json::array();
    for (const auto& t : c.candidates) arr.push_back(join(t));
    j["candidates"] = std::move(arr);
    out << j.dump() << '\n';
  }
}

std::vector<CandidateSet> ground_truth_candidates(const std::vector<DatasetRecord>& dataset) {
  std::vector<CandidateSet> out;
  for (const auto& r : dataset) {
    if (r.integrals.empty()) continue;
    CandidateSet c;
    c.system_id = r.id;
    for (const auto& v : r.integrals) c.candidates.push_back(tokenize(v));
    out.push_back(std::move(c));
  }
  return out;
}

// ---- enumeration baseline --------------------------------------------------

namespace {

struct ExprHash {
  std::size_t operator()(const Expr& e) const { return static_cast<std::size_t>(e.hash()); }
};

// Finite differences of V along the flow (x', y', t' = 1) at a few fixed
// points. Rejects only when the difference is clearly non-zero.
class FlowScreen {
 public:
  FlowScreen(const OdeSystem& sys, std::uint64_t seed) {
    Rng rng(seed);
    for (int attempt = 0; attempt < 400 && probes_.size() < 4; ++attempt) {
      Point p{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
      Point dir{0, 0, 1};
      bool ok = true;
      for (std::size_t i = 0; i < sys.size() && ok; ++i) {
        auto f = eval_numeric(sys.rhs[i], p);
        if (!f || std::fabs(*f) > 1e3) ok = false;
        else dir[static_cast<std::size_t>(sys.state_vars[i])] = *f;
      }
      if (!ok) continue;
      Probe pr;
      pr.mid = p;
      for (std::size_t k = 0; k < kVarCount; ++k) {
        pr.lo[k] = p[k] - kStep * dir[k];
        pr.hi[k] = p[k] + kStep * dir[k];
      }
      probes_.push_back(pr);
    }
  }

  bool may_be_integral(const Expr& v) const {
    for (const Probe& pr : probes_) {
      auto lo = eval_numeric(v, pr.lo), hi = eval_numeric(v, pr.hi), mid = eval_numeric(v, pr.mid);
      if (!lo || !hi || !mid) continue;
      const double d = (*hi - *lo) / (2 * kStep);
      if (std::fabs(d) > 1e-3 * (1 + std::fabs(*mid))) return false;
    }
    return true;
  }

 private:
  static constexpr double kStep = 1e-4;
  struct Probe {
    Point lo, mid, hi;
  };
  std::vector<Probe> probes_;
};

}  // namespace

EnumerateResult enumerate_baseline(const OdeSystem& sys, const EnumerateOptions& opt) {
  if (opt.max_ops < 0) throw std::invalid_argument("enumerate_baseline: negative max_ops");
  std::vector<Expr> leaves = opt.leaves;
  if (leaves.empty()) leaves = {vars::x(), vars::y(), vars::t(), num(1), num(2)};

  EnumerateResult res;
  Budget budget = Budget::unlimited();
  if (opt.step_budget) budget = Budget::steps(opt.step_budget);
  if (opt.seconds > 0) budget = Budget::seconds(opt.seconds);
  ScopedBudget scope(budget);

  const VarSet state = sys.state_set();
  const FlowScreen screen(sys, derive_seed(opt.zero_test.seed, 0xe11));
  std::unordered_set<Expr, ExprHash> seen;
  std::vector<std::vector<Expr>> levels(static_cast<std::size_t>(opt.max_ops) + 1);

  struct Done {};
  auto consider = [&](const Expr& raw, std::size_t level) {
    Expr s;
    try {
      s = simplify(raw);
    } catch (const canon::PolyOverflow&) {
      return;
    }
    if (!seen.insert(s).second) return;
    ++res.distinct;
    levels[level].push_back(s);
    if (s.is_const() || (s.variables() & state).empty() || !screen.may_be_integral(s)) return;
    ++res.screened;
    try {
      if (verify_first_integral(s, sys, opt.zero_test).verdict) res.verified.push_back(s);
    } catch (const Inconclusive&) {
    } catch (const canon::PolyOverflow&) {
    }
    if (opt.max_results && res.verified.size() >= opt.max_results) throw Done{};
  };

  static constexpr UnaryOp kUnary[] = {UnaryOp::sin, UnaryOp::cos, UnaryOp::tan,
                                       UnaryOp::exp, UnaryOp::log, UnaryOp::sqrt};
  static constexpr BinaryOp kBinary[] = {BinaryOp::add, BinaryOp::sub, BinaryOp::mul, BinaryOp::div, BinaryOp::pow};
  try {
    for (const Expr& l : leaves) consider(l, 0);
    for (std::size_t n = 1; n < levels.size(); ++n) {
      for (std::size_t k = 0; k < levels[n - 1].size(); ++k)
        for (UnaryOp op : kUnary) consider(Expr::unary(op, levels[n - 1][k]), n);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = n - 1 - i;
        for (BinaryOp op : kBinary) {
          const bool commutative = op == BinaryOp::add || op == BinaryOp::mul;
          if (commutative && i > j) continue;
          for (std::size_t a = 0; a < levels[i].size(); ++a)
            for (std::size_t b = (commutative && i == j) ? a : 0; b < levels[j].size(); ++b)
              consider(Expr::binary(op, levels[i][a], levels[j][b]), n);
        }
      }
    }
  } catch (const Done&) {
    res.complete = false;
  } catch (const BudgetExceeded&) {
    res.complete = false;
  }
  return res;
}

}  // namespace firstint
