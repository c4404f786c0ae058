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

#include "firstint/dataset.hpp"

#include "firstint/digest.hpp"
#include "firstint/notation.hpp"
#include "firstint/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>

namespace firstint {

const char* to_string(SourceTag s) {
  switch (s) {
    case SourceTag::BwdBase: return "bwd_base";
    case SourceTag::BwdSyn: return "bwd_syn";
    case SourceTag::Fwd: return "fwd";
    case SourceTag::External: return "external";
  }
  return "?";
}

SourceTag source_tag_from_string(std::string_view s) {
  for (SourceTag t : {SourceTag::BwdBase, SourceTag::BwdSyn, SourceTag::Fwd, SourceTag::External})
    if (s == to_string(t)) return t;
  throw std::invalid_argument("unknown source tag '" + std::string(s) + "'");
}

const char* to_string(TestsetKind k) { return k == TestsetKind::Hard ? "hard" : "normal"; }

std::string canonical_id(const OdeSystem& sys, const std::vector<Expr>& integrals) {
  std::string s;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    s += name(sys.state_vars[i]);
    s += "' = ";
    s += polish_string(simplify(sys.rhs[i]));
    s += '\n';
  }
  std::vector<std::string> vs;
  for (const Expr& v : integrals) vs.push_back(polish_string(simplify(v)));
  std::sort(vs.begin(), vs.end());
  for (const auto& v : vs) {
    s += "V = ";
    s += v;
    s += '\n';
  }
  return sha256_hex(s);
}

namespace {

Json stats_json(const ExprStats& st) {
  Json j;
  j["operator_count"] = st.operator_count;
  j["variables"] = to_string(st.variables);
  j["depth"] = st.depth;
  j["has_t"] = st.has_t;
  j["has_nonlinear_op"] = st.has_nonlinear_op;
  return j;
}

}  // namespace

DatasetRecord make_record(const OdeSystem& sys, const std::vector<Expr>& integrals, SourceTag tag, Json meta) {
  if (sys.size() != 2 || sys.state_vars[0] != VarId::x || sys.state_vars[1] != VarId::y)
    throw std::invalid_argument("make_record: records hold planar systems over [x, y]");
  DatasetRecord r;
  r.id = canonical_id(sys, integrals);
  r.system = {polish_string(sys.rhs[0]), polish_string(sys.rhs[1])};
  for (const Expr& v : integrals) r.integrals.push_back(polish_string(v));
  r.meta = std::move(meta);
  r.source_tag = tag;
  return r;
}

DatasetRecord make_record(const IntegralPair& pair, SourceTag tag) {
  Json meta;
  meta["seed"] = pair.meta.seed;
  meta["sampler_digest"] = pair.meta.sampler_digest;
  meta["tier"] = to_string(pair.meta.tier);
  meta["domain_enlarged"] = pair.meta.domain_enlarged;
  meta["attempts"] = pair.meta.attempts;
  Json stats = Json::array();
  for (const auto& st : pair.meta.integral_stats) stats.push_back(stats_json(st));
  meta["integral_stats"] = std::move(stats);
  return make_record(pair.system, pair.integrals, tag, std::move(meta));
}

OdeSystem system_of(const DatasetRecord& r) {
  return OdeSystem::planar(parse_polish(r.system[0]), parse_polish(r.system[1]));
}

std::vector<Expr> integrals_of(const DatasetRecord& r) {
  std::vector<Expr> out;
  for (const auto& s : r.integrals) out.push_back(parse_polish(s));
  return out;
}

MalformedRecord::MalformedRecord(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

Json to_json(const DatasetRecord& r) {
  Json j;
  j["id"] = r.id;
  j["system"] = Json::array({r.system[0], r.system[1]});
  j["integrals"] = r.integrals;
  j["meta"] = r.meta;
  j["source_tag"] = to_string(r.source_tag);
  return j;
}

namespace {

std::string checked_expression(const Json& j, std::size_t line, const char* field) {
  if (!j.is_string()) throw MalformedRecord(line, std::string(field) + ": expected a string");
  const std::string s = j.get<std::string>();
  try {
    if (polish_string(parse_polish(s)) != s)
      throw MalformedRecord(line, std::string(field) + ": '" + s + "' is not in printed form");
  } catch (const ParseError& e) {
    throw MalformedRecord(line, std::string(field) + ": " + e.what());
  }
  return s;
}

}  // namespace

DatasetRecord record_from_json(const Json& j, std::size_t line) {
  if (!j.is_object()) throw MalformedRecord(line, "expected an object");
  for (const char* key : {"id", "system", "integrals", "meta", "source_tag"})
    if (!j.contains(key)) throw MalformedRecord(line, std::string("missing key '") + key + "'");
  if (j.size() != 5) throw MalformedRecord(line, "unexpected keys");
  DatasetRecord r;
  if (!j["id"].is_string()) throw MalformedRecord(line, "id: expected a string");
  r.id = j["id"].get<std::string>();
  const Json& sys = j["system"];
  if (!sys.is_array() || sys.size() != 2) throw MalformedRecord(line, "system: expected two expressions");
  r.system = {checked_expression(sys[0], line, "system"), checked_expression(sys[1], line, "system")};
  if (!j["integrals"].is_array()) throw MalformedRecord(line, "integrals: expected an array");
  for (const Json& v : j["integrals"]) r.integrals.push_back(checked_expression(v, line, "integrals"));
  if (!j["meta"].is_object()) throw MalformedRecord(line, "meta: expected an object");
  r.meta = j["meta"];
  if (!j["source_tag"].is_string()) throw MalformedRecord(line, "source_tag: expected a string");
  try {
    r.source_tag = source_tag_from_string(j["source_tag"].get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw MalformedRecord(line, e.what());
  }
  return r;
}

void write_records(std::ostream& out, const std::vector<DatasetRecord>& records) {
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

std::vector<DatasetRecord> read_records(std::istream& in) {
  std::vector<DatasetRecord> out;
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
    out.push_back(record_from_json(j, line_no));
  }
  return out;
}

void write_records(const std::filesystem::path& path, const std::vector<DatasetRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_records(out, records);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<DatasetRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return read_records(in);
}

std::filesystem::path manifest_path(const std::filesystem::path& records) {
  return std::filesystem::path(records.string() + ".manifest.json");
}

void write_manifest(const std::filesystem::path& records, const Json& manifest) {
  std::ofstream out(manifest_path(records), std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + manifest_path(records).string());
  out << manifest.dump(2) << '\n';
}

DedupResult dedup(const std::vector<DatasetRecord>& records) {
  DedupResult out;
  std::map<std::string, SourceTag> seen;
  for (const auto& r : records) {
    const std::string id = canonical_id(system_of(r), integrals_of(r));
    auto [it, fresh] = seen.emplace(id, r.source_tag);
    if (fresh) {
      out.records.push_back(r);
      continue;
    }
    ++out.removed;
    if (it->second != r.source_tag)
      out.notes.push_back("duplicate " + id.substr(0, 16) + ": kept " + to_string(it->second) + ", dropped " +
                          to_string(r.source_tag));
  }
  return out;
}

namespace {

template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

// floor(f_i n) each, then one more to the largest remainders; ties keep order.
std::vector<std::size_t> largest_remainder(const std::vector<SplitSpec>& splits, std::size_t n) {
  std::vector<std::size_t> counts(splits.size());
  std::vector<double> rem(splits.size());
  std::size_t used = 0;
  for (std::size_t i = 0; i < splits.size(); ++i) {
    const double exact = splits[i].fraction * static_cast<double>(n);
    counts[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    rem[i] = exact - static_cast<double>(counts[i]);
    used += counts[i];
  }
  std::vector<std::size_t> order(splits.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b] + 1e-12; });
  for (std::size_t k = 0; used < n; ++k, ++used) ++counts[order[k % order.size()]];
  return counts;
}

}  // namespace

Json SplitManifest::to_json() const {
  Json j;
  j["seed"] = seed;
  Json parts = Json::array();
  for (std::size_t i = 0; i < splits.size(); ++i)
    parts.push_back({{"name", splits[i].name}, {"fraction", splits[i].fraction}, {"count", counts[i]}});
  j["splits"] = std::move(parts);
  j["dedup_removed"] = dedup_removed;
  j["excluded"] = excluded;
  return j;
}

SplitResult split(const std::vector<DatasetRecord>& records, const std::vector<SplitSpec>& splits, std::uint64_t seed,
                  const std::set<std::string>& exclude) {
  if (splits.empty()) throw std::invalid_argument("split: no splits");
  double total = 0;
  for (const auto& s : splits) {
    if (!(s.fraction >= 0)) throw std::invalid_argument("split: negative fraction");
    total += s.fraction;
  }
  if (std::fabs(total - 1) > 1e-9) throw std::invalid_argument("split: fractions must sum to 1");

  SplitResult out;
  out.manifest.seed = seed;
  out.manifest.splits = splits;
  DedupResult d = dedup(records);
  out.manifest.dedup_removed = d.removed;
  std::vector<DatasetRecord> pool;
  for (auto& r : d.records) {
    if (exclude.count(canonical_id(system_of(r), integrals_of(r)))) {
      ++out.manifest.excluded;
      continue;
    }
    pool.push_back(std::move(r));
  }
  Rng rng(seed);
  shuffle(pool, rng);
  out.manifest.counts = largest_remainder(splits, pool.size());
  std::size_t pos = 0;
  for (std::size_t c : out.manifest.counts) {
    out.parts.emplace_back(std::make_move_iterator(pool.begin() + static_cast<std::ptrdiff_t>(pos)),
                           std::make_move_iterator(pool.begin() + static_cast<std::ptrdiff_t>(pos + c)));
    pos += c;
  }
  return out;
}

std::vector<DatasetRecord> blend(const std::vector<DatasetRecord>& base, const std::vector<DatasetRecord>& extra,
                                 double a, std::uint64_t seed) {
  if (!(a >= 0 && a <= 1)) throw std::invalid_argument("blend: fraction must be in [0, 1]");
  const std::size_t total = base.size();
  const auto n_extra = static_cast<std::size_t>(std::llround(a * static_cast<double>(total)));
  if (extra.size() < n_extra)
    throw InsufficientExtras("blend: need " + std::to_string(n_extra) + " extra records, have " +
                             std::to_string(extra.size()));
  std::vector<std::size_t> ei(extra.size()), bi(base.size());
  std::iota(ei.begin(), ei.end(), 0);
  std::iota(bi.begin(), bi.end(), 0);
  Rng pick_extra(derive_seed(seed, 0)), pick_base(derive_seed(seed, 1)), order(derive_seed(seed, 2));
  shuffle(ei, pick_extra);
  shuffle(bi, pick_base);
  std::vector<DatasetRecord> out;
  out.reserve(total);
  for (std::size_t k = 0; k < n_extra; ++k) out.push_back(extra[ei[k]]);
  for (std::size_t k = 0; k < total - n_extra; ++k) out.push_back(base[bi[k]]);
  shuffle(out, order);
  return out;
}

bool hard_predicate(const IntegralPair& pair) {
  if (pair.integrals.empty()) return false;
  for (const Expr& v : pair.integrals) {
    ExprStats st = stats(v);
    if (!st.has_t || !st.has_nonlinear_op) return false;
  }
  return true;
}

TestsetResult make_testset(TestsetKind kind, std::size_t count, BatchConfig cfg) {
  cfg.count = count;
  cfg.accept = kind == TestsetKind::Hard ? std::function<bool(const IntegralPair&)>(hard_predicate) : nullptr;
  BatchResult b = generate_batch(cfg);
  if (b.exhausted)
    throw TestsetBudgetExhausted(std::to_string(b.exhausted) + " of " + std::to_string(count) +
                                 " test records ran out of attempts");
  TestsetResult out;
  out.rejections = b.rejections;
  out.predicate_rejections = b.predicate_rejections;
  for (const auto& p : b.pairs) {
    DatasetRecord r = make_record(p, SourceTag::BwdBase);
    r.meta["testset"] = to_string(kind);
    out.records.push_back(std::move(r));
  }
  return out;
}

Json score_reward_record(const Json& in, const RewardConfig& cfg) {
  auto strings = [&](const char* key) {
    if (!in.contains(key) || !in[key].is_array()) throw std::invalid_argument(std::string("reward record: missing ") + key);
    std::vector<TokenSeq> out;
    for (const Json& s : in[key]) {
      if (!s.is_string()) throw std::invalid_argument(std::string("reward record: ") + key + " must hold strings");
      out.push_back(tokenize(s.get<std::string>()));
    }
    return out;
  };
  std::vector<TokenSeq> sys = strings("system");
  if (sys.size() != 2) throw std::invalid_argument("reward record: system must hold two expressions");
  const OdeSystem system = OdeSystem::planar(parse_polish(sys[0]), parse_polish(sys[1]));
  const std::vector<TokenSeq> refs = strings("references");
  const std::vector<TokenSeq> cands = strings("candidates");

  Json out = in;
  Json scores = Json::array();
  for (const TokenSeq& c : cands) {
    RewardDetail d = score_candidate(system, refs, c, cfg);
    Json s;
    s["reward"] = d.reward;
    s["branch"] = to_string(d.branch);
    s["validity"] = to_string(d.validity.kind);
    s["L"] = d.distance ? Json(*d.distance) : Json(nullptr);
    s["E_k"] = d.validity.kind == Validity::Kind::Unbalanced ? d.validity.e_k : arity_balance(c);
    if (d.inconclusive) s["inconclusive"] = true;
    scores.push_back(std::move(s));
  }
  out["scores"] = std::move(scores);
  return out;
}

}  // namespace firstint
