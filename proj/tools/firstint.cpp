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

// Command-line entry point: generation, inversion, test sets, blending,
// reward scoring, verification, evaluation and enumeration.
//
// Exit status: 0 ok, 1 usage or bad input, 2 verification failure under
// --strict, 3 internal error.

#include "firstint/backgen.hpp"
#include "firstint/dataset.hpp"
#include "firstint/eval.hpp"
#include "firstint/notation.hpp"
#include "firstint/reward.hpp"
#include "firstint/rng.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace firstint;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kVerificationFailed = 2;
constexpr int kInternal = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Master seed: the flag when given, otherwise fresh entropy, reported so the
// run can be repeated.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  std::random_device rd;
  const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  std::cerr << "seed: " << s << '\n';
  return s;
}

std::string command_line(int argc, char** argv) {
  std::string s;
  for (int i = 1; i < argc; ++i) {
    if (i > 1) s += ' ';
    s += argv[i];
  }
  return s;
}

Json sampler_json(const SamplerConfig& c) {
  return {{"min_ops", c.min_ops},
          {"max_ops", c.max_ops},
          {"leaf_var_prob", c.leaf_var_prob},
          {"unary_weights", c.unary_weights},
          {"binary_weights", c.binary_weights},
          {"max_attempts", c.max_attempts},
          {"digest", c.digest()}};
}

Json rejections_json(const RejectionCounts& counts) {
  Json j = Json::object();
  for (std::size_t k = 0; k < kRejectReasonCount; ++k) j[to_string(static_cast<RejectReason>(k))] = counts[k];
  return j;
}

Expr parse_arg(const std::string& s, const char* what) {
  try {
    return parse_polish(s);
  } catch (const ParseError& e) {
    throw UsageError(std::string(what) + ": " + e.what());
  }
}

OdeSystem planar_arg(const std::vector<std::string>& sys) {
  if (sys.size() != 2) throw UsageError("--system takes two expressions: x' and y'");
  return OdeSystem::planar(parse_arg(sys[0], "--system"), parse_arg(sys[1], "--system"));
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path.string());
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) {
    if (auto p = line.find_first_not_of(" \t\r"); p == std::string::npos || line[p] == '#') continue;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    out.push_back(line);
  }
  return out;
}

void emit(const fs::path& out, const std::vector<DatasetRecord>& records, Json manifest) {
  write_records(out, records);
  manifest["records"] = records.size();
  write_manifest(out, manifest);
  std::cerr << "wrote " << records.size() << " records to " << out.string() << '\n';
}

// ---- subcommand options ----------------------------------------------------

struct Common {
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
};

struct SamplerOpts {
  int min_ops = 0;
  int max_ops = 6;
  double leaf_var_prob = 0.7;

  SamplerConfig config(std::uint64_t seed) const {
    SamplerConfig c;
    c.min_ops = min_ops;
    c.max_ops = max_ops;
    c.leaf_var_prob = leaf_var_prob;
    c.rng_seed = seed;
    c.validate();
    return c;
  }
};

void add_common(CLI::App* app, Common& c, bool workers = true) {
  app->add_option("--seed", c.seed, "Master seed (default: fresh entropy, printed)");
  if (workers) app->add_option("--workers", c.workers, "Worker threads")->check(CLI::Range(1u, 1024u));
}

void add_sampler(CLI::App* app, SamplerOpts& s) {
  app->add_option("--min-ops", s.min_ops, "Fewest operators per sampled integral")->check(CLI::NonNegativeNumber);
  app->add_option("--max-ops", s.max_ops, "Most operators per sampled integral")->check(CLI::NonNegativeNumber);
  app->add_option("--leaf-var-prob", s.leaf_var_prob, "Probability that a leaf is a variable")
      ->check(CLI::Range(0.0, 1.0));
}

Json run_manifest(const std::string& command, const std::string& argv, std::uint64_t seed) {
  return {{"command", command}, {"argv", argv}, {"seed", seed}};
}

// ---- generate --------------------------------------------------------------

struct GenerateOpts {
  Common common;
  SamplerOpts sampler;
  std::size_t count = 0;
  int max_attempts = 500;
  bool family = false;
  fs::path out;
};

int run_generate(const GenerateOpts& o, const std::string& argv) {
  const std::uint64_t seed = resolve_seed(o.common.seed);
  Json manifest = run_manifest("generate", argv, seed);
  std::vector<DatasetRecord> records;
  if (o.family) {
    for (std::size_t i = 0; i < o.count; ++i) {
      const std::uint64_t s = derive_seed(seed, i);
      Rng rng(s);
      FamilyParams p = sample_family_params(rng);
      Json meta = {{"seed", s}, {"params", {p.a, p.b, p.c, p.d, p.e, p.f}}};
      records.push_back(make_record(sample_family(p), {}, SourceTag::Fwd, std::move(meta)));
    }
    manifest["mode"] = "family";
  } else {
    BatchConfig cfg;
    cfg.count = o.count;
    cfg.master_seed = seed;
    cfg.workers = o.common.workers;
    cfg.max_attempts = o.max_attempts;
    cfg.sampler = o.sampler.config(seed);
    BatchResult r = generate_batch(cfg);
    for (const auto& p : r.pairs) records.push_back(make_record(p, SourceTag::BwdBase));
    manifest["mode"] = "backward";
    manifest["workers"] = o.common.workers;
    manifest["max_attempts"] = o.max_attempts;
    manifest["sampler"] = sampler_json(cfg.sampler);
    manifest["rejections"] = rejections_json(r.rejections);
    manifest["exhausted"] = r.exhausted;
    if (r.exhausted) std::cerr << r.exhausted << " record slots ran out of attempts\n";
  }
  emit(o.out, records, std::move(manifest));
  return kOk;
}

// ---- invert ----------------------------------------------------------------

struct InvertOpts {
  Common common;
  fs::path integrals;
  std::size_t m = 1;
  std::string prescribe = "x=y";
  bool strict = false;
  fs::path out;
};

int run_invert(const InvertOpts& o, const std::string& argv) {
  const std::uint64_t seed = resolve_seed(o.common.seed);
  std::vector<std::string> lines = read_lines(o.integrals);
  if (o.m < 1 || o.m > 2) throw UsageError("--m must be 1 or 2");
  if (lines.size() % o.m) throw UsageError("integral count is not a multiple of --m");

  SeedSpec base;
  base.m = o.m;
  if (o.m == 1) {
    const auto eq = o.prescribe.find('=');
    auto var = eq == std::string::npos ? std::nullopt : var_from_name(o.prescribe.substr(0, eq));
    if (!var || *var == VarId::t) throw UsageError("--prescribe expects x=<expr> or y=<expr>");
    base.prescribed_rhs[*var] = parse_arg(o.prescribe.substr(eq + 1), "--prescribe");
  }
  const bool syn = o.m == 1 && base.prescribed_rhs.count(VarId::x) && base.prescribed_rhs[VarId::x] == vars::y();

  std::vector<DatasetRecord> records;
  RejectionCounts counts{};
  std::size_t failed = 0;
  for (std::size_t i = 0; i < lines.size(); i += o.m) {
    SeedSpec spec = base;
    for (std::size_t k = 0; k < o.m; ++k) spec.external.push_back(parse_arg(lines[i + k], "integral"));
    Rng rng(derive_seed(seed, i / o.m));
    auto r = generate_pair(spec, SamplerConfig{}, rng);
    if (auto* rej = std::get_if<Rejection>(&r)) {
      ++counts[static_cast<std::size_t>(rej->reason)];
      ++failed;
      std::cerr << "line " << i + 1 << ": " << to_string(rej->reason) << " (" << rej->detail << ")\n";
      continue;
    }
    IntegralPair& p = std::get<IntegralPair>(r);
    p.meta.seed = derive_seed(seed, i / o.m);
    records.push_back(make_record(p, syn ? SourceTag::BwdSyn : SourceTag::External));
  }
  Json manifest = run_manifest("invert", argv, seed);
  manifest["input"] = o.integrals.string();
  manifest["m"] = o.m;
  manifest["prescribe"] = o.m == 1 ? o.prescribe : "";
  manifest["rejections"] = rejections_json(counts);
  emit(o.out, records, std::move(manifest));
  return o.strict && failed ? kVerificationFailed : kOk;
}

// ---- testset ---------------------------------------------------------------

struct TestsetOpts {
  Common common;
  SamplerOpts sampler;
  std::string kind = "normal";
  std::size_t count = 0;
  int max_attempts = 500;
  fs::path out;
};

int run_testset(const TestsetOpts& o, const std::string& argv) {
  const std::uint64_t seed = resolve_seed(o.common.seed);
  BatchConfig cfg;
  cfg.master_seed = seed;
  cfg.workers = o.common.workers;
  cfg.max_attempts = o.max_attempts;
  cfg.sampler = o.sampler.config(seed);
  const TestsetKind kind = o.kind == "hard" ? TestsetKind::Hard : TestsetKind::Normal;
  TestsetResult r = make_testset(kind, o.count, cfg);
  Json manifest = run_manifest("testset", argv, seed);
  manifest["kind"] = to_string(kind);
  manifest["workers"] = o.common.workers;
  manifest["sampler"] = sampler_json(cfg.sampler);
  manifest["rejections"] = rejections_json(r.rejections);
  manifest["predicate_rejections"] = r.predicate_rejections;
  emit(o.out, r.records, std::move(manifest));
  return kOk;
}

// ---- blend / dedup / split -------------------------------------------------

struct BlendOpts {
  Common common;
  fs::path base, extra, out;
  double fraction = 0;
};

int run_blend(const BlendOpts& o, const std::string& argv) {
  const std::uint64_t seed = resolve_seed(o.common.seed);
  auto base = read_records(o.base);
  auto extra = read_records(o.extra);
  auto out = blend(base, extra, o.fraction, seed);
  Json manifest = run_manifest("blend", argv, seed);
  manifest["base"] = o.base.string();
  manifest["extra"] = o.extra.string();
  manifest["fraction"] = o.fraction;
  emit(o.out, out, std::move(manifest));
  return kOk;
}

struct DedupOpts {
  fs::path in, out;
};

int run_dedup(const DedupOpts& o, const std::string& argv) {
  DedupResult d = dedup(read_records(o.in));
  for (const auto& n : d.notes) std::cerr << n << '\n';
  Json manifest = {{"command", "dedup"}, {"argv", argv}, {"input", o.in.string()}, {"removed", d.removed}};
  emit(o.out, d.records, std::move(manifest));
  return kOk;
}

struct SplitOpts {
  Common common;
  fs::path in, out_dir;
  std::vector<std::string> fractions{"train=0.9", "valid=0.1"};
  std::vector<fs::path> exclude;
};

int run_split(const SplitOpts& o, const std::string& argv) {
  const std::uint64_t seed = resolve_seed(o.common.seed);
  std::vector<SplitSpec> specs;
  for (const auto& f : o.fractions) {
    const auto eq = f.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--fractions expects name=value");
    try {
      specs.push_back({f.substr(0, eq), std::stod(f.substr(eq + 1))});
    } catch (const std::logic_error&) {
      throw UsageError("bad fraction '" + f + "'");
    }
  }
  std::set<std::string> reserved;
  for (const auto& path : o.exclude)
    for (const auto& r : read_records(path)) reserved.insert(canonical_id(system_of(r), integrals_of(r)));
  SplitResult s = split(read_records(o.in), specs, seed, reserved);
  fs::create_directories(o.out_dir);
  Json manifest = s.manifest.to_json();
  manifest["command"] = "split";
  manifest["argv"] = argv;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    fs::path p = o.out_dir / (specs[i].name + ".jsonl");
    write_records(p, s.parts[i]);
    std::cerr << specs[i].name << ": " << s.parts[i].size() << " records\n";
  }
  std::ofstream(o.out_dir / "split.manifest.json") << manifest.dump(2) << '\n';
  return kOk;
}

// ---- reward ----------------------------------------------------------------

struct RewardOpts {
  std::string mode = "ld";
  double r_max = 100, k_penalty = 1, k_l = 0.1, k_s = 0.01;
  std::optional<double> omega;
  fs::path in, out;
  std::vector<std::string> system, references, candidates;
};

int run_reward(const RewardOpts& o) {
  RewardConfig cfg = o.mode == "bin" ? RewardConfig::binary() : RewardConfig::shaped();
  cfg.r_max = o.r_max;
  cfg.k_penalty = o.k_penalty;
  cfg.k_l = o.k_l;
  cfg.k_s = o.k_s;
  if (o.omega) cfg.omega = *o.omega;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  if (!o.in.empty()) {
    std::ifstream in(o.in);
    if (!in) throw UsageError("cannot read " + o.in.string());
    std::ofstream file;
    if (!o.out.empty()) file.open(o.out, std::ios::binary);
    std::ostream& out = o.out.empty() ? std::cout : file;
    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
      ++line_no;
      if (line.empty()) continue;
      try {
        out << score_reward_record(Json::parse(line), cfg).dump() << '\n';
      } catch (const std::exception& e) {
        throw UsageError("line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    return kOk;
  }
  if (o.references.empty() || o.candidates.empty())
    throw UsageError("reward needs --in, or --system with --reference and --candidate");
  Json rec = {{"system", o.system}, {"references", o.references}, {"candidates", o.candidates}};
  Json scored = score_reward_record(rec, cfg);
  double best = -HUGE_VAL;
  for (const auto& s : scored["scores"]) best = std::max(best, s["reward"].get<double>());
  scored["group_reward"] = best;
  std::cout << scored.dump() << '\n';
  return kOk;
}

// ---- verify ----------------------------------------------------------------

struct VerifyOpts {
  std::vector<std::string> system;
  std::vector<std::string> integrals;
  fs::path in;
  bool strict = false;
};

int run_verify(const VerifyOpts& o) {
  std::size_t failed = 0, total = 0;
  auto check = [&](const OdeSystem& sys, const Expr& v, const std::string& label) {
    ++total;
    bool ok = false;
    std::string tier = "-";
    try {
      Verification r = verify_first_integral(v, sys);
      ok = r.verdict;
      tier = to_string(r.tier);
      if (!ok && r.constant) tier = "constant";
    } catch (const Inconclusive&) {
      tier = "inconclusive";
    }
    if (!ok) ++failed;
    std::cout << label << (label.empty() ? "" : " ") << (ok ? "true" : "false") << " " << tier << '\n';
  };

  if (!o.in.empty()) {
    auto records = read_records(o.in);
    for (std::size_t i = 0; i < records.size(); ++i) {
      OdeSystem sys = system_of(records[i]);
      for (const Expr& v : integrals_of(records[i])) check(sys, v, std::to_string(i + 1) + " " + records[i].id.substr(0, 16));
    }
    std::cerr << total - failed << " / " << total << " integrals verified\n";
  } else {
    if (o.integrals.empty()) throw UsageError("verify needs --integral or --in");
    OdeSystem sys = planar_arg(o.system);
    for (const auto& s : o.integrals) check(sys, parse_arg(s, "--integral"), "");
  }
  return o.strict && failed ? kVerificationFailed : kOk;
}

// ---- eval ------------------------------------------------------------------

struct EvalOpts {
  unsigned workers = 1;
  fs::path dataset, candidates, report;
  bool ground_truth = false;
  std::optional<double> timeout_seconds;
  std::uint64_t timeout_steps = 2'000'000;
};

int run_eval(const EvalOpts& o) {
  auto data = read_records(o.dataset);
  std::vector<CandidateSet> cands;
  if (o.ground_truth) cands = ground_truth_candidates(data);
  else if (!o.candidates.empty()) cands = read_candidates(o.candidates);
  else throw UsageError("eval needs --candidates or --ground-truth");
  EvalConfig cfg;
  cfg.workers = o.workers;
  cfg.timeout = o.timeout_seconds ? TimeoutPolicy::wall_clock(*o.timeout_seconds)
                                  : TimeoutPolicy::step_budget(o.timeout_steps);
  EvalReport rep = evaluate(data, cands, cfg);
  std::cout << rep.table();
  if (!o.report.empty()) std::ofstream(o.report, std::ios::binary) << rep.to_json().dump(2) << '\n';
  return kOk;
}

// ---- enumerate -------------------------------------------------------------

struct EnumerateOpts {
  std::vector<std::string> system;
  fs::path dataset, out;
  int max_ops = 3;
  std::size_t max_results = 0;
  double seconds = 0;
};

int run_enumerate(const EnumerateOpts& o) {
  EnumerateOptions opt;
  opt.max_ops = o.max_ops;
  opt.max_results = o.max_results;
  opt.seconds = o.seconds;
  if (o.dataset.empty()) {
    EnumerateResult r = enumerate_baseline(planar_arg(o.system), opt);
    for (const Expr& v : r.verified) std::cout << polish_string(v) << '\n';
    std::cerr << r.verified.size() << " verified of " << r.distinct << " distinct expressions"
              << (r.complete ? "" : " (search cut short)") << '\n';
    return kOk;
  }
  if (o.out.empty()) throw UsageError("--dataset needs --out for the candidates file");
  std::vector<CandidateSet> sets;
  for (const auto& rec : read_records(o.dataset)) {
    EnumerateResult r = enumerate_baseline(system_of(rec), opt);
    CandidateSet c;
    c.system_id = rec.id;
    for (const Expr& v : r.verified) c.candidates.push_back(print_polish(v));
    if (!c.candidates.empty()) sets.push_back(std::move(c));  // eval counts it as missing
  }
  std::ofstream out(o.out, std::ios::binary);
  write_candidates(out, sets);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"First-integral data generation, verification and evaluation"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");
  const std::string args = command_line(argc, argv);

  GenerateOpts gen;
  auto* g = app.add_subcommand("generate", "Backward-generated (system, integral) pairs, or --family systems");
  add_common(g, gen.common);
  add_sampler(g, gen.sampler);
  g->add_option("--count", gen.count, "Records to produce")->required();
  g->add_option("--max-attempts", gen.max_attempts, "Attempts per record")->check(CLI::PositiveNumber);
  g->add_flag("--family", gen.family, "Second-order family x'' = (Ax+Bt+C)/(Dx+Et+F), no integrals");
  g->add_option("--out", gen.out, "Record file")->required();

  InvertOpts inv;
  auto* iv = app.add_subcommand("invert", "Build systems from given integrals (one Polish expression per line)");
  add_common(iv, inv.common, false);
  iv->add_option("--integrals", inv.integrals, "Integral file")->required()->check(CLI::ExistingFile);
  iv->add_option("--m", inv.m, "Integrals per system (1 or 2)");
  iv->add_option("--prescribe", inv.prescribe, "Given equation for m = 1, e.g. x=y");
  iv->add_flag("--strict", inv.strict, "Exit 2 when any input is rejected");
  iv->add_option("--out", inv.out, "Record file")->required();

  TestsetOpts ts;
  auto* tsc = app.add_subcommand("testset", "Normal or Hard test set");
  add_common(tsc, ts.common);
  add_sampler(tsc, ts.sampler);
  tsc->add_option("--kind", ts.kind, "normal or hard")->check(CLI::IsMember({"normal", "hard"}));
  tsc->add_option("--count", ts.count, "Records")->required();
  tsc->add_option("--max-attempts", ts.max_attempts, "Attempts per record")->check(CLI::PositiveNumber);
  tsc->add_option("--out", ts.out, "Record file")->required();

  BlendOpts bl;
  auto* b = app.add_subcommand("blend", "Mix extra records into a base set at a given final fraction");
  add_common(b, bl.common, false);
  b->add_option("--base", bl.base)->required()->check(CLI::ExistingFile);
  b->add_option("--extra", bl.extra)->required()->check(CLI::ExistingFile);
  b->add_option("--fraction", bl.fraction, "Fraction of the output drawn from --extra")
      ->required()
      ->check(CLI::Range(0.0, 1.0));
  b->add_option("--out", bl.out)->required();

  DedupOpts dd;
  auto* d = app.add_subcommand("dedup", "Drop records with the same canonical id");
  d->add_option("--in", dd.in)->required()->check(CLI::ExistingFile);
  d->add_option("--out", dd.out)->required();

  SplitOpts sp;
  auto* s = app.add_subcommand("split", "Seeded disjoint splits");
  add_common(s, sp.common, false);
  s->add_option("--in", sp.in)->required()->check(CLI::ExistingFile);
  s->add_option("--out-dir", sp.out_dir)->required();
  s->add_option("--fractions", sp.fractions, "name=fraction ...");
  s->add_option("--exclude", sp.exclude, "Record files whose ids must not appear (e.g. test sets)")
      ->check(CLI::ExistingFile);

  RewardOpts rw;
  auto* r = app.add_subcommand("reward", "Score candidates against a system and reference integrals");
  r->add_option("--mode", rw.mode, "ld (shaped) or bin (sparse)")->check(CLI::IsMember({"ld", "bin"}));
  r->add_option("--r-max", rw.r_max);
  r->add_option("--omega", rw.omega, "Shaping weight (default 50, or 0 in bin mode)");
  r->add_option("--k-penalty", rw.k_penalty);
  r->add_option("--k-l", rw.k_l);
  r->add_option("--k-s", rw.k_s);
  r->add_option("--in", rw.in, "JSONL of {system, references, candidates}")->check(CLI::ExistingFile);
  r->add_option("--out", rw.out, "Scored JSONL (default stdout)");
  r->add_option("--system", rw.system, "x' and y' in Polish notation")->expected(2);
  r->add_option("--reference", rw.references, "Reference integral");
  r->add_option("--candidate", rw.candidates, "Candidate integral");

  VerifyOpts vf;
  auto* v = app.add_subcommand("verify", "Check first integrals against a system, or every record of a file");
  v->add_option("--system", vf.system, "x' and y' in Polish notation")->expected(2);
  v->add_option("--integral", vf.integrals, "Candidate integral");
  v->add_option("--in", vf.in, "Record file")->check(CLI::ExistingFile);
  v->add_flag("--strict", vf.strict, "Exit 2 when any integral fails");

  EvalOpts ev;
  auto* e = app.add_subcommand("eval", "Predict-and-verify accuracy over a dataset");
  e->add_option("--dataset", ev.dataset)->required()->check(CLI::ExistingFile);
  e->add_option("--candidates", ev.candidates, "JSONL of {system_id, candidates}")->check(CLI::ExistingFile);
  e->add_flag("--ground-truth", ev.ground_truth, "Use the dataset's own integrals as candidates");
  e->add_option("--workers", ev.workers)->check(CLI::Range(1u, 1024u));
  e->add_option("--timeout-seconds", ev.timeout_seconds, "Wall-clock limit per candidate");
  e->add_option("--timeout-steps", ev.timeout_steps, "Step budget per candidate (default mode)");
  e->add_option("--report", ev.report, "JSON report file");

  EnumerateOpts en;
  auto* n = app.add_subcommand("enumerate", "Brute-force search for verified integrals");
  n->add_option("--system", en.system, "x' and y' in Polish notation")->expected(2);
  n->add_option("--dataset", en.dataset, "Write a candidates file for every record")->check(CLI::ExistingFile);
  n->add_option("--out", en.out, "Candidates file (with --dataset)");
  n->add_option("--max-ops", en.max_ops)->check(CLI::Range(0, 4));
  n->add_option("--max-results", en.max_results, "Stop after this many verified (0: all)");
  n->add_option("--seconds", en.seconds, "Wall-clock limit (0: none)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*g) return run_generate(gen, args);
    if (*iv) return run_invert(inv, args);
    if (*tsc) return run_testset(ts, args);
    if (*b) return run_blend(bl, args);
    if (*d) return run_dedup(dd, args);
    if (*s) return run_split(sp, args);
    if (*r) return run_reward(rw);
    if (*v) return run_verify(vf);
    if (*e) return run_eval(ev);
    if (*n) return run_enumerate(en);
  } catch (const UsageError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kUsage;
  } catch (const MalformedRecord& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kUsage;
  } catch (const InsufficientExtras& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kUsage;
  } catch (const std::exception& err) {
    std::cerr << "internal error: " << err.what() << '\n';
    return kInternal;
  }
  return kUsage;
}
