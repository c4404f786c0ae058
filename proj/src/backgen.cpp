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

#include "firstint/backgen.hpp"

#include "firstint/budget.hpp"
#include "firstint/canonical.hpp"
#include "firstint/digest.hpp"
#include "firstint/notation.hpp"
#include "firstint/polynomial.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

namespace firstint {

void SamplerConfig::validate() const {
  if (min_ops < 0 || min_ops > max_ops) throw std::invalid_argument("SamplerConfig: empty operator range");
  if (!(leaf_var_prob >= 0 && leaf_var_prob <= 1)) throw std::invalid_argument("SamplerConfig: leaf_var_prob not in [0,1]");
  double u = 0, b = 0;
  for (double w : unary_weights) {
    if (!(w >= 0)) throw std::invalid_argument("SamplerConfig: negative operator weight");
    u += w;
  }
  for (double w : binary_weights) {
    if (!(w >= 0)) throw std::invalid_argument("SamplerConfig: negative operator weight");
    b += w;
  }
  if (max_ops > 0 && u + b <= 0) throw std::invalid_argument("SamplerConfig: all operator weights are zero");
  if (max_attempts < 1) throw std::invalid_argument("SamplerConfig: max_attempts < 1");
}

std::string SamplerConfig::digest() const {
  std::string s;
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g;", v);
    s += buf;
  };
  put(min_ops);
  put(max_ops);
  put(leaf_var_prob);
  for (double w : unary_weights) put(w);
  for (double w : binary_weights) put(w);
  put(static_cast<double>(max_attempts));
  s += std::to_string(rng_seed);
  return sha256_hex(s).substr(0, 16);
}

namespace {

// D(e, n): weighted count of unary-binary trees with n operators hanging off
// e empty slots. D(0, n) = 0, D(e, 0) = 1,
// D(e, n) = D(e - 1, n) + p1 D(e, n - 1) + p2 D(e + 1, n - 1).
class TreeCounts {
 public:
  TreeCounts(int max_ops, double p1, double p2) : rows_(2 * max_ops + 3), cols_(max_ops + 1), d_(rows_ * cols_, 0.0) {
    for (int e = 1; e < rows_; ++e) at(e, 0) = 1;
    for (int n = 1; n < cols_; ++n)
      for (int e = 1; e + 1 < rows_; ++e) at(e, n) = at(e - 1, n) + p1 * at(e, n - 1) + p2 * at(e + 1, n - 1);
  }
  double operator()(int e, int n) const { return d_[static_cast<std::size_t>(e * cols_ + n)]; }

 private:
  double& at(int e, int n) { return d_[static_cast<std::size_t>(e * cols_ + n)]; }
  int rows_, cols_;
  std::vector<double> d_;
};

Expr sample_leaf(const SamplerConfig& cfg, Rng& rng) {
  if (rng.bernoulli(cfg.leaf_var_prob)) return Expr::variable(static_cast<VarId>(rng.below(3)));
  long v = rng.range(1, 9);
  return Expr::integer(rng.bernoulli(0.5) ? v : -v);
}

struct Slot {
  int arity = 0;  // 0 for a leaf
  std::uint8_t op = 0;
  Expr leaf;
};

Expr build(const std::vector<Slot>& slots, std::size_t& pos) {
  const Slot& s = slots[pos++];
  if (s.arity == 0) return s.leaf;
  if (s.arity == 1) return Expr::unary(static_cast<UnaryOp>(s.op), build(slots, pos));
  Expr l = build(slots, pos);
  Expr r = build(slots, pos);
  return Expr::binary(static_cast<BinaryOp>(s.op), std::move(l), std::move(r));
}

double sum(const auto& ws) {
  double s = 0;
  for (double w : ws) s += w;
  return s;
}

bool acceptable_integral(const Expr& s) {
  return !s.is_const() && !(s.variables() & VarSet{VarId::x, VarId::y}).empty();
}

}  // namespace

Expr sample_tree(const SamplerConfig& cfg, int ops, Rng& rng) {
  if (ops < 0) throw std::invalid_argument("sample_tree: negative operator count");
  const double p1 = sum(cfg.unary_weights);
  const double p2 = sum(cfg.binary_weights);
  const TreeCounts d(ops, p1, p2);
  const std::vector<double> unary(cfg.unary_weights.begin(), cfg.unary_weights.end());
  const std::vector<double> binary(cfg.binary_weights.begin(), cfg.binary_weights.end());

  std::vector<Slot> slots;
  int e = 1;
  for (int n = ops; n > 0; --n) {
    // Choose (k, a): the next operator lands after k leaves and has arity a.
    std::vector<double> probs;
    probs.reserve(static_cast<std::size_t>(2 * e));
    for (int k = 0; k < e; ++k) {
      probs.push_back(p1 * d(e - k, n - 1));
      probs.push_back(p2 * d(e - k + 1, n - 1));
    }
    const std::size_t pick = rng.weighted(probs);
    const int k = static_cast<int>(pick / 2);
    const int a = static_cast<int>(pick % 2) + 1;
    for (int i = 0; i < k; ++i) slots.push_back({0, 0, sample_leaf(cfg, rng)});
    const std::size_t op = rng.weighted(a == 1 ? unary : binary);
    slots.push_back({a, static_cast<std::uint8_t>(op), Expr()});
    e = e - k - 1 + a;
  }
  for (int i = 0; i < e; ++i) slots.push_back({0, 0, sample_leaf(cfg, rng)});
  std::size_t pos = 0;
  return build(slots, pos);
}

SampledIntegral sample_integral_detailed(const SamplerConfig& cfg, Rng& rng) {
  SampledIntegral out;
  out.ops = static_cast<int>(rng.range(cfg.min_ops, cfg.max_ops));
  for (out.attempts = 1; out.attempts <= cfg.max_attempts; ++out.attempts) {
    out.raw = sample_tree(cfg, out.ops, rng);
    out.integral = simplify(out.raw);
    if (acceptable_integral(out.integral)) return out;
  }
  throw SampleBudgetExhausted("no acceptable integral with " + std::to_string(out.ops) + " operators after " +
                              std::to_string(cfg.max_attempts) + " draws");
}

Expr sample_integral(const SamplerConfig& cfg, Rng& rng) { return sample_integral_detailed(cfg, rng).integral; }

SeedSpec SeedSpec::with_x_dot_y(const Expr& integral) {
  SeedSpec s;
  s.m = 1;
  s.prescribed_rhs[VarId::x] = vars::y();
  s.external = {integral};
  return s;
}

const char* to_string(RejectReason r) {
  switch (r) {
    case RejectReason::SingularJb: return "singular_jb";
    case RejectReason::Underdetermined: return "underdetermined";
    case RejectReason::SimplificationBlowup: return "simplification_blowup";
    case RejectReason::Decoupled: return "decoupled";
    case RejectReason::ConstantIntegral: return "constant_integral";
    case RejectReason::VerificationInconclusive: return "verification_inconclusive";
    case RejectReason::SampleBudgetExhausted: return "sample_budget_exhausted";
  }
  return "unknown";
}

namespace {

using canon::CExpr;

struct Blowup {
  std::string where;
};
struct InconclusivePivot {};

bool zero(const CExpr& c) {
  ZeroTestOutcome z = zero_test(c, ZeroTestConfig{});
  if (z.verdict == ZeroTestOutcome::Verdict::Inconclusive) throw InconclusivePivot{};
  return z.zero();
}

}  // namespace

std::variant<OdeSystem, Rejection> invert(const std::vector<Expr>& integrals, const SeedSpec& spec,
                                          const InvertOptions& opt) {
  const std::vector<VarId> state{VarId::x, VarId::y};
  const std::size_t n = state.size();
  const std::size_t m = spec.m;
  if (m < 1 || m > n) throw std::invalid_argument("invert: m must be 1 or 2");
  if (integrals.size() != m) throw std::invalid_argument("invert: expected " + std::to_string(m) + " integrals");
  if (spec.prescribed_rhs.size() != n - m) throw std::invalid_argument("invert: expected n - m prescribed equations");
  std::vector<VarId> xa, xb;
  for (VarId v : state) (spec.prescribed_rhs.count(v) ? xa : xb).push_back(v);
  if (xa.size() != n - m) throw std::invalid_argument("invert: prescribed variables must be state variables");

  const VarSet allowed = VarSet::all();
  std::vector<CExpr> fa;
  for (VarId v : xa) fa.push_back(canon::from_expr(spec.prescribed_rhs.at(v)));

  auto shrink = [&](const CExpr& c, const char* where) {
    CExpr s = simplify(canon::cancel(c));
    if (s.size() > opt.node_cap) throw Blowup{where};
    return s;
  };

  try {
    // Augmented system [Jb | r] with r = -(Ja dx_a/dt + dV/dt).
    std::vector<std::vector<CExpr>> a(m, std::vector<CExpr>(m + 1));
    for (std::size_t i = 0; i < m; ++i) {
      if (!integrals[i].variables().subset_of(allowed)) throw UnknownVariable("invert: unknown variable");
      CExpr v = canon::from_expr(integrals[i]);
      for (std::size_t j = 0; j < m; ++j) a[i][j] = shrink(canon::diff(v, xb[j]), "jacobian");
      std::vector<CExpr> parts{canon::diff(v, VarId::t)};
      for (std::size_t j = 0; j < xa.size(); ++j) parts.push_back(canon::mul(canon::diff(v, xa[j]), fa[j]));
      a[i][m] = shrink(canon::neg(canon::add(std::move(parts))), "right-hand side");
    }

    // Fraction-free (Bareiss) elimination with row pivoting.
    CExpr prev = canon::num(1);
    std::size_t rank = 0;
    for (std::size_t col = 0; col < m && rank < m; ++col) {
      std::size_t p = rank;
      while (p < m && zero(a[p][col])) ++p;
      if (p == m) continue;
      std::swap(a[p], a[rank]);
      for (std::size_t i = rank + 1; i < m; ++i) {
        for (std::size_t j = col + 1; j <= m; ++j) {
          CExpr cross = canon::sub(canon::mul(a[rank][col], a[i][j]), canon::mul(a[i][col], a[rank][j]));
          a[i][j] = shrink(canon::div(cross, prev), "elimination");
        }
        a[i][col] = canon::num(0);
      }
      prev = a[rank][col];
      ++rank;
    }
    if (rank < m) {
      for (std::size_t i = rank; i < m; ++i)
        if (!zero(a[i][m])) return Rejection{RejectReason::SingularJb, "inconsistent after elimination"};
      return Rejection{RejectReason::Underdetermined,
                       "rank " + std::to_string(rank) + " < " + std::to_string(m) + " leaves free components"};
    }

    std::vector<CExpr> u(m);
    for (std::size_t r = m; r-- > 0;) {
      std::vector<CExpr> acc{a[r][m]};
      for (std::size_t j = r + 1; j < m; ++j) acc.push_back(canon::neg(canon::mul(a[r][j], u[j])));
      u[r] = shrink(canon::div(canon::add(std::move(acc)), a[r][r]), "back substitution");
    }

    std::vector<Expr> rhs(n);
    for (std::size_t j = 0; j < xa.size(); ++j)
      rhs[static_cast<std::size_t>(xa[j])] = spec.prescribed_rhs.at(xa[j]);
    for (std::size_t j = 0; j < m; ++j) {
      Expr e = canon::to_expr(u[j]);
      if (e.node_count() > opt.node_cap) throw Blowup{"result"};
      rhs[static_cast<std::size_t>(xb[j])] = e;
    }
    return OdeSystem(state, std::move(rhs));
  } catch (const Blowup& b) {
    return Rejection{RejectReason::SimplificationBlowup, std::string("node cap exceeded in ") + b.where};
  } catch (const canon::PolyOverflow& e) {
    return Rejection{RejectReason::SimplificationBlowup, e.what()};
  } catch (const InconclusivePivot&) {
    return Rejection{RejectReason::VerificationInconclusive, "pivot zero test inconclusive"};
  }
}

bool filter_nontrivial(const OdeSystem& sys) {
  for (std::size_t i = 0; i < sys.size(); ++i) {
    Expr s = simplify(sys.rhs[i]);
    if (s.is_const()) return false;
    if (s.variables().subset_of(VarSet{sys.state_vars[i], VarId::t})) return false;
  }
  return true;
}

std::variant<IntegralPair, Rejection> generate_pair(const SeedSpec& spec, const SamplerConfig& cfg, Rng& rng,
                                                    const GenerateOptions& opt) {
  Budget budget = opt.step_budget ? Budget::steps(opt.step_budget) : Budget::unlimited();
  ScopedBudget scope(budget);
  canon::DomainAudit audit;
  try {
    std::vector<Expr> integrals = spec.external;
    if (integrals.empty()) {
      try {
        for (std::size_t i = 0; i < spec.m; ++i) integrals.push_back(sample_integral(cfg, rng));
      } catch (const SampleBudgetExhausted& e) {
        return Rejection{RejectReason::SampleBudgetExhausted, e.what()};
      }
    }
    auto inv = invert(integrals, spec, opt.invert);
    if (auto* r = std::get_if<Rejection>(&inv)) return *r;
    OdeSystem sys = std::get<OdeSystem>(std::move(inv));
    if (!filter_nontrivial(sys)) return Rejection{RejectReason::Decoupled, "decoupled or constant equation"};

    IntegralPair pair;
    pair.meta.sampler_digest = cfg.digest();
    for (const Expr& v : integrals) {
      Verification ver;
      try {
        ver = verify_first_integral(v, sys, opt.zero_test);
      } catch (const Inconclusive& e) {
        return Rejection{RejectReason::VerificationInconclusive, e.what()};
      }
      if (ver.constant) return Rejection{RejectReason::ConstantIntegral, polish_string(v)};
      if (!ver.verdict)
        throw InternalVerificationFailure("generated integral fails verification: V = " + polish_string(v) +
                                          "; f = " + polish_string(sys.rhs[0]) + "; g = " + polish_string(sys.rhs[1]) +
                                          "; dV/dt = " + polish_string(ver.witness));
      if (ver.tier == Tier::Numeric) pair.meta.tier = Tier::Numeric;
      pair.meta.integral_stats.push_back(stats(v));
    }
    pair.meta.domain_enlarged = audit.fired();
    pair.system = std::move(sys);
    pair.integrals = std::move(integrals);
    return pair;
  } catch (const BudgetExceeded&) {
    return Rejection{RejectReason::SimplificationBlowup, "step budget exceeded"};
  } catch (const canon::PolyOverflow& e) {
    return Rejection{RejectReason::SimplificationBlowup, e.what()};
  }
}

SeedSpec random_seed_spec(const SamplerConfig& cfg, Rng& rng) {
  SeedSpec s;
  s.m = 1;
  const VarId xa = rng.bernoulli(0.5) ? VarId::x : VarId::y;
  s.prescribed_rhs[xa] = sample_integral(cfg, rng);
  return s;
}

BatchResult generate_batch(const BatchConfig& cfg) {
  cfg.sampler.validate();
  const std::size_t count = cfg.count;
  std::vector<std::optional<IntegralPair>> slots(count);
  std::vector<RejectionCounts> counts(count, RejectionCounts{});
  std::vector<std::uint64_t> predicate(count, 0);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::atomic<bool> stop{false};

  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count || stop.load()) return;
      try {
        const std::uint64_t seed = derive_seed(cfg.master_seed, i);
        Rng rng(seed);
        for (int attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
          SeedSpec spec;
          try {
            Budget budget = cfg.options.step_budget ? Budget::steps(cfg.options.step_budget) : Budget::unlimited();
            ScopedBudget scope(budget);
            spec = cfg.make_spec ? cfg.make_spec(cfg.sampler, rng) : random_seed_spec(cfg.sampler, rng);
          } catch (const SampleBudgetExhausted&) {
            ++counts[i][static_cast<std::size_t>(RejectReason::SampleBudgetExhausted)];
            continue;
          } catch (const BudgetExceeded&) {
            ++counts[i][static_cast<std::size_t>(RejectReason::SimplificationBlowup)];
            continue;
          }
          auto r = generate_pair(spec, cfg.sampler, rng, cfg.options);
          if (auto* rej = std::get_if<Rejection>(&r)) {
            ++counts[i][static_cast<std::size_t>(rej->reason)];
            continue;
          }
          IntegralPair& pair = std::get<IntegralPair>(r);
          if (cfg.accept && !cfg.accept(pair)) {
            ++predicate[i];
            continue;
          }
          pair.meta.seed = seed;
          pair.meta.attempts = attempt;
          slots[i] = std::move(pair);
          break;
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        stop.store(true);
        return;
      }
    }
  };

  const unsigned workers = std::max(1u, cfg.workers);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  BatchResult out;
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t k = 0; k < kRejectReasonCount; ++k) out.rejections[k] += counts[i][k];
    out.predicate_rejections += predicate[i];
    if (slots[i])
      out.pairs.push_back(std::move(*slots[i]));
    else
      ++out.exhausted;
  }
  return out;
}

OdeSystem sample_family(const FamilyParams& p) {
  for (int v : {p.a, p.b, p.c, p.d, p.e, p.f})
    if (v < -9 || v > 9) throw std::invalid_argument("sample_family: coefficients must be single digits");
  if (p.d == 0 && p.e == 0 && p.f == 0) throw DegenerateDenominator("sample_family: D = E = F = 0");
  using vars::t;
  using vars::x;
  Expr numer = num(p.a) * x() + num(p.b) * t() + num(p.c);
  Expr denom = num(p.d) * x() + num(p.e) * t() + num(p.f);
  return OdeSystem::planar(vars::y(), simplify(numer / denom));
}

FamilyParams sample_family_params(Rng& rng) {
  FamilyParams p;
  do {
    p.a = static_cast<int>(rng.range(-9, 9));
    p.b = static_cast<int>(rng.range(-9, 9));
    p.c = static_cast<int>(rng.range(-9, 9));
    p.d = static_cast<int>(rng.range(-9, 9));
    p.e = static_cast<int>(rng.range(-9, 9));
    p.f = static_cast<int>(rng.range(-9, 9));
  } while (p.d == 0 && p.e == 0 && p.f == 0);
  return p;
}

OdeSystem sample_family(Rng& rng) { return sample_family(sample_family_params(rng)); }

}  // namespace firstint
