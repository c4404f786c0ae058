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

#include "firstint/simplify.hpp"

#include "firstint/budget.hpp"
#include "firstint/polynomial.hpp"
#include "firstint/rng.hpp"

#include <cmath>
#include <vector>

namespace firstint {

Expr substitute(const Expr& e, const Bindings& bindings) {
  if (bindings.empty()) return e;
  switch (e.kind()) {
    case Expr::Kind::Const: return e;
    case Expr::Kind::Var: {
      auto it = bindings.find(e.var());
      return it == bindings.end() ? e : it->second;
    }
    case Expr::Kind::Unary: return Expr::unary(e.unary_op(), substitute(e.child(), bindings));
    case Expr::Kind::Binary:
      return Expr::binary(e.binary_op(), substitute(e.left(), bindings), substitute(e.right(), bindings));
  }
  return e;
}

namespace {

std::optional<double> finite(double v) {
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<double> real_pow(double b, double e) {
  const bool integral = std::floor(e) == e;
  if (b < 0 && !integral) return std::nullopt;
  if (b == 0 && e < 0) return std::nullopt;
  return finite(std::pow(b, e));
}

}  // namespace

std::optional<double> eval_numeric(const Expr& e, const Point& p) {
  switch (e.kind()) {
    case Expr::Kind::Const: return to_double(e.value());
    case Expr::Kind::Var: return p[static_cast<std::size_t>(e.var())];
    case Expr::Kind::Unary: {
      auto a = eval_numeric(e.child(), p);
      if (!a) return std::nullopt;
      switch (e.unary_op()) {
        case UnaryOp::sin: return finite(std::sin(*a));
        case UnaryOp::cos: return finite(std::cos(*a));
        case UnaryOp::tan: return finite(std::tan(*a));
        case UnaryOp::exp: return finite(std::exp(*a));
        case UnaryOp::log:
          if (*a <= 0) return std::nullopt;
          return finite(std::log(*a));
        case UnaryOp::sqrt:
          if (*a < 0) return std::nullopt;
          return finite(std::sqrt(*a));
        case UnaryOp::neg: return -*a;
      }
      break;
    }
    case Expr::Kind::Binary: {
      auto l = eval_numeric(e.left(), p);
      if (!l) return std::nullopt;
      auto r = eval_numeric(e.right(), p);
      if (!r) return std::nullopt;
      switch (e.binary_op()) {
        case BinaryOp::add: return finite(*l + *r);
        case BinaryOp::sub: return finite(*l - *r);
        case BinaryOp::mul: return finite(*l * *r);
        case BinaryOp::div:
          if (*r == 0) return std::nullopt;
          return finite(*l / *r);
        case BinaryOp::pow: return real_pow(*l, *r);
      }
      break;
    }
  }
  return std::nullopt;
}

namespace {

using canon::CExpr;
using canon::Kind;

// value plus a first-order bound on its absolute rounding error, in units of
// the working precision; the zero test compares |value| against it.
struct Valued {
  double value;
  double scale;
};

// A probe whose error bound overflows says nothing; treat it as out of domain.
std::optional<Valued> bounded(double v, double scale) {
  if (!std::isfinite(v) || !std::isfinite(scale)) return std::nullopt;
  return Valued{v, scale};
}

std::optional<Valued> eval_scaled(const CExpr& c, const Point& p) {
  switch (c.kind()) {
    case Kind::Num: {
      double v = to_double(c.num());
      return Valued{v, std::fabs(v)};
    }
    case Kind::Sym: {
      double v = p[static_cast<std::size_t>(c.sym())];
      return Valued{v, std::fabs(v)};
    }
    case Kind::Fn: {
      auto a = eval_scaled(c.arg(), p);
      if (!a) return std::nullopt;
      std::optional<double> v;
      double slope = 1;  // |f'(a)|
      switch (c.fn()) {
        case canon::Fn::sin:
          v = finite(std::sin(a->value));
          break;
        case canon::Fn::cos:
          v = finite(std::cos(a->value));
          break;
        case canon::Fn::tan:
          v = finite(std::tan(a->value));
          if (v) slope = 1 + *v * *v;
          break;
        case canon::Fn::exp:
          v = finite(std::exp(a->value));
          if (v) slope = *v;
          break;
        case canon::Fn::log:
          if (a->value <= 0) return std::nullopt;
          v = finite(std::log(a->value));
          slope = 1 / a->value;
          break;
      }
      if (!v) return std::nullopt;
      return bounded(*v, std::fabs(*v) + slope * a->scale);
    }
    case Kind::Pow: {
      auto b = eval_scaled(c.base(), p);
      if (!b) return std::nullopt;
      auto e = eval_scaled(c.exponent(), p);
      if (!e) return std::nullopt;
      auto v = real_pow(b->value, e->value);
      if (!v) return std::nullopt;
      double s = std::fabs(*v);
      if (b->value != 0) {
        s += std::fabs(*v) * std::fabs(e->value) * b->scale / std::fabs(b->value);
        if (!c.exponent().is_num()) s += std::fabs(*v) * std::fabs(std::log(std::fabs(b->value))) * e->scale;
      }
      return bounded(*v, s);
    }
    case Kind::Mul: {
      std::vector<Valued> fs;
      fs.reserve(c.ops().size());
      double v = to_double(c.num());
      for (const auto& f : c.ops()) {
        auto fv = eval_scaled(f, p);
        if (!fv) return std::nullopt;
        v *= fv->value;
        fs.push_back(*fv);
      }
      // sum_i scale_i * prod_{j != i} |v_j|
      double s = std::fabs(v);
      for (std::size_t i = 0; i < fs.size(); ++i) {
        double term = std::fabs(to_double(c.num())) * fs[i].scale;
        for (std::size_t j = 0; j < fs.size(); ++j)
          if (j != i) term *= std::fabs(fs[j].value);
        s += term;
      }
      return bounded(v, s);
    }
    case Kind::Add: {
      double v = to_double(c.num());
      double s = std::fabs(v);
      for (const auto& t : c.ops()) {
        auto tv = eval_scaled(t, p);
        if (!tv) return std::nullopt;
        v += tv->value;
        s += tv->scale;
      }
      return bounded(v, s);
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<double> eval_numeric(const canon::CExpr& e, const Point& p) {
  auto v = eval_scaled(e, p);
  if (!v) return std::nullopt;
  return v->value;
}

canon::CExpr simplify(const canon::CExpr& c) {
  if (c.is_num() || c.is(Kind::Sym) || c.is(Kind::Fn)) return c;
  if (auto z = canon::rational_zero(c); z && *z) return canon::num(0);
  return c;
}

Simplified simplify_audited(const Expr& e) {
  canon::DomainAudit audit;
  CExpr c = simplify(canon::from_expr(e));
  return Simplified{canon::to_expr(c), audit.fired()};
}

Expr simplify(const Expr& e) { return simplify_audited(e).expr; }

const char* to_string(Tier t) { return t == Tier::Symbolic ? "symbolic" : "numeric"; }

ZeroTestOutcome zero_test(const canon::CExpr& e, const ZeroTestConfig& cfg) {
  ZeroTestOutcome out;
  if (simplify(e).is_zero()) {
    out.verdict = ZeroTestOutcome::Verdict::Zero;
    out.tier = Tier::Symbolic;
    return out;
  }
  out.tier = Tier::Numeric;
  if (e.is_num()) {
    out.verdict = ZeroTestOutcome::Verdict::NonZero;
    out.tier = Tier::Symbolic;
    return out;
  }
  Rng rng(cfg.seed);
  const std::size_t budget = cfg.resample_factor * cfg.probes;
  for (std::size_t attempt = 0; attempt < budget && out.probes_ok < cfg.probes; ++attempt) {
    budget_tick();
    Point p{rng.uniform(-cfg.box, cfg.box), rng.uniform(-cfg.box, cfg.box), rng.uniform(-cfg.box, cfg.box)};
    auto v = eval_scaled(e, p);
    if (!v) continue;
    ++out.probes_ok;
    double residual = std::fabs(v->value) / (1.0 + v->scale);
    out.worst_residual = std::max(out.worst_residual, residual);
    if (residual > cfg.tol) {
      out.verdict = ZeroTestOutcome::Verdict::NonZero;
      return out;
    }
  }
  out.verdict = out.probes_ok >= cfg.probes ? ZeroTestOutcome::Verdict::Zero : ZeroTestOutcome::Verdict::Inconclusive;
  return out;
}

ZeroTestOutcome zero_test(const Expr& e, const ZeroTestConfig& cfg) { return zero_test(canon::from_expr(e), cfg); }

bool is_identically_zero(const Expr& e, std::size_t probes, double tol, std::uint64_t rng_seed) {
  ZeroTestConfig cfg;
  cfg.probes = probes;
  cfg.tol = tol;
  cfg.seed = rng_seed;
  auto r = zero_test(e, cfg);
  if (r.verdict == ZeroTestOutcome::Verdict::Inconclusive)
    throw Inconclusive("zero test inconclusive: " + std::to_string(r.probes_ok) + " of " + std::to_string(probes) +
                       " probe points in domain");
  return r.zero();
}

}  // namespace firstint
