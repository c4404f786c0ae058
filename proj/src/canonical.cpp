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

#include "firstint/canonical.hpp"

#include "firstint/budget.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace firstint::canon {

namespace {

constexpr std::uint64_t kPrime = 0x100000001b3ULL;

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h * kPrime;
}

std::uint64_t hash_rational(const Rational& q) {
  std::uint64_t h = static_cast<std::uint64_t>(sgn(q) + 2);
  const mpz_class& n = q.get_num();
  const mpz_class& d = q.get_den();
  h = mix(h, mpz_size(n.get_mpz_t()) ? mpz_getlimbn(n.get_mpz_t(), 0) : 0);
  h = mix(h, mpz_getlimbn(d.get_mpz_t(), 0));
  h = mix(h, mpz_size(n.get_mpz_t()));
  return h;
}

int kind_rank(Kind k) { return static_cast<int>(k); }

thread_local std::uint64_t domain_events = 0;

// Restricted: the natural domain is not all of R^3 (log, tan, negative,
// fractional or symbolic powers somewhere inside).
bool restricted(const CExpr& c);

}  // namespace

void note_domain_change() { ++domain_events; }

DomainAudit::DomainAudit() : start_(domain_events) {}
DomainAudit::~DomainAudit() = default;
bool DomainAudit::fired() const { return domain_events != start_; }

CExpr::CExpr() : CExpr(canon::num(Rational(0))) {}

CExpr CExpr::make(Kind k, std::uint8_t tag, Rational q, std::vector<CExpr> ops) {
  budget_tick();
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->tag = tag;
  std::uint64_t h = mix(0xcbf29ce484222325ULL, static_cast<std::uint64_t>(k));
  h = mix(h, tag);
  if (k == Kind::Num || k == Kind::Mul || k == Kind::Add) h = mix(h, hash_rational(q));
  if (k == Kind::Sym) n->vars = static_cast<std::uint8_t>(1u << tag);
  for (const auto& op : ops) {
    h = mix(h, op.hash());
    n->size += op.size();
    n->vars |= op.node_->vars;
  }
  n->hash = h;
  n->num = std::move(q);
  n->ops = std::move(ops);
  return CExpr(std::move(n));
}

bool operator==(const CExpr& a, const CExpr& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.size() != b.size()) return false;
  return compare(a, b) == 0;
}

int compare(const CExpr& a, const CExpr& b) {
  if (&a == &b) return 0;
  if (a.kind() != b.kind()) return kind_rank(a.kind()) < kind_rank(b.kind()) ? -1 : 1;
  switch (a.kind()) {
    case Kind::Num: return cmp(a.num(), b.num()) < 0 ? -1 : (cmp(a.num(), b.num()) > 0 ? 1 : 0);
    case Kind::Sym:
      return a.sym() == b.sym() ? 0 : (static_cast<int>(a.sym()) < static_cast<int>(b.sym()) ? -1 : 1);
    case Kind::Fn:
      if (a.fn() != b.fn()) return static_cast<int>(a.fn()) < static_cast<int>(b.fn()) ? -1 : 1;
      return compare(a.arg(), b.arg());
    case Kind::Pow: {
      int c = compare(a.base(), b.base());
      return c != 0 ? c : compare(a.exponent(), b.exponent());
    }
    case Kind::Mul:
    case Kind::Add: {
      auto ao = a.ops();
      auto bo = b.ops();
      std::size_t n = std::min(ao.size(), bo.size());
      for (std::size_t i = 0; i < n; ++i) {
        int c = compare(ao[i], bo[i]);
        if (c != 0) return c;
      }
      if (ao.size() != bo.size()) return ao.size() < bo.size() ? -1 : 1;
      int c = cmp(a.num(), b.num());
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
  }
  return 0;
}

CExpr num(Rational q) {
  q.canonicalize();
  return CExpr::make(Kind::Num, 0, std::move(q), {});
}

CExpr sym(VarId v) { return CExpr::make(Kind::Sym, static_cast<std::uint8_t>(v), Rational(0), {}); }

CExpr raw_fn(Fn f, CExpr arg) {
  return CExpr::make(Kind::Fn, static_cast<std::uint8_t>(f), Rational(0), {std::move(arg)});
}

CExpr raw_pow(CExpr base, CExpr exponent) {
  return CExpr::make(Kind::Pow, 0, Rational(0), {std::move(base), std::move(exponent)});
}

CExpr raw_mul(Rational coef, std::vector<CExpr> factors) {
  return CExpr::make(Kind::Mul, 0, std::move(coef), std::move(factors));
}

CExpr raw_add(Rational constant, std::vector<CExpr> terms) {
  return CExpr::make(Kind::Add, 0, std::move(constant), std::move(terms));
}

namespace {

bool restricted(const CExpr& c) {
  switch (c.kind()) {
    case Kind::Num:
    case Kind::Sym: return false;
    case Kind::Fn:
      if (c.fn() == Fn::log || c.fn() == Fn::tan) return true;
      return restricted(c.arg());
    case Kind::Pow: {
      const CExpr& e = c.exponent();
      if (!e.is_num() || e.num() < 0 || !is_integer(e.num())) return true;
      return restricted(c.base());
    }
    case Kind::Mul:
    case Kind::Add:
      for (const auto& op : c.ops())
        if (restricted(op)) return true;
      return false;
  }
  return false;
}

// Exact folding of b^q is skipped when the result would be enormous.
bool foldable_power(const Rational& b, const Rational& q) {
  constexpr double kMaxBits = 4096;
  if (!q.get_num().fits_slong_p() || !q.get_den().fits_slong_p()) return false;
  const double bits = static_cast<double>(mpz_sizeinbase(b.get_num_mpz_t(), 2) + mpz_sizeinbase(b.get_den_mpz_t(), 2));
  return bits * std::fabs(q.get_d()) <= kMaxBits;
}

bool exponent_restricts(const CExpr& e) { return !e.is_num() || e.num() < 0 || !is_integer(e.num()); }

// c * key, where key is a coefficient-free term.
CExpr scale(const CExpr& key, const Rational& c) {
  if (c == 1) return key;
  if (key.is(Kind::Mul)) return raw_mul(c, std::vector<CExpr>(key.ops().begin(), key.ops().end()));
  return raw_mul(c, {key});
}

// Factor list of a coefficient-free term.
std::vector<CExpr> factors_of(const CExpr& key) {
  if (key.is(Kind::Mul)) return {key.ops().begin(), key.ops().end()};
  return {key};
}

using TermMap = std::map<CExpr, Rational, Less>;

// c1*sin(a)^2*M + c2*cos(a)^2*M  ->  c2*M + (c1 - c2)*sin(a)^2*M
bool apply_pythagoras(TermMap& terms, Rational& constant) {
  for (auto& [key, c1] : terms) {
    if (c1 == 0) continue;
    auto fs = factors_of(key);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const CExpr& f = fs[i];
      if (!f.is(Kind::Pow) || !f.exponent().is_num(2) || !f.base().is(Kind::Fn) || f.base().fn() != Fn::sin)
        continue;
      std::vector<CExpr> rest;
      for (std::size_t j = 0; j < fs.size(); ++j)
        if (j != i) rest.push_back(fs[j]);
      CExpr m = mul(rest);
      std::vector<CExpr> with_cos = rest;
      with_cos.push_back(raw_pow(raw_fn(Fn::cos, f.base().arg()), num(2)));
      CExpr cos_key = mul(with_cos);
      auto it = terms.find(cos_key);
      if (it == terms.end() || it->second == 0) continue;
      Rational c2 = it->second;
      it->second = 0;
      c1 -= c2;
      auto [mc, mkey] = split_coefficient(m);
      if (mkey.is_num())
        constant += c2 * mc * mkey.num();
      else
        terms[mkey] += c2 * mc;
      return true;
    }
  }
  return false;
}

}  // namespace

std::pair<Rational, CExpr> split_coefficient(const CExpr& term) {
  if (term.is_num()) return {term.num(), num(1)};
  if (!term.is(Kind::Mul)) return {Rational(1), term};
  auto ops = term.ops();
  if (ops.size() == 1) return {term.num(), ops[0]};
  if (term.num() == 1) return {Rational(1), term};
  return {term.num(), raw_mul(Rational(1), std::vector<CExpr>(ops.begin(), ops.end()))};
}

std::pair<CExpr, CExpr> split_power(const CExpr& factor) {
  if (factor.is(Kind::Pow)) return {factor.base(), factor.exponent()};
  return {factor, num(1)};
}

CExpr add(std::vector<CExpr> operands) {
  Rational constant = 0;
  TermMap terms;
  auto push = [&](const CExpr& t) {
    auto [c, key] = split_coefficient(t);
    terms[key] += c;
  };
  for (const auto& op : operands) {
    switch (op.kind()) {
      case Kind::Num: constant += op.num(); break;
      case Kind::Add:
        constant += op.num();
        for (const auto& t : op.ops()) push(t);
        break;
      default: push(op);
    }
  }
  for (int guard = 0; guard < 64 && apply_pythagoras(terms, constant); ++guard) {
  }

  std::vector<CExpr> out;
  out.reserve(terms.size());
  for (const auto& [key, c] : terms) {
    if (c == 0) {
      if (restricted(key)) note_domain_change();
      continue;
    }
    out.push_back(scale(key, c));
  }
  if (out.empty()) return num(constant);
  if (out.size() == 1 && constant == 0) return out.front();
  std::sort(out.begin(), out.end(), Less{});
  return raw_add(constant, std::move(out));
}

CExpr mul(std::vector<CExpr> operands) {
  Rational coef = 1;
  std::vector<CExpr> flat;
  for (const auto& op : operands) {
    if (op.is_num()) {
      coef *= op.num();
    } else if (op.is(Kind::Mul)) {
      coef *= op.num();
      flat.insert(flat.end(), op.ops().begin(), op.ops().end());
    } else {
      flat.push_back(op);
    }
  }
  if (coef == 0) {
    for (const auto& f : flat)
      if (restricted(f)) {
        note_domain_change();
        break;
      }
    return num(0);
  }

  std::map<CExpr, std::vector<CExpr>, Less> groups;
  std::vector<CExpr> exp_args;
  for (const auto& f : flat) {
    auto [b, e] = split_power(f);
    if (b.is(Kind::Fn) && b.fn() == Fn::exp)
      exp_args.push_back(mul(b.arg(), e));
    else
      groups[b].push_back(e);
  }
  if (!exp_args.empty()) {
    CExpr merged = fn(Fn::exp, add(std::move(exp_args)));
    if (merged.is_num())
      coef *= merged.num();
    else
      groups[merged].push_back(num(1));
  }

  std::vector<CExpr> factors;
  for (auto& [b, es] : groups) {
    CExpr e = es.front();
    if (es.size() > 1) {
      if (std::any_of(es.begin(), es.end(), exponent_restricts)) note_domain_change();
      e = add(es);
    }
    CExpr p = pow(b, e);
    if (p.is_num()) {
      coef *= p.num();
    } else if (p.is(Kind::Mul)) {
      coef *= p.num();
      factors.insert(factors.end(), p.ops().begin(), p.ops().end());
    } else {
      factors.push_back(p);
    }
  }
  if (coef == 0) return num(0);
  if (factors.empty()) return num(coef);
  if (factors.size() == 1) {
    if (coef == 1) return factors.front();
    if (factors.front().is(Kind::Add)) {
      const CExpr& s = factors.front();
      std::vector<CExpr> parts;
      parts.push_back(num(coef * s.num()));
      for (const auto& t : s.ops()) {
        auto [c, key] = split_coefficient(t);
        parts.push_back(scale(key, c * coef));
      }
      return add(std::move(parts));
    }
  }
  std::sort(factors.begin(), factors.end(), Less{});
  return raw_mul(coef, std::move(factors));
}

CExpr pow(const CExpr& base, const CExpr& exponent) {
  if (exponent.is_num()) {
    const Rational& q = exponent.num();
    if (q == 0) {
      if (!base.is_num()) note_domain_change();
      return num(1);
    }
    if (q == 1) return base;
  }
  switch (base.kind()) {
    case Kind::Num: {
      const Rational& b = base.num();
      if (b == 1) return num(1);
      if (!exponent.is_num()) return raw_pow(base, exponent);
      const Rational& q = exponent.num();
      // Every negative power of 0 is undefined; keep one representative.
      if (b == 0) return q > 0 ? num(0) : raw_pow(base, num(-1));
      if (!foldable_power(b, q)) return raw_pow(base, exponent);
      if (is_integer(q)) return num(pow_int(b, q.get_num().get_si()));
      if (b < 0) return raw_pow(base, exponent);
      if (auto root = exact_root(b, q.get_den().get_ui())) return num(pow_int(*root, q.get_num().get_si()));
      mpz_class whole;
      mpz_fdiv_q(whole.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
      Rational frac = q - Rational(whole);
      CExpr kernel = raw_pow(base, num(frac));
      if (whole == 0) return kernel;
      return raw_mul(pow_int(b, whole.get_si()), {kernel});
    }
    case Kind::Fn:
      if (base.fn() == Fn::exp) return fn(Fn::exp, mul(base.arg(), exponent));
      return raw_pow(base, exponent);
    case Kind::Pow:
      if (exponent.is_num() && is_integer(exponent.num())) {
        if (exponent_restricts(base.exponent())) note_domain_change();
        return pow(base.base(), mul(base.exponent(), exponent));
      }
      return raw_pow(base, exponent);
    case Kind::Mul: {
      if (!exponent.is_num()) return raw_pow(base, exponent);
      if (is_integer(exponent.num())) {
        std::vector<CExpr> parts;
        parts.push_back(pow(num(base.num()), exponent));
        for (const auto& f : base.ops()) parts.push_back(pow(f, exponent));
        return mul(std::move(parts));
      }
      if (base.num() > 0 && base.num() != 1) {
        CExpr rest = raw_mul(Rational(1), std::vector<CExpr>(base.ops().begin(), base.ops().end()));
        if (base.ops().size() == 1) rest = base.ops()[0];
        return mul(pow(num(base.num()), exponent), pow(rest, exponent));
      }
      return raw_pow(base, exponent);
    }
    default: return raw_pow(base, exponent);
  }
}

CExpr fn(Fn f, const CExpr& a) {
  const bool negated = a.is(Kind::Mul) && a.num() < 0;
  switch (f) {
    case Fn::sin:
      if (a.is_zero()) return num(0);
      if (negated) return neg(fn(Fn::sin, neg(a)));
      break;
    case Fn::cos:
      if (a.is_zero()) return num(1);
      if (negated) return fn(Fn::cos, neg(a));
      break;
    case Fn::tan:
      if (a.is_zero()) return num(0);
      if (negated) return neg(fn(Fn::tan, neg(a)));
      break;
    case Fn::exp:
      if (a.is_zero()) return num(1);
      break;
    case Fn::log:
      if (a.is_num(1)) return num(0);
      if (a.is(Kind::Fn) && a.fn() == Fn::exp) return a.arg();
      if (a.is(Kind::Mul) && a.num() > 0) {
        note_domain_change();
        std::vector<CExpr> parts;
        if (a.num() != 1) parts.push_back(raw_fn(Fn::log, num(a.num())));
        for (const auto& factor : a.ops()) parts.push_back(fn(Fn::log, factor));
        return add(std::move(parts));
      }
      break;
  }
  return raw_fn(f, a);
}

CExpr neg(const CExpr& a) { return mul(num(-1), a); }
CExpr sub(const CExpr& a, const CExpr& b) { return add(a, neg(b)); }
CExpr div(const CExpr& a, const CExpr& b) { return mul(a, pow(b, num(-1))); }
CExpr sqrt(const CExpr& a) { return pow(a, num(Rational(1, 2))); }

// ---- conversion ------------------------------------------------------------

CExpr from_expr(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Const: return num(e.value());
    case Expr::Kind::Var: return sym(e.var());
    case Expr::Kind::Unary: {
      CExpr a = from_expr(e.child());
      switch (e.unary_op()) {
        case UnaryOp::sin: return fn(Fn::sin, a);
        case UnaryOp::cos: return fn(Fn::cos, a);
        case UnaryOp::tan: return fn(Fn::tan, a);
        case UnaryOp::exp: return fn(Fn::exp, a);
        case UnaryOp::log: return fn(Fn::log, a);
        case UnaryOp::sqrt: return sqrt(a);
        case UnaryOp::neg: return neg(a);
      }
      break;
    }
    case Expr::Kind::Binary: {
      CExpr l = from_expr(e.left());
      CExpr r = from_expr(e.right());
      switch (e.binary_op()) {
        case BinaryOp::add: return add(l, r);
        case BinaryOp::sub: return sub(l, r);
        case BinaryOp::mul: return mul(l, r);
        case BinaryOp::div: return div(l, r);
        case BinaryOp::pow: return pow(l, r);
      }
      break;
    }
  }
  return num(0);
}

namespace {

bool is_negative_exponent(const CExpr& e) {
  return (e.is_num() && e.num() < 0) || (e.is(Kind::Mul) && e.num() < 0);
}

UnaryOp unary_of(Fn f) {
  switch (f) {
    case Fn::sin: return UnaryOp::sin;
    case Fn::cos: return UnaryOp::cos;
    case Fn::tan: return UnaryOp::tan;
    case Fn::exp: return UnaryOp::exp;
    case Fn::log: return UnaryOp::log;
  }
  return UnaryOp::sin;
}

Expr power_expr(const CExpr& b, const CExpr& e);

Expr fold_product(std::vector<Expr> fs) {
  Expr acc = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) acc = Expr::binary(BinaryOp::mul, acc, fs[i]);
  return acc;
}

Expr power_expr(const CExpr& b, const CExpr& e) {
  if (e.is_num(1)) return to_expr(b);
  if (e.is_num() && e.num() == Rational(1, 2)) return Expr::unary(UnaryOp::sqrt, to_expr(b));
  if (is_negative_exponent(e)) return Expr::binary(BinaryOp::div, Expr::integer(1), power_expr(b, neg(e)));
  return Expr::binary(BinaryOp::pow, to_expr(b), to_expr(e));
}

}  // namespace

Expr to_expr(const CExpr& c) {
  switch (c.kind()) {
    case Kind::Num: return Expr::constant(c.num());
    case Kind::Sym: return Expr::variable(c.sym());
    case Kind::Fn: return Expr::unary(unary_of(c.fn()), to_expr(c.arg()));
    case Kind::Pow: return power_expr(c.base(), c.exponent());
    case Kind::Mul: {
      std::vector<Expr> numer, denom;
      bool sum_first = false;
      for (const auto& f : c.ops()) {
        auto [b, e] = split_power(f);
        if (is_negative_exponent(e)) {
          denom.push_back(power_expr(b, neg(e)));
        } else {
          if (numer.empty()) sum_first = f.is(Kind::Add);
          numer.push_back(to_expr(f));
        }
      }
      // c*(a + b) re-reads as a distributed sum, so keep the coefficient
      // outside the whole product when a sum would come first.
      // A coefficient of -1 prints as a negated product.
      const Rational coef = c.num() == -1 ? Rational(1) : c.num();
      const bool outer_coef = coef != 1 && sum_first;
      if (coef != 1 && !outer_coef) numer.insert(numer.begin(), Expr::constant(coef));
      if (numer.empty()) numer.push_back(Expr::integer(1));
      Expr body = fold_product(std::move(numer));
      if (!denom.empty()) body = Expr::binary(BinaryOp::div, body, fold_product(std::move(denom)));
      if (outer_coef) body = Expr::binary(BinaryOp::mul, Expr::constant(coef), body);
      return c.num() == -1 ? Expr::unary(UnaryOp::neg, body) : body;
    }
    case Kind::Add: {
      auto terms = c.ops();
      Expr acc = to_expr(terms[0]);
      for (std::size_t i = 1; i < terms.size(); ++i) {
        auto [coef, key] = split_coefficient(terms[i]);
        if (coef < 0)
          acc = Expr::binary(BinaryOp::sub, acc, to_expr(scale(key, -coef)));
        else
          acc = Expr::binary(BinaryOp::add, acc, to_expr(terms[i]));
      }
      if (c.num() > 0) acc = Expr::binary(BinaryOp::add, acc, Expr::constant(c.num()));
      if (c.num() < 0) acc = Expr::binary(BinaryOp::sub, acc, Expr::constant(-c.num()));
      return acc;
    }
  }
  return Expr::integer(0);
}

// ---- calculus --------------------------------------------------------------

CExpr diff(const CExpr& c, VarId v) {
  if (!c.depends_on(v)) return num(0);
  switch (c.kind()) {
    case Kind::Num: return num(0);
    case Kind::Sym: return num(1);
    case Kind::Add: {
      std::vector<CExpr> parts;
      for (const auto& t : c.ops()) parts.push_back(diff(t, v));
      return add(std::move(parts));
    }
    case Kind::Mul: {
      auto fs = c.ops();
      std::vector<CExpr> parts;
      for (std::size_t i = 0; i < fs.size(); ++i) {
        if (!fs[i].depends_on(v)) continue;
        std::vector<CExpr> prod;
        prod.push_back(num(c.num()));
        prod.push_back(diff(fs[i], v));
        for (std::size_t j = 0; j < fs.size(); ++j)
          if (j != i) prod.push_back(fs[j]);
        parts.push_back(mul(std::move(prod)));
      }
      return add(std::move(parts));
    }
    case Kind::Pow: {
      const CExpr& b = c.base();
      const CExpr& e = c.exponent();
      if (!e.depends_on(v)) return mul({e, pow(b, sub(e, num(1))), diff(b, v)});
      // d(b^e) = b^e (e' log b + e b'/b)
      return mul(c, add(mul(diff(e, v), fn(Fn::log, b)), mul({e, diff(b, v), pow(b, num(-1))})));
    }
    case Kind::Fn: {
      const CExpr& a = c.arg();
      CExpr da = diff(a, v);
      switch (c.fn()) {
        case Fn::sin: return mul(fn(Fn::cos, a), da);
        case Fn::cos: return mul({num(-1), fn(Fn::sin, a), da});
        case Fn::tan: return mul(add(num(1), pow(fn(Fn::tan, a), num(2))), da);
        case Fn::exp: return mul(c, da);
        case Fn::log: return mul(da, pow(a, num(-1)));
      }
    }
  }
  return num(0);
}

CExpr substitute(const CExpr& c, const std::array<std::optional<CExpr>, kVarCount>& bindings) {
  bool touched = false;
  for (std::size_t i = 0; i < kVarCount; ++i)
    if (bindings[i] && c.depends_on(static_cast<VarId>(i))) touched = true;
  if (!touched) return c;
  switch (c.kind()) {
    case Kind::Num: return c;
    case Kind::Sym: return *bindings[static_cast<std::size_t>(c.sym())];
    case Kind::Fn: return fn(c.fn(), substitute(c.arg(), bindings));
    case Kind::Pow: return pow(substitute(c.base(), bindings), substitute(c.exponent(), bindings));
    case Kind::Mul: {
      std::vector<CExpr> parts{num(c.num())};
      for (const auto& f : c.ops()) parts.push_back(substitute(f, bindings));
      return mul(std::move(parts));
    }
    case Kind::Add: {
      std::vector<CExpr> parts{num(c.num())};
      for (const auto& t : c.ops()) parts.push_back(substitute(t, bindings));
      return add(std::move(parts));
    }
  }
  return c;
}

}  // namespace firstint::canon
