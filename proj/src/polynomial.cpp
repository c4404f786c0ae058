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

#include "firstint/polynomial.hpp"

#include "firstint/budget.hpp"

#include <algorithm>

namespace firstint::canon {

namespace {

thread_local std::size_t term_cap = 4000;

Monomial monomial_product(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && compare(a[i].first, b[j].first) < 0)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || compare(b[j].first, a[i].first) < 0) {
      out.push_back(b[j++]);
    } else {
      out.emplace_back(a[i].first, a[i].second + b[j].second);
      ++i;
      ++j;
    }
  }
  return out;
}

std::optional<Monomial> monomial_quotient(const Monomial& a, const Monomial& b) {
  Monomial out;
  std::size_t i = 0;
  for (const auto& [k, e] : b) {
    while (i < a.size() && compare(a[i].first, k) < 0) out.push_back(a[i++]);
    if (i == a.size() || compare(a[i].first, k) != 0 || a[i].second < e) return std::nullopt;
    if (a[i].second > e) out.emplace_back(k, a[i].second - e);
    ++i;
  }
  while (i < a.size()) out.push_back(a[i++]);
  return out;
}

}  // namespace

bool MonomialLess::operator()(const Monomial& a, const Monomial& b) const {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    int c = compare(a[i].first, b[j].first);
    if (c < 0) return false;  // a carries a more significant kernel
    if (c > 0) return true;
    if (a[i].second != b[j].second) return a[i].second < b[j].second;
    ++i;
    ++j;
  }
  return i == a.size() && j < b.size();
}

std::size_t Poly::max_terms() { return term_cap; }
void Poly::set_max_terms(std::size_t n) { term_cap = n; }

Poly Poly::constant(const Rational& q) {
  Poly p;
  if (q != 0) p.terms_.emplace(Monomial{}, q);
  return p;
}

Poly Poly::kernel(const CExpr& k) {
  Poly p;
  p.terms_.emplace(Monomial{{k, 1}}, Rational(1));
  return p;
}

bool Poly::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty()); }

void Poly::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

void Poly::check_size() const {
  if (terms_.size() > term_cap) throw PolyOverflow("polynomial expansion exceeds term cap");
}

Poly Poly::operator+(const Poly& o) const {
  Poly r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, c);
  r.check_size();
  return r;
}

Poly Poly::operator-(const Poly& o) const {
  Poly r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, -c);
  r.check_size();
  return r;
}

Poly Poly::operator*(const Poly& o) const {
  if (terms_.size() * o.terms_.size() > term_cap * 8) throw PolyOverflow("polynomial product too large");
  Poly r;
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : o.terms_) {
      budget_tick();
      r.add_term(monomial_product(ma, mb), ca * cb);
    }
  }
  r.check_size();
  return r;
}

Poly Poly::scaled(const Rational& q) const {
  if (q == 0) return {};
  Poly r = *this;
  for (auto& [m, c] : r.terms_) c *= q;
  return r;
}

Poly Poly::power(long n) const {
  Poly r = constant(Rational(1));
  Poly base = *this;
  while (n > 0) {
    if (n & 1) r = r * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return r;
}

std::optional<Poly> Poly::divide_exact(const Poly& divisor) const {
  if (divisor.is_zero()) return std::nullopt;
  const auto& [dm, dc] = *divisor.terms_.rbegin();
  Poly rem = *this;
  Poly quot;
  std::size_t steps = 0;
  while (!rem.is_zero()) {
    budget_tick();
    if (++steps > term_cap) return std::nullopt;
    const auto& [rm, rc] = *rem.terms_.rbegin();
    auto qm = monomial_quotient(rm, dm);
    if (!qm) return std::nullopt;
    Rational qc = rc / dc;
    quot.add_term(*qm, qc);
    for (const auto& [m, c] : divisor.terms_) rem.add_term(monomial_product(*qm, m), -qc * c);
    rem.check_size();
  }
  return quot;
}

CExpr Poly::to_cexpr() const {
  std::vector<CExpr> terms;
  terms.reserve(terms_.size());
  for (const auto& [m, c] : terms_) {
    std::vector<CExpr> factors{num(c)};
    for (const auto& [k, e] : m) factors.push_back(pow(k, num(e)));
    terms.push_back(mul(std::move(factors)));
  }
  return add(std::move(terms));
}

bool operator==(const Poly& a, const Poly& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  auto it = b.terms_.begin();
  for (const auto& [m, c] : a.terms_) {
    if (c != it->second) return false;
    if (MonomialLess{}(m, it->first) || MonomialLess{}(it->first, m)) return false;
    ++it;
  }
  return true;
}

bool operator<(const Poly& a, const Poly& b) {
  return std::lexicographical_compare(
      a.terms_.begin(), a.terms_.end(), b.terms_.begin(), b.terms_.end(), [](const auto& x, const auto& y) {
        if (MonomialLess{}(x.first, y.first)) return true;
        if (MonomialLess{}(y.first, x.first)) return false;
        return x.second < y.second;
      });
}

// ---- rational normal form --------------------------------------------------

namespace {

// Splits p into scale * product(factor^mult) with each factor normalized.
Rational add_denominator_factor(const Poly& p, long mult, std::map<Poly, long>& den) {
  if (p.size() == 1) {
    const auto& [m, c] = *p.terms().begin();
    for (const auto& [k, e] : m) den[Poly::kernel(k)] += e * mult;
    return pow_int(c, mult);
  }
  const Rational lc = p.leading_coefficient();
  den[p.scaled(1 / lc)] += mult;
  return pow_int(lc, mult);
}

Poly expand_denominator(const std::map<Poly, long>& den, const std::map<Poly, long>& skip) {
  Poly out = Poly::constant(Rational(1));
  for (const auto& [b, k] : den) {
    long have = 0;
    if (auto it = skip.find(b); it != skip.end()) have = it->second;
    if (k > have) out = out * b.power(k - have);
  }
  return out;
}

Fraction frac_mul(const Fraction& a, const Fraction& b) {
  Fraction r;
  r.numerator = a.numerator * b.numerator;
  r.denominator = a.denominator;
  for (const auto& [p, k] : b.denominator) r.denominator[p] += k;
  return r;
}

Fraction frac_add(const Fraction& a, const Fraction& b) {
  if (a.numerator.is_zero()) return b;
  if (b.numerator.is_zero()) return a;
  std::map<Poly, long> lcd = a.denominator;
  for (const auto& [p, k] : b.denominator) lcd[p] = std::max(lcd[p], k);
  Fraction r;
  r.numerator = a.numerator * expand_denominator(lcd, a.denominator) +
                b.numerator * expand_denominator(lcd, b.denominator);
  r.denominator = std::move(lcd);
  return r;
}

Fraction frac_inv(const Fraction& a) {
  if (a.numerator.is_zero()) throw PolyOverflow("division by zero in rational normal form");
  Fraction r;
  r.numerator = expand_denominator(a.denominator, {});
  if (a.numerator.is_constant()) {
    r.numerator = r.numerator.scaled(1 / a.numerator.terms().begin()->second);
    return r;
  }
  Rational s = add_denominator_factor(a.numerator, 1, r.denominator);
  r.numerator = r.numerator.scaled(1 / s);
  return r;
}

Fraction frac_pow(const Fraction& a, long n) {
  if (n < 0) return frac_pow(frac_inv(a), -n);
  Fraction r;
  r.numerator = a.numerator.power(n);
  for (const auto& [p, k] : a.denominator) r.denominator[p] = k * n;
  return r;
}

Fraction frac_kernel(const CExpr& k) { return Fraction{Poly::kernel(k), {}}; }

// s such that p.scaled(s) has coprime integer coefficients.
Rational integer_scale(const Poly& p) {
  mpz_class l(1), g(0);
  for (const auto& [m, c] : p.terms()) {
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num_mpz_t());
  }
  if (g == 0) return Rational(1);
  Rational s(l, g);
  s.canonicalize();
  return s;
}

}  // namespace

Fraction to_fraction(const CExpr& c) {
  budget_tick();
  switch (c.kind()) {
    case Kind::Num: return Fraction{Poly::constant(c.num()), {}};
    case Kind::Sym:
    case Kind::Fn: return frac_kernel(c);
    case Kind::Pow: {
      const CExpr& e = c.exponent();
      if (!e.is_num()) return frac_kernel(c);
      const Rational& q = e.num();
      if (is_integer(q)) {
        long n = q.get_num().get_si();
        if (std::labs(n) > 64) return frac_kernel(c);
        return frac_pow(to_fraction(c.base()), n);
      }
      mpz_class whole;
      mpz_fdiv_q(whole.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
      Rational rest = q - Rational(whole);
      Fraction k = frac_kernel(raw_pow(c.base(), num(rest)));
      if (whole == 0 || std::labs(whole.get_si()) > 64) return whole == 0 ? k : frac_kernel(c);
      return frac_mul(k, frac_pow(to_fraction(c.base()), whole.get_si()));
    }
    case Kind::Mul: {
      Fraction acc{Poly::constant(c.num()), {}};
      for (const auto& f : c.ops()) acc = frac_mul(acc, to_fraction(f));
      return acc;
    }
    case Kind::Add: {
      Fraction acc{Poly::constant(c.num()), {}};
      for (const auto& t : c.ops()) acc = frac_add(acc, to_fraction(t));
      return acc;
    }
  }
  return Fraction{};
}

std::optional<bool> rational_zero(const CExpr& c) {
  if (c.is_num()) return c.num() == 0;
  try {
    return to_fraction(c).numerator.is_zero();
  } catch (const PolyOverflow&) {
    return std::nullopt;
  }
}

CExpr cancel(const CExpr& c) {
  if (c.is_num()) return c;
  Fraction f;
  try {
    f = to_fraction(c);
  } catch (const PolyOverflow&) {
    return c;
  }
  if (f.numerator.is_zero()) return num(0);

  bool cancelled = false;
  std::vector<CExpr> parts;
  try {
    for (auto& [b, k] : f.denominator) {
      while (k > 0) {
        auto q = f.numerator.divide_exact(b);
        if (!q) break;
        f.numerator = std::move(*q);
        --k;
        cancelled = true;
      }
    }
    // Monic factors print as x + 5/2; rescale each to integer coprime
    // coefficients and move the scale into the numerator.
    Rational scale(1);
    std::vector<CExpr> den;
    for (const auto& [b, k] : f.denominator) {
      if (k <= 0) continue;
      const Rational s = integer_scale(b);
      scale *= pow_int(s, k);
      den.push_back(pow(b.scaled(s).to_cexpr(), num(-k)));
    }
    parts.push_back(f.numerator.scaled(scale).to_cexpr());
    for (auto& d : den) parts.push_back(std::move(d));
  } catch (const PolyOverflow&) {
    return c;
  }
  CExpr result = mul(std::move(parts));
  if (cancelled) return result.size() <= 2 * c.size() ? result : c;
  return result.size() < c.size() ? result : c;
}

}  // namespace firstint::canon
