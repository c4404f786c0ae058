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

#include "firstint/rational.hpp"

#include <cctype>

namespace firstint {

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

// Leading zeros are only allowed for the literal "0".
bool canonical_digits(std::string_view s) {
  return all_digits(s) && (s.size() == 1 || s.front() != '0');
}

}  // namespace

std::optional<Rational> parse_rational(std::string_view token) {
  std::string_view body = token;
  bool negative = false;
  if (!body.empty() && body.front() == '-') {
    negative = true;
    body.remove_prefix(1);
  }
  auto slash = body.find('/');
  std::string_view num = body.substr(0, slash);
  if (!canonical_digits(num)) return std::nullopt;
  if (negative && num == "0") return std::nullopt;
  mpz_class p(std::string(num), 10);
  if (negative) p = -p;
  if (slash == std::string_view::npos) return Rational(p);

  std::string_view den = body.substr(slash + 1);
  if (!canonical_digits(den)) return std::nullopt;
  mpz_class q(std::string(den), 10);
  if (q <= 1) return std::nullopt;
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
  if (g != 1) return std::nullopt;
  return Rational(p, q);
}

bool is_integer(const Rational& q) { return q.get_den() == 1; }

double to_double(const Rational& q) { return q.get_d(); }

Rational pow_int(const Rational& q, long n) {
  if (n < 0) {
    Rational inv = 1 / q;
    return pow_int(inv, -n);
  }
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), q.get_num_mpz_t(), static_cast<unsigned long>(n));
  mpz_pow_ui(den.get_mpz_t(), q.get_den_mpz_t(), static_cast<unsigned long>(n));
  Rational r(num, den);
  r.canonicalize();
  return r;
}

std::optional<Rational> exact_root(const Rational& q, unsigned long k) {
  if (k == 0) return std::nullopt;
  if (k == 1) return q;
  if (q < 0 && k % 2 == 0) return std::nullopt;
  mpz_class num = abs(q.get_num());
  mpz_class rn, rd;
  if (mpz_root(rn.get_mpz_t(), num.get_mpz_t(), k) == 0) return std::nullopt;
  if (mpz_root(rd.get_mpz_t(), q.get_den_mpz_t(), k) == 0) return std::nullopt;
  if (q < 0) rn = -rn;
  Rational r(rn, rd);
  r.canonicalize();
  return r;
}

}  // namespace firstint
