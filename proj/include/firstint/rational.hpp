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

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace firstint {

/// Exact rational number; always kept in lowest terms with a positive
/// denominator (mpq_class canonicalizes after every arithmetic operation).
using Rational = mpq_class;

/// "p" for integers and "p/q" otherwise, the single-token literal form.
std::string to_string(const Rational& q);

/// Parses "p" or "p/q" (optional leading '-' on p, q > 0, gcd(|p|, q) = 1).
/// Non-canonical spellings such as "2/4", "1/-2" or "+3" are rejected.
std::optional<Rational> parse_rational(std::string_view token);

bool is_integer(const Rational& q);
double to_double(const Rational& q);

/// Exact q^n for integer n (n may be negative when q != 0).
Rational pow_int(const Rational& q, long n);

/// Exact root: returns r with r^k == q when one exists over the rationals.
std::optional<Rational> exact_root(const Rational& q, unsigned long k);

}  // namespace firstint
