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

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>

namespace firstint {

/// Thrown from inside symbolic work when the active budget runs out.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded() : std::runtime_error("computation budget exceeded") {}
};

/// Cooperative cancellation for symbolic work: a step cap (reproducible) or a
/// wall-clock deadline (production), or both. Installed per thread with
/// ScopedBudget; expensive routines call budget_tick().
class Budget {
 public:
  using Clock = std::chrono::steady_clock;

  static Budget steps(std::uint64_t max_steps);
  static Budget seconds(double limit);
  static Budget unlimited() { return Budget{}; }

  void tick();
  std::uint64_t used() const { return used_; }

 private:
  std::optional<std::uint64_t> max_steps_;
  std::optional<Clock::time_point> deadline_;
  std::uint64_t used_ = 0;
};

class ScopedBudget {
 public:
  explicit ScopedBudget(Budget& b);
  ~ScopedBudget();
  ScopedBudget(const ScopedBudget&) = delete;
  ScopedBudget& operator=(const ScopedBudget&) = delete;

 private:
  Budget* previous_;
};

/// No-op when no budget is installed on this thread.
void budget_tick();

}  // namespace firstint
