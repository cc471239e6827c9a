// Copyright 2026 The xstab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef XSTAB_COST_H_
#define XSTAB_COST_H_

#include <string>
#include <string_view>

namespace xstab {

// (mean_words + 1) * per_call_cost: the relative cost of one LOO-explained
// query, BERT-base = 1. Both arguments must be positive.
double ExplanationCost(double mean_word_count, double per_call_cost);

struct CostProfile {
  std::string model;
  double mean_word_count = 0.0;
  double per_call_cost = 0.0;
  double cost_multiplier = 0.0;
};

// Throws std::invalid_argument on non-positive inputs.
CostProfile MakeCostProfile(std::string model, double mean_word_count,
                            double per_call_cost);

enum class Tier { kRegulatory, kBalanced, kSpeedFirst };

std::string_view TierName(Tier tier);

struct TierThresholds {
  // FR below this -> regulatory.
  double regulatory_below = 0.10;
  // FR below this (and not regulatory) -> balanced; otherwise speed_first.
  double balanced_below = 0.20;

  // Throws ConfigError unless 0 < regulatory_below < balanced_below < 1.
  void Validate() const;
};

struct TierAssignment {
  Tier tier;
  double basis;
  TierThresholds thresholds;
};

// Throws ConfigError for malformed thresholds and std::invalid_argument for
// a flip rate outside [0, 1].
TierAssignment AssignTier(double avg_flip_rate, const TierThresholds& thresholds = {});

}  // namespace xstab

#endif  // XSTAB_COST_H_
