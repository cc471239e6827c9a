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

#include "xstab/cost.h"

#include <cmath>
#include <stdexcept>

#include "xstab/errors.h"

namespace xstab {

double ExplanationCost(double mean_word_count, double per_call_cost) {
  if (!(mean_word_count > 0.0) || !(per_call_cost > 0.0) ||
      !std::isfinite(mean_word_count) || !std::isfinite(per_call_cost)) {
    throw std::invalid_argument("cost inputs must be positive and finite");
  }
  return (mean_word_count + 1.0) * per_call_cost;
}

CostProfile MakeCostProfile(std::string model, double mean_word_count,
                            double per_call_cost) {
  return {std::move(model), mean_word_count, per_call_cost,
          ExplanationCost(mean_word_count, per_call_cost)};
}

std::string_view TierName(Tier tier) {
  switch (tier) {
    case Tier::kRegulatory:
      return "regulatory";
    case Tier::kBalanced:
      return "balanced";
    case Tier::kSpeedFirst:
      return "speed_first";
  }
  return "unknown";
}

void TierThresholds::Validate() const {
  if (!(regulatory_below > 0.0 && regulatory_below < balanced_below &&
        balanced_below < 1.0)) {
    throw ConfigError("tier thresholds must satisfy 0 < regulatory < balanced < 1");
  }
}

TierAssignment AssignTier(double avg_flip_rate, const TierThresholds& thresholds) {
  thresholds.Validate();
  if (!(avg_flip_rate >= 0.0 && avg_flip_rate <= 1.0)) {
    throw std::invalid_argument("flip rate outside [0, 1]");
  }
  Tier tier = Tier::kSpeedFirst;
  if (avg_flip_rate < thresholds.regulatory_below) {
    tier = Tier::kRegulatory;
  } else if (avg_flip_rate < thresholds.balanced_below) {
    tier = Tier::kBalanced;
  }
  return {tier, avg_flip_rate, thresholds};
}

}  // namespace xstab
