#pragma once

#include <optional>
#include <vector>

#include "imatch/experiments.hpp"
#include "imatch/market.hpp"

namespace imatch::test {

// Hand-built market. Matrices are row-major (eps_a is n x m, eps_p is m x n);
// empty matrices are all zero.
inline Market explicit_market(std::vector<double> u, std::vector<double> v, std::vector<double> eps_a,
                              std::vector<double> eps_p, std::optional<TierStructure> applicant_tiers = {},
                              std::optional<TierStructure> position_tiers = {}) {
  Market::Explicit data;
  data.config.n = static_cast<Index>(u.size());
  data.config.m = static_cast<Index>(v.size());
  if (applicant_tiers || position_tiers) {
    data.config.values.kind = ValueGeneratorKind::Tiered;
    data.config.applicant_tiers = applicant_tiers;
    data.config.position_tiers = position_tiers;
  }
  data.applicant_values = std::move(u);
  data.position_values = std::move(v);
  data.eps_applicant = std::move(eps_a);
  data.eps_position = std::move(eps_p);
  return Market::from_explicit(std::move(data));
}

inline MarketConfig scenario_config(TierScenario kind, Index n, std::uint64_t seed, double spacing = 1.0) {
  SweepConfig c;
  c.scenario.kind = kind;
  c.scenario.value_spacing = spacing;
  return make_market_config(c, n, seed);
}

inline Market scenario_market(TierScenario kind, Index n, std::uint64_t seed, double spacing = 1.0) {
  return Market::sample(scenario_config(kind, n, seed, spacing), seed);
}

inline constexpr TierScenario kAdaptiveScenarios[] = {
    TierScenario::StrictlyDecreasing, TierScenario::SingleTier, TierScenario::SingletonApplicants,
    TierScenario::Mixed, TierScenario::RandomPartition};

}  // namespace imatch::test
