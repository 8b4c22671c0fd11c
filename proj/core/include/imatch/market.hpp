#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace imatch {

// Agent indices are 0-based throughout the library and in every file format.
using Index = std::int32_t;
inline constexpr Index kNone = -1;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Partition of one side into consecutive tiers. Tier l holds the agents
// [boundaries[l], boundaries[l+1]). Tier 0 is the most valuable.
class TierStructure {
 public:
  TierStructure() = default;
  explicit TierStructure(std::vector<Index> boundaries);

  static TierStructure single(Index size);
  static TierStructure singletons(Index size);
  static TierStructure from_sizes(std::span<const Index> sizes);

  Index size() const { return boundaries_.empty() ? 0 : boundaries_.back(); }
  Index tier_count() const { return boundaries_.empty() ? 0 : static_cast<Index>(boundaries_.size()) - 1; }
  Index tier_of(Index agent) const;
  Index tier_begin(Index tier) const { return boundaries_.at(tier); }
  Index tier_end(Index tier) const { return boundaries_.at(tier + 1); }
  Index tier_size(Index tier) const { return tier_end(tier) - tier_begin(tier); }
  Index relative_index(Index agent) const { return agent - tier_begin(tier_of(agent)); }
  bool all_singletons() const { return tier_count() == size(); }

  const std::vector<Index>& boundaries() const { return boundaries_; }

  bool operator==(const TierStructure&) const = default;

 private:
  std::vector<Index> boundaries_;
};

enum class NoiseFamily { Uniform, Triangular };

std::string_view to_string(NoiseFamily family);
// Only bounded families symmetric about zero are accepted; anything else is a
// ConfigError.
NoiseFamily parse_noise_family(std::string_view name);

struct NoiseDistribution {
  NoiseFamily family = NoiseFamily::Uniform;
  double half_width = 1.0;

  // Inverse CDF applied to u in [0, 1).
  double quantile(double u) const;
  double bound() const { return half_width; }
  void validate(std::string_view what) const;

  bool operator==(const NoiseDistribution&) const = default;
};

struct UtilityModel {
  NoiseDistribution epsilon{};
  bool eta_enabled = false;
  NoiseDistribution eta{};
  double tier_gap = 10.0;

  // Largest possible |noise + perturbation| realised by one observation.
  double max_perturbation() const { return epsilon.bound() + (eta_enabled ? eta.bound() : 0.0); }

  bool operator==(const UtilityModel&) const = default;
};

enum class ValueGeneratorKind { StrictlyDecreasing, Tiered };

std::string_view to_string(ValueGeneratorKind kind);
ValueGeneratorKind parse_value_generator(std::string_view name);

struct ValueGenerator {
  ValueGeneratorKind kind = ValueGeneratorKind::StrictlyDecreasing;
  double spacing = 1.0;  // StrictlyDecreasing only

  bool operator==(const ValueGenerator&) const = default;
};

// Dense keeps n*m doubles per latent matrix. Lazy re-derives every draw from
// (seed, matrix, row, col); both produce bit-identical values.
enum class LatentStorage { Auto, Dense, Lazy };

std::string_view to_string(LatentStorage storage);
LatentStorage parse_latent_storage(std::string_view name);

struct MarketConfig {
  Index n = 1;
  Index m = 1;
  std::optional<TierStructure> applicant_tiers;
  std::optional<TierStructure> position_tiers;
  UtilityModel utility{};
  ValueGenerator values{};
  LatentStorage storage = LatentStorage::Auto;

  // Tiers with defaults filled in: singletons for strictly decreasing values,
  // one tier per side for tiered values.
  TierStructure resolved_applicant_tiers() const;
  TierStructure resolved_position_tiers() const;

  void validate() const;

  bool operator==(const MarketConfig&) const = default;
};

// Auto switches to lazy storage above this many entries per matrix.
inline constexpr std::int64_t kDenseEntryLimit = std::int64_t{1} << 22;

// Everything an interview planner may see: no latent draws.
struct MarketShape {
  Index n = 0;
  Index m = 0;
  TierStructure applicant_tiers;
  TierStructure position_tiers;
  bool tier_dominant = false;  // values equal within tiers, dominant across
};

// Row-major latent matrix, either materialised or derived on demand.
class LatentMatrix {
 public:
  LatentMatrix() = default;
  static LatentMatrix zeros(Index rows, Index cols);
  static LatentMatrix derived(Index rows, Index cols, std::uint64_t key, NoiseDistribution dist,
                              bool materialise);
  static LatentMatrix explicit_values(Index rows, Index cols, std::vector<double> values);

  double operator()(Index row, Index col) const {
    if (!dense_.empty()) return dense_[static_cast<std::size_t>(row) * cols_ + col];
    if (zero_) return 0.0;
    return draw(row, col);
  }

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  bool materialised() const { return !dense_.empty() || zero_; }

 private:
  double draw(Index row, Index col) const;

  Index rows_ = 0;
  Index cols_ = 0;
  std::uint64_t key_ = 0;
  NoiseDistribution dist_{};
  bool zero_ = false;
  std::vector<double> dense_;
};

// Full latent instance. Immutable after construction.
class Market {
 public:
  static Market sample(const MarketConfig& config, std::uint64_t seed);

  // Hand-specified instance (tests, replay of serialized markets). Matrices
  // are row-major: eps_applicant is n x m, eps_position is m x n. Empty eta
  // matrices mean eta is disabled.
  struct Explicit {
    MarketConfig config;
    std::uint64_t seed = 0;
    std::vector<double> applicant_values;
    std::vector<double> position_values;
    std::vector<double> eps_applicant;
    std::vector<double> eps_position;
    std::vector<double> eta_applicant;
    std::vector<double> eta_position;
  };
  static Market from_explicit(Explicit data);

  Index n() const { return config_.n; }
  Index m() const { return config_.m; }

  double applicant_value(Index a) const { return applicant_values_[a]; }
  double position_value(Index p) const { return position_values_[p]; }
  std::span<const double> applicant_values() const { return applicant_values_; }
  std::span<const double> position_values() const { return position_values_; }

  // eps^A_{ap}: applicant a's subjective interest in position p.
  double eps_applicant(Index a, Index p) const { return eps_a_(a, p); }
  // eps^P_{pa}: position p's subjective interest in applicant a.
  double eps_position(Index p, Index a) const { return eps_p_(p, a); }
  double eta_applicant(Index a, Index p) const { return eta_a_(a, p); }
  double eta_position(Index p, Index a) const { return eta_p_(p, a); }
  bool eta_enabled() const { return config_.utility.eta_enabled; }

  const MarketConfig& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }
  const TierStructure& applicant_tiers() const { return applicant_tiers_; }
  const TierStructure& position_tiers() const { return position_tiers_; }
  MarketShape shape() const;
  bool dense() const { return eps_a_.materialised(); }

 private:
  Market() = default;

  MarketConfig config_;
  std::uint64_t seed_ = 0;
  TierStructure applicant_tiers_;
  TierStructure position_tiers_;
  std::vector<double> applicant_values_;
  std::vector<double> position_values_;
  LatentMatrix eps_a_;
  LatentMatrix eps_p_;
  LatentMatrix eta_a_;
  LatentMatrix eta_p_;
};

inline Market sample_market(const MarketConfig& config, std::uint64_t seed) {
  return Market::sample(config, seed);
}

// Public values implied by a generator and a tier structure.
std::vector<double> generate_values(const ValueGenerator& gen, const TierStructure& tiers,
                                    double tier_gap);

}  // namespace imatch
