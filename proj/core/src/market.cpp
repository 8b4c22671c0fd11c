#include "imatch/market.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "imatch/rng.hpp"

namespace imatch {

namespace {

enum LatentTag : std::uint64_t {
  kEpsApplicant = 0xA1,
  kEpsPosition = 0xB2,
  kEtaApplicant = 0xC3,
  kEtaPosition = 0xD4,
};

bool use_dense(LatentStorage storage, Index rows, Index cols) {
  switch (storage) {
    case LatentStorage::Dense: return true;
    case LatentStorage::Lazy: return false;
    case LatentStorage::Auto: break;
  }
  return static_cast<std::int64_t>(rows) * cols <= kDenseEntryLimit;
}

}  // namespace

// ---------------------------------------------------------------------------
// TierStructure

TierStructure::TierStructure(std::vector<Index> boundaries) : boundaries_(std::move(boundaries)) {
  if (boundaries_.size() < 2) throw ConfigError("tier boundaries need at least two entries");
  if (boundaries_.front() != 0) throw ConfigError("tier boundaries must start at 0");
  for (std::size_t i = 1; i < boundaries_.size(); ++i) {
    if (boundaries_[i] <= boundaries_[i - 1]) {
      throw ConfigError("tier boundaries must be strictly increasing");
    }
  }
}

TierStructure TierStructure::single(Index size) { return TierStructure({0, size}); }

TierStructure TierStructure::singletons(Index size) {
  std::vector<Index> b(static_cast<std::size_t>(size) + 1);
  for (Index i = 0; i <= size; ++i) b[i] = i;
  return TierStructure(std::move(b));
}

TierStructure TierStructure::from_sizes(std::span<const Index> sizes) {
  std::vector<Index> b{0};
  for (Index s : sizes) b.push_back(b.back() + s);
  return TierStructure(std::move(b));
}

Index TierStructure::tier_of(Index agent) const {
  if (agent < 0 || agent >= size()) throw std::out_of_range("tier_of: agent index out of range");
  auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), agent);
  return static_cast<Index>(it - boundaries_.begin()) - 1;
}

// ---------------------------------------------------------------------------
// Noise and enums

std::string_view to_string(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::Uniform: return "uniform";
    case NoiseFamily::Triangular: return "triangular";
  }
  return "?";
}

NoiseFamily parse_noise_family(std::string_view name) {
  if (name == "uniform") return NoiseFamily::Uniform;
  if (name == "triangular") return NoiseFamily::Triangular;
  throw ConfigError("noise family '" + std::string(name) +
                    "' is not a bounded distribution symmetric about zero "
                    "(supported: uniform, triangular)");
}

double NoiseDistribution::quantile(double u) const {
  switch (family) {
    case NoiseFamily::Uniform:
      return half_width * (2.0 * u - 1.0);
    case NoiseFamily::Triangular:
      if (u < 0.5) return half_width * (-1.0 + std::sqrt(2.0 * u));
      return half_width * (1.0 - std::sqrt(2.0 * (1.0 - u)));
  }
  return 0.0;
}

void NoiseDistribution::validate(std::string_view what) const {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw ConfigError(std::string(what) + ": half_width must be positive and finite");
  }
}

std::string_view to_string(ValueGeneratorKind kind) {
  switch (kind) {
    case ValueGeneratorKind::StrictlyDecreasing: return "strictly_decreasing";
    case ValueGeneratorKind::Tiered: return "tiered";
  }
  return "?";
}

ValueGeneratorKind parse_value_generator(std::string_view name) {
  if (name == "strictly_decreasing") return ValueGeneratorKind::StrictlyDecreasing;
  if (name == "tiered") return ValueGeneratorKind::Tiered;
  throw ConfigError("unknown value generator '" + std::string(name) + "'");
}

std::string_view to_string(LatentStorage storage) {
  switch (storage) {
    case LatentStorage::Auto: return "auto";
    case LatentStorage::Dense: return "dense";
    case LatentStorage::Lazy: return "lazy";
  }
  return "?";
}

LatentStorage parse_latent_storage(std::string_view name) {
  if (name == "auto") return LatentStorage::Auto;
  if (name == "dense") return LatentStorage::Dense;
  if (name == "lazy") return LatentStorage::Lazy;
  throw ConfigError("unknown latent storage '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// MarketConfig

TierStructure MarketConfig::resolved_applicant_tiers() const {
  if (applicant_tiers) return *applicant_tiers;
  return values.kind == ValueGeneratorKind::Tiered ? TierStructure::single(n)
                                                   : TierStructure::singletons(n);
}

TierStructure MarketConfig::resolved_position_tiers() const {
  if (position_tiers) return *position_tiers;
  return values.kind == ValueGeneratorKind::Tiered ? TierStructure::single(m)
                                                   : TierStructure::singletons(m);
}

void MarketConfig::validate() const {
  if (n < 1 || m < 1) throw ConfigError("market needs n >= 1 and m >= 1");
  const auto at = resolved_applicant_tiers();
  const auto pt = resolved_position_tiers();
  if (at.size() != n) throw ConfigError("applicant tier boundaries must end at n");
  if (pt.size() != m) throw ConfigError("position tier boundaries must end at m");
  utility.epsilon.validate("epsilon");
  if (utility.eta_enabled) utility.eta.validate("eta");
  switch (values.kind) {
    case ValueGeneratorKind::StrictlyDecreasing:
      if (!at.all_singletons() || !pt.all_singletons()) {
        throw ConfigError("strictly_decreasing values require singleton tiers");
      }
      if (!(values.spacing > 0.0) || !std::isfinite(values.spacing)) {
        throw ConfigError("value spacing must be positive and finite");
      }
      break;
    case ValueGeneratorKind::Tiered:
      if (!(utility.tier_gap > 2.0 * utility.max_perturbation()) || !std::isfinite(utility.tier_gap)) {
        throw ConfigError("tier_gap must exceed 2 * (sup|eps| + sup|eta|) so tiers never invert");
      }
      break;
  }
}

std::vector<double> generate_values(const ValueGenerator& gen, const TierStructure& tiers,
                                    double tier_gap) {
  std::vector<double> values(static_cast<std::size_t>(tiers.size()));
  const Index k = tiers.tier_count();
  for (Index l = 0; l < k; ++l) {
    const double step = gen.kind == ValueGeneratorKind::Tiered ? tier_gap : gen.spacing;
    const double v = static_cast<double>(k - 1 - l) * step;
    for (Index i = tiers.tier_begin(l); i < tiers.tier_end(l); ++i) values[i] = v;
  }
  return values;
}

// ---------------------------------------------------------------------------
// LatentMatrix

LatentMatrix LatentMatrix::zeros(Index rows, Index cols) {
  LatentMatrix mat;
  mat.rows_ = rows;
  mat.cols_ = cols;
  mat.zero_ = true;
  return mat;
}

LatentMatrix LatentMatrix::derived(Index rows, Index cols, std::uint64_t key, NoiseDistribution dist,
                                   bool materialise) {
  LatentMatrix mat;
  mat.rows_ = rows;
  mat.cols_ = cols;
  mat.key_ = key;
  mat.dist_ = dist;
  if (materialise) {
    std::vector<double> dense(static_cast<std::size_t>(rows) * cols);
    for (Index r = 0; r < rows; ++r) {
      for (Index c = 0; c < cols; ++c) dense[static_cast<std::size_t>(r) * cols + c] = mat.draw(r, c);
    }
    mat.dense_ = std::move(dense);
  }
  return mat;
}

LatentMatrix LatentMatrix::explicit_values(Index rows, Index cols, std::vector<double> values) {
  if (values.empty()) return zeros(rows, cols);
  if (values.size() != static_cast<std::size_t>(rows) * cols) {
    throw ConfigError("latent matrix has " + std::to_string(values.size()) + " entries, expected " +
                      std::to_string(static_cast<std::size_t>(rows) * cols));
  }
  LatentMatrix mat;
  mat.rows_ = rows;
  mat.cols_ = cols;
  mat.dense_ = std::move(values);
  return mat;
}

double LatentMatrix::draw(Index row, Index col) const {
  const auto bits = rng::combine(key_, static_cast<std::uint64_t>(row), static_cast<std::uint64_t>(col));
  return dist_.quantile(rng::unit_from_bits(bits));
}

// ---------------------------------------------------------------------------
// Market

Market Market::sample(const MarketConfig& config, std::uint64_t seed) {
  config.validate();
  Market market;
  market.config_ = config;
  market.seed_ = seed;
  market.applicant_tiers_ = config.resolved_applicant_tiers();
  market.position_tiers_ = config.resolved_position_tiers();
  market.applicant_values_ = generate_values(config.values, market.applicant_tiers_, config.utility.tier_gap);
  market.position_values_ = generate_values(config.values, market.position_tiers_, config.utility.tier_gap);

  const Index n = config.n;
  const Index m = config.m;
  const bool dense = use_dense(config.storage, n, m);
  const auto& u = config.utility;
  market.eps_a_ = LatentMatrix::derived(n, m, rng::combine(seed, kEpsApplicant), u.epsilon, dense);
  market.eps_p_ = LatentMatrix::derived(m, n, rng::combine(seed, kEpsPosition), u.epsilon, dense);
  if (u.eta_enabled) {
    market.eta_a_ = LatentMatrix::derived(n, m, rng::combine(seed, kEtaApplicant), u.eta, dense);
    market.eta_p_ = LatentMatrix::derived(m, n, rng::combine(seed, kEtaPosition), u.eta, dense);
  } else {
    market.eta_a_ = LatentMatrix::zeros(n, m);
    market.eta_p_ = LatentMatrix::zeros(m, n);
  }
  return market;
}

Market Market::from_explicit(Explicit data) {
  auto& config = data.config;
  if (config.n < 1 || config.m < 1) throw ConfigError("market needs n >= 1 and m >= 1");
  const Index n = config.n;
  const Index m = config.m;
  if (data.applicant_values.size() != static_cast<std::size_t>(n) ||
      data.position_values.size() != static_cast<std::size_t>(m)) {
    throw ConfigError("public value lists must have n and m entries");
  }
  auto non_increasing = [](const std::vector<double>& v) {
    return std::adjacent_find(v.begin(), v.end(), std::less<>{}) == v.end();
  };
  if (!non_increasing(data.applicant_values) || !non_increasing(data.position_values)) {
    throw ConfigError("public values must be sorted non-increasing");
  }
  const bool has_eta = !data.eta_applicant.empty() || !data.eta_position.empty();
  config.utility.eta_enabled = has_eta;

  Market market;
  market.config_ = config;
  market.seed_ = data.seed;
  market.applicant_tiers_ = config.resolved_applicant_tiers();
  market.position_tiers_ = config.resolved_position_tiers();
  if (market.applicant_tiers_.size() != n || market.position_tiers_.size() != m) {
    throw ConfigError("tier boundaries do not match market size");
  }
  if (config.values.kind == ValueGeneratorKind::Tiered) {
    auto consistent = [](const TierStructure& t, const std::vector<double>& v) {
      for (Index l = 0; l < t.tier_count(); ++l) {
        for (Index i = t.tier_begin(l) + 1; i < t.tier_end(l); ++i) {
          if (v[i] != v[i - 1]) return false;
        }
        if (l > 0 && !(v[t.tier_begin(l)] < v[t.tier_begin(l) - 1])) return false;
      }
      return true;
    };
    if (!consistent(market.applicant_tiers_, data.applicant_values) ||
        !consistent(market.position_tiers_, data.position_values)) {
      throw ConfigError("tiered values must be equal within tiers and decrease across tiers");
    }
  }
  market.applicant_values_ = std::move(data.applicant_values);
  market.position_values_ = std::move(data.position_values);
  market.eps_a_ = LatentMatrix::explicit_values(n, m, std::move(data.eps_applicant));
  market.eps_p_ = LatentMatrix::explicit_values(m, n, std::move(data.eps_position));
  if (has_eta) {
    market.eta_a_ = LatentMatrix::explicit_values(n, m, std::move(data.eta_applicant));
    market.eta_p_ = LatentMatrix::explicit_values(m, n, std::move(data.eta_position));
  } else {
    market.eta_a_ = LatentMatrix::zeros(n, m);
    market.eta_p_ = LatentMatrix::zeros(m, n);
  }
  return market;
}

MarketShape Market::shape() const {
  return MarketShape{n(), m(), applicant_tiers_, position_tiers_,
                     config_.values.kind == ValueGeneratorKind::Tiered};
}

}  // namespace imatch
