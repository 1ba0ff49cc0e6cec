#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include "oligo/parallel.hpp"
#include "oligo/types.hpp"

namespace oligo::calib {

struct QuarterRecord {
  int quarter = 1;
  Shares observed = Shares::symmetric(1.0 / 3.0);
  AdvertisingField advertising = AdvertisingField::symmetric(1.0 / 3.0);
};

/// Quarterly observations, indices contiguous from 1.
struct MarketSeries {
  std::vector<QuarterRecord> quarters;

  std::size_t size() const noexcept { return quarters.size(); }
  std::vector<Shares> observed() const;
};

/// Parses `quarter,share_1,share_2,share_3,adv_1,adv_2,adv_3` (header
/// required, columns in any order, extra columns ignored). Triples within
/// 1e-6 of summing to 1 are renormalised; anything else is a ParseError
/// naming the line.
MarketSeries parse_series(std::istream& in, const std::string& source = "<stream>");
MarketSeries load_series(const std::filesystem::path& path);

/// Validates T >= 2 and contiguous quarter indices; throws ParseError.
void validate_series(const MarketSeries& series);

/// Multiplies one operator's advertising share by `factor` over an inclusive
/// quarter range, then renormalises the triple.
struct Adjustment {
  Operator target = Operator::second;
  int from = 17;
  int to = 24;
  double factor = 0.9;
};

/// Parses "op:from:to:factor".
Adjustment parse_adjustment(const std::string& text);

struct AdvertisingSchedule {
  std::vector<AdvertisingField> fields;  // one per quarter
  std::int64_t updates_per_quarter = 1;
};

/// Per-quarter fields from the series' advertising shares with the
/// adjustments applied in order. total_updates must be divisible by T.
AdvertisingSchedule build_schedule(const MarketSeries& series,
                                   std::span<const Adjustment> adjustments,
                                   std::int64_t total_updates);

struct BandRunConfig {
  ModelKind model = ModelKind::cf;
  double p = 0.4;
  int L = 100;
  Shares c0 = Shares::symmetric(0.4);
  std::size_t n_trajectories = 1000;
  std::uint64_t seed = 1;
};

/// Shares at the end of each quarter for every trajectory: [trajectory][quarter].
/// Trajectory r uses seed derive_seed(seed, r).
using TrajectoryMatrix = std::vector<std::vector<Shares>>;

TrajectoryMatrix simulate_trajectories(const BandRunConfig& config,
                                       const AdvertisingSchedule& schedule,
                                       const ExecOptions& exec = {});

/// One synthetic trajectory with the given seed (no derivation).
std::vector<Shares> simulate_one(ModelKind model, double p, int L, const Shares& c0,
                                 const AdvertisingSchedule& schedule, std::uint64_t seed);

struct QuantileBands {
  std::vector<Triple> lower;   // 2.5 %
  std::vector<Triple> median;  // 50 %
  std::vector<Triple> upper;   // 97.5 %
  std::size_t n_trajectories = 0;
};

/// Empirical quantile with the midpoint rule: sorted x_1..x_n sit at
/// probabilities (k - 0.5) / n, linear in between, constant beyond the ends.
double quantile(std::vector<double> values, double q);

QuantileBands quantile_bands(const TrajectoryMatrix& trajectories);
std::vector<Triple> ensemble_mean(const TrajectoryMatrix& trajectories);

QuantileBands simulate_bands(const BandRunConfig& config, const AdvertisingSchedule& schedule,
                             const ExecOptions& exec = {});

/// Maps (observed series, ensemble-mean prediction) to a non-negative score.
using Scorer = std::function<double(std::span<const Shares>, std::span<const Triple>)>;

/// Mean over quarters and operators of the squared error.
double mse_score(std::span<const Shares> observed, std::span<const Triple> predicted);

struct FitResult {
  std::vector<double> p_grid;
  std::vector<double> scores;
  double best_p = 0.0;
  std::string score_tag = "ensemble_mean_mse";
};

/// Scores every p on the grid against the observed series. Every p reuses
/// config.seed, so the score curve is computed with common random numbers.
FitResult fit_conformity(const BandRunConfig& config, const MarketSeries& series,
                         const AdvertisingSchedule& schedule, std::span<const double> p_grid,
                         const ExecOptions& exec = {}, const Scorer& scorer = mse_score,
                         std::string score_tag = "ensemble_mean_mse");

}  // namespace oligo::calib
