#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "oligo/lattice.hpp"
#include "oligo/parallel.hpp"
#include "oligo/types.hpp"

namespace oligo::mc {

// Time convention: one sweep is L^2 elementary updates and equals one model
// time unit.

struct SimConfig {
  ModelKind model = ModelKind::cf;
  int L = 100;
  double p = 0.5;
  AdvertisingField field = AdvertisingField::symmetric(1.0 / 3.0);
  Shares c0 = Shares::symmetric(0.4);
  std::uint64_t seed = 1;
  std::int64_t max_sweeps = 5000;

  /// Throws DimensionError / DomainError / ConfigError.
  void validate() const;
};

struct TrajectorySample {
  std::int64_t update = 0;
  double t = 0.0;  // update / L^2
  Shares shares = Shares::symmetric(1.0 / 3.0);
};

/// Executes exactly total_updates random-site updates under config.field and
/// records shares at update 0 and every record_every updates thereafter.
std::vector<TrajectorySample> run_trajectory(const SimConfig& config, std::int64_t total_updates,
                                             std::int64_t record_every);

/// Runs len(fields) segments of updates_per_segment random-site updates each,
/// segment k under fields[k], and returns the shares at the end of each segment.
std::vector<Shares> run_piecewise(Lattice& lattice, ModelKind model, double p,
                                  std::span<const AdvertisingField> fields,
                                  std::int64_t updates_per_segment, Rng& rng);

struct SteadyOptions {
  int delta_T = 100;
  double epsilon = 0.005;
};

struct SteadyStateResult {
  Shares c_inf = Shares::symmetric(1.0 / 3.0);
  std::int64_t t_T = 0;      // start of the first of the two agreeing windows
  int delta_T = 1;
  bool converged = false;
  std::int64_t sweeps = 0;   // sweeps actually simulated or accounted for
};

/// Advances sweep by sweep, recording shares s_0, s_1, ... and stops at the
/// first tau with |mean(s_tau..s_{tau+dT-1}) - mean(s_{tau+dT}..s_{tau+2dT-1})|
/// < epsilon for every operator. Then t_T = tau and c_inf is the mean of the
/// next dT samples, s_{tau+2dT}..s_{tau+3dT-1}. If no such tau exists within
/// max_sweeps, c_inf is the mean of the last dT samples and converged is false.
SteadyStateResult run_to_steady(const SimConfig& config, const SteadyOptions& options = {});

struct EnsembleResult {
  Triple mean{};
  Triple standard_error{};
  std::vector<SteadyStateResult> replicas;

  /// Mean and standard error of the per-replica incumbent share (c1 + c2) / 2.
  double incumbent_mean() const;
  double incumbent_standard_error() const;
  std::size_t converged_count() const;
};

/// Per-operator mean and standard error (sample sd / sqrt(n)) over replicas,
/// accumulated in replica-index order.
EnsembleResult summarize(std::vector<SteadyStateResult> replicas);

/// Replica r runs with seed derive_seed(config.seed, r).
EnsembleResult ensemble_steady(const SimConfig& config, std::size_t n_samples,
                               const SteadyOptions& options = {}, const ExecOptions& exec = {});

struct SweepGrid {
  std::vector<double> p;
  std::vector<double> h;   // incumbent field; node field is (h, h, 1 - 2h)
  std::vector<double> c0;  // incumbent initial share; node c0 is (c0, c0, 1 - 2c0)
};

struct PhasePoint {
  double p = 0.0;
  double h = 0.0;
  double c0 = 0.0;
  Triple mean{};
  Triple standard_error{};
  std::size_t converged = 0;
};

struct PhaseDiagram {
  SweepGrid axes;
  std::vector<PhasePoint> points;  // p-major, then h, then c0
};

/// Ensemble steady states over the grid. Node k (in output order) uses base
/// seed derive_seed(base.seed, k).
PhaseDiagram sweep(const SweepGrid& grid, const SimConfig& base, std::size_t n_samples,
                   const SteadyOptions& options = {}, const ExecOptions& exec = {});

struct HcQuery {
  ModelKind model = ModelKind::cf;
  double p = 0.5;
  double c0 = 0.4;
  int L = 50;
  std::size_t n_samples = 100;
  double extinction_threshold = 0.005;
  double tolerance = 0.01;
  std::uint64_t seed = 1;
  std::int64_t max_sweeps = 5000;
  SteadyOptions steady{};
  int scan_points = 11;
  double h_min = 0.05;
};

struct ScanSample {
  double h = 0.0;
  double incumbent = 0.0;
  double standard_error = 0.0;
  bool extinct = false;
};

struct CriticalField {
  double p = 0.0;
  std::optional<double> h_c;
  std::optional<double> h_lo;
  std::optional<double> h_hi;
  double tolerance = 0.0;
  std::vector<ScanSample> scan;  // initial scan, then bisection probes
};

/// Initial scan is non-monotone in the extinction indicator.
class AmbiguityError : public std::runtime_error {
 public:
  AmbiguityError(const std::string& what, std::vector<ScanSample> scan)
      : std::runtime_error(what), scan_(std::move(scan)) {}
  const std::vector<ScanSample>& scan() const noexcept { return scan_; }

 private:
  std::vector<ScanSample> scan_;
};

/// Scans scan_points equispaced h in [h_min, 0.5], declares extinction where
/// the ensemble-mean incumbent share is below the threshold, and bisects the
/// extinct/surviving bracket down to the tolerance. Every probe reuses the
/// query seed, so neighbouring h values share random streams.
CriticalField find_hc(const HcQuery& query, const ExecOptions& exec = {});

}  // namespace oligo::mc
