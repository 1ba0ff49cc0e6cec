#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "oligo/calibration.hpp"
#include "oligo/mc.hpp"
#include "oligo/mfa.hpp"

namespace oligo::io {

/// Decimal with at least 9 significant digits that parses back to exactly v.
std::string format_number(double v);

/// Writes `content` to a sibling temp file and renames it over `path`.
/// Refuses to replace an existing file unless `force`.
void write_atomic(const std::filesystem::path& path, const std::string& content, bool force);

// Schemas. Every function returns the full CSV text including the header.

/// t,c1,c2,c3
std::string trajectory_csv(std::span<const mc::TrajectorySample> series);

/// p,h,c0,c1_inf,c2_inf,c3_inf,se1,se2,se3
std::string phase_diagram_csv(std::span<const mc::PhasePoint> points);

/// One node of a mean-field scan in phase-diagram layout.
struct MfaRow {
  double p;
  double h;
  double c0;
  mfa::FixedPointResult result;
};

/// p,h,c0,c1_inf,c2_inf,c3_inf,se1,se2,se3,clamped (standard errors are 0).
std::string mfa_scan_csv(std::span<const MfaRow> rows);

/// One mean-field fixed point with explicit triples.
struct MfaPointRow {
  double p;
  AdvertisingField h;
  Shares c0;
  mfa::FixedPointResult result;
};

/// p,h1,h2,h3,c0_1,c0_2,c0_3,c1_inf,c2_inf,c3_inf,iterations,residual,clamped
std::string mfa_point_csv(std::span<const MfaPointRow> rows);

/// Ensemble steady state for one explicit (p, h, c0).
struct SteadyRow {
  double p;
  AdvertisingField h;
  Shares c0;
  mc::EnsembleResult ensemble;
};

/// p,h1,h2,h3,c0_1,c0_2,c0_3,c1_inf,c2_inf,c3_inf,se1,se2,se3,converged
/// (converged is the number of replicas that met the stopping rule).
std::string steady_csv(const SteadyRow& row);

/// quarter,op,lo,med,hi
std::string bands_csv(const calib::QuantileBands& bands);

/// p,score
std::string fit_csv(const calib::FitResult& fit);

/// h,incumbent,se,extinct  (initial scan then bisection probes)
std::string hc_scan_csv(const mc::CriticalField& field);

}  // namespace oligo::io
