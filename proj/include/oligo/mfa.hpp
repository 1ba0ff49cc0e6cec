#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "oligo/types.hpp"

namespace oligo::mfa {

/// Result of one application of the mean-field map.
struct StepResult {
  Shares next;
  Triple increments;  // raw c' - c before any clamping
  bool clamped = false;
};

/// Raw increments c'_s - c_s of the mean-field map. For competitors a, b of s:
///   (1-p)(h_s - c_s) + k c_s [c_a (c_s^3 - c_a^3) + c_b (c_s^3 - c_b^3)]
/// with k = p for CAP and k = 1 for CF.
Triple increments(ModelKind model, const Shares& c, double p, const AdvertisingField& h);

/// One step of the map. A negative component is clamped to zero and the
/// triple renormalised; `clamped` records that this happened.
StepResult step(ModelKind model, const Shares& c, double p, const AdvertisingField& h);

struct FixedPointResult {
  Shares c_inf;
  std::int64_t iterations = 0;
  double residual = 0.0;  // max-norm of the last applied increment
  bool clamped = false;   // any step on the way clamped
};

struct FixedPointOptions {
  double tol = 1e-10;
  std::int64_t max_iter = 1'000'000;
};

/// Iterates `step` from c0 until the max-norm increment drops below tol or
/// max_iter is reached. Non-convergence shows up as residual >= tol.
FixedPointResult fixed_point(ModelKind model, const Shares& c0, double p,
                             const AdvertisingField& h, FixedPointOptions options = {});

/// One node of a batched fixed-point scan.
struct ScanNode {
  double p;
  AdvertisingField h;
  Shares c0;
};

/// Fixed points for many independent nodes. Runs on the widest kernel the
/// CPU supports; results are bit-identical to calling fixed_point per node.
std::vector<FixedPointResult> fixed_point_scan(ModelKind model, std::span<const ScanNode> nodes,
                                               FixedPointOptions options = {});

}  // namespace oligo::mfa
