#pragma once

// Scalar arithmetic of the mean-field map, shared by the public API and the
// scalar batch kernel. The AVX2 kernel mirrors this operation order exactly.

#include <algorithm>
#include <cmath>

namespace oligo::detail {

struct MfaLane {
  double c1, c2, c3;
};

inline void mfa_increments(bool cf, double p, double h1, double h2, double h3, const MfaLane& c,
                           double& d1, double& d2, double& d3) noexcept {
  const double adv = 1.0 - p;
  const double k = cf ? 1.0 : p;
  const double q1 = c.c1 * c.c1 * c.c1;
  const double q2 = c.c2 * c.c2 * c.c2;
  const double q3 = c.c3 * c.c3 * c.c3;
  const double b1 = c.c2 * (q1 - q2) + c.c3 * (q1 - q3);
  const double b2 = c.c1 * (q2 - q1) + c.c3 * (q2 - q3);
  const double b3 = c.c1 * (q3 - q1) + c.c2 * (q3 - q2);
  d1 = adv * (h1 - c.c1) + (k * c.c1) * b1;
  d2 = adv * (h2 - c.c2) + (k * c.c2) * b2;
  d3 = adv * (h3 - c.c3) + (k * c.c3) * b3;
}

/// Returns true if the step clamped.
inline bool mfa_step(bool cf, double p, double h1, double h2, double h3, const MfaLane& c,
                     MfaLane& next) noexcept {
  double d1, d2, d3;
  mfa_increments(cf, p, h1, h2, h3, c, d1, d2, d3);
  next.c1 = c.c1 + d1;
  next.c2 = c.c2 + d2;
  next.c3 = c.c3 + d3;
  if (next.c1 < 0.0 || next.c2 < 0.0 || next.c3 < 0.0) {
    if (next.c1 < 0.0) next.c1 = 0.0;
    if (next.c2 < 0.0) next.c2 = 0.0;
    if (next.c3 < 0.0) next.c3 = 0.0;
    const double sum = (next.c1 + next.c2) + next.c3;
    next.c1 = next.c1 / sum;
    next.c2 = next.c2 / sum;
    next.c3 = next.c3 / sum;
    return true;
  }
  return false;
}

/// Max-norm of next - c.
inline double mfa_residual(const MfaLane& c, const MfaLane& next) noexcept {
  const double a = std::fabs(next.c1 - c.c1);
  const double b = std::fabs(next.c2 - c.c2);
  const double d = std::fabs(next.c3 - c.c3);
  // Same selection rule as _mm256_max_pd(x, y): y unless x > y.
  const double ab = a > b ? a : b;
  return ab > d ? ab : d;
}

struct MfaLaneResult {
  MfaLane c;
  long long iterations = 0;
  double residual = 0.0;
  bool clamped = false;
};

inline MfaLaneResult mfa_iterate(bool cf, double p, double h1, double h2, double h3, MfaLane c,
                                 double tol, long long max_iter) noexcept {
  MfaLaneResult r;
  while (r.iterations < max_iter) {
    MfaLane next;
    r.clamped = mfa_step(cf, p, h1, h2, h3, c, next) || r.clamped;
    r.residual = mfa_residual(c, next);
    c = next;
    ++r.iterations;
    if (r.residual < tol) break;
  }
  r.c = c;
  return r;
}

}  // namespace oligo::detail
