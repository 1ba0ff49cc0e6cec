#include "oligo/mfa.hpp"

#include "oligo/detail/mfa_map.hpp"
#include "oligo/simd/kernels.hpp"

namespace oligo::mfa {

namespace {

detail::MfaLane lane(const Shares& c) { return {c[0], c[1], c[2]}; }

Shares shares(const detail::MfaLane& l) { return Shares::unchecked({l.c1, l.c2, l.c3}); }

void check_options(const FixedPointOptions& options) {
  if (!(options.tol > 0.0)) throw DomainError("fixed-point tolerance must be positive");
  if (options.max_iter < 1) throw DomainError("fixed-point max_iter must be at least 1");
}

}  // namespace

Triple increments(ModelKind model, const Shares& c, double p, const AdvertisingField& h) {
  require_probability(p, "p");
  Triple d{};
  detail::mfa_increments(model == ModelKind::cf, p, h[0], h[1], h[2], lane(c), d[0], d[1], d[2]);
  return d;
}

StepResult step(ModelKind model, const Shares& c, double p, const AdvertisingField& h) {
  require_probability(p, "p");
  detail::MfaLane next{};
  const bool cf = model == ModelKind::cf;
  const bool clamped = detail::mfa_step(cf, p, h[0], h[1], h[2], lane(c), next);
  Triple d{};
  detail::mfa_increments(cf, p, h[0], h[1], h[2], lane(c), d[0], d[1], d[2]);
  return {shares(next), d, clamped};
}

FixedPointResult fixed_point(ModelKind model, const Shares& c0, double p,
                             const AdvertisingField& h, FixedPointOptions options) {
  require_probability(p, "p");
  check_options(options);
  const auto r = detail::mfa_iterate(model == ModelKind::cf, p, h[0], h[1], h[2], lane(c0),
                                     options.tol, options.max_iter);
  return {shares(r.c), r.iterations, r.residual, r.clamped};
}

std::vector<FixedPointResult> fixed_point_scan(ModelKind model, std::span<const ScanNode> nodes,
                                               FixedPointOptions options) {
  check_options(options);
  simd::MfaBatch batch;
  batch.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    require_probability(n.p, "p");
    batch.c1[i] = n.c0[0];
    batch.c2[i] = n.c0[1];
    batch.c3[i] = n.c0[2];
    batch.h1[i] = n.h[0];
    batch.h2[i] = n.h[1];
    batch.h3[i] = n.h[2];
    batch.p[i] = n.p;
  }
  simd::MfaBatchResult out;
  simd::mfa_fixed_point(simd::active_isa(), model == ModelKind::cf, batch, options.tol,
                        options.max_iter, out);

  std::vector<FixedPointResult> results;
  results.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    results.push_back({Shares::unchecked({out.c1[i], out.c2[i], out.c3[i]}), out.iterations[i],
                       out.residual[i], out.clamped[i] != 0});
  }
  return results;
}

}  // namespace oligo::mfa
