#include "oligo/detail/mfa_map.hpp"
#include "oligo/simd/kernels.hpp"

namespace oligo::simd {

void mfa_fixed_point_scalar(bool cf, const MfaBatch& in, double tol, std::int64_t max_iter,
                            MfaBatchResult& out) {
  const std::size_t n = in.size();
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = detail::mfa_iterate(cf, in.p[i], in.h1[i], in.h2[i], in.h3[i],
                                       {in.c1[i], in.c2[i], in.c3[i]}, tol, max_iter);
    out.c1[i] = r.c.c1;
    out.c2[i] = r.c.c2;
    out.c3[i] = r.c.c3;
    out.iterations[i] = r.iterations;
    out.residual[i] = r.residual;
    out.clamped[i] = r.clamped ? 1 : 0;
  }
}

std::array<std::int64_t, 3> tally_scalar(std::span<const std::uint8_t> labels) {
  std::array<std::int64_t, 3> counts{};
  for (auto label : labels) ++counts[label - 1];
  return counts;
}

}  // namespace oligo::simd
