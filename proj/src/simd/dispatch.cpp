#include <cstdlib>
#include <string>

#include "oligo/errors.hpp"
#include "oligo/simd/kernels.hpp"

namespace oligo::simd {

std::string_view to_string(Isa isa) noexcept { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(OLIGOSIM_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() {
  if (const char* forced = std::getenv("OLIGOSIM_ISA"); forced != nullptr && *forced != '\0') {
    const std::string name(forced);
    if (name == "scalar") return Isa::scalar;
    if (name == "avx2" && supported(Isa::avx2)) return Isa::avx2;
    if (name != "avx2") throw ConfigError("OLIGOSIM_ISA='" + name + "' is not scalar or avx2");
  }
  return supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

void MfaBatch::resize(std::size_t n) {
  for (auto* v : {&c1, &c2, &c3, &h1, &h2, &h3, &p}) v->resize(n);
}

void MfaBatchResult::resize(std::size_t n) {
  c1.resize(n);
  c2.resize(n);
  c3.resize(n);
  iterations.resize(n);
  residual.resize(n);
  clamped.resize(n);
}

void mfa_fixed_point(Isa isa, bool cf, const MfaBatch& in, double tol, std::int64_t max_iter,
                     MfaBatchResult& out) {
  if (isa == Isa::avx2 && supported(Isa::avx2)) {
    mfa_fixed_point_avx2(cf, in, tol, max_iter, out);
  } else {
    mfa_fixed_point_scalar(cf, in, tol, max_iter, out);
  }
}

std::array<std::int64_t, 3> tally(Isa isa, std::span<const std::uint8_t> labels) {
  if (isa == Isa::avx2 && supported(Isa::avx2)) return tally_avx2(labels);
  return tally_scalar(labels);
}

#if !defined(OLIGOSIM_HAVE_AVX2)
void mfa_fixed_point_avx2(bool cf, const MfaBatch& in, double tol, std::int64_t max_iter,
                          MfaBatchResult& out) {
  mfa_fixed_point_scalar(cf, in, tol, max_iter, out);
}

std::array<std::int64_t, 3> tally_avx2(std::span<const std::uint8_t> labels) {
  return tally_scalar(labels);
}
#endif

}  // namespace oligo::simd
