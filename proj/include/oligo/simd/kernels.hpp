#pragma once

// Batched data-parallel kernels. Every kernel has a scalar reference and,
// where the build supports it, an AVX2 variant. Variants must produce
// bit-identical output; tests/test_simd.cpp checks this.

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace oligo::simd {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa) noexcept;

/// True if this build contains the variant and the CPU can run it.
bool supported(Isa isa) noexcept;

/// Best supported ISA, unless OLIGOSIM_ISA=scalar|avx2 forces one.
Isa active_isa();

/// Structure-of-arrays batch of mean-field states. All vectors share one length.
struct MfaBatch {
  std::vector<double> c1, c2, c3;
  std::vector<double> h1, h2, h3;
  std::vector<double> p;

  std::size_t size() const noexcept { return c1.size(); }
  void resize(std::size_t n);
};

struct MfaBatchResult {
  std::vector<double> c1, c2, c3;
  std::vector<std::int64_t> iterations;
  std::vector<double> residual;
  std::vector<std::uint8_t> clamped;

  void resize(std::size_t n);
};

/// `cf` selects the conformity coefficient (1 for CF, p for CAP).
void mfa_fixed_point_scalar(bool cf, const MfaBatch& in, double tol, std::int64_t max_iter,
                            MfaBatchResult& out);
void mfa_fixed_point_avx2(bool cf, const MfaBatch& in, double tol, std::int64_t max_iter,
                          MfaBatchResult& out);
void mfa_fixed_point(Isa isa, bool cf, const MfaBatch& in, double tol, std::int64_t max_iter,
                     MfaBatchResult& out);

/// Per-label tally of lattice cells (labels 1..3).
std::array<std::int64_t, 3> tally_scalar(std::span<const std::uint8_t> labels);
std::array<std::int64_t, 3> tally_avx2(std::span<const std::uint8_t> labels);
std::array<std::int64_t, 3> tally(Isa isa, std::span<const std::uint8_t> labels);

}  // namespace oligo::simd
