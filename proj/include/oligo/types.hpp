#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "oligo/errors.hpp"

namespace oligo {

using Triple = std::array<double, 3>;

/// Tolerance on the component sum of a simplex point.
inline constexpr double kSimplexTolerance = 1e-12;

/// Brand label of a lattice site: 1 and 2 are the incumbents, 3 the entrant.
enum class Operator : std::uint8_t { first = 1, second = 2, entrant = 3 };

constexpr std::size_t index_of(Operator op) noexcept { return static_cast<std::size_t>(op) - 1; }
constexpr Operator operator_from_index(std::size_t i) noexcept {
  return static_cast<Operator>(static_cast<std::uint8_t>(i + 1));
}
Operator operator_from_label(int label);

enum class ModelKind { cf, cap };

ModelKind parse_model(std::string_view name);
std::string_view to_string(ModelKind kind) noexcept;

/// A point on the 2-simplex. The tag keeps market shares and advertising
/// fields from being mixed up at call sites.
template <class Tag>
class Simplex3 {
 public:
  /// Validating constructor; throws DomainError off the simplex.
  Simplex3(double a, double b, double c) : v_{a, b, c} { validate(v_); }
  explicit Simplex3(const Triple& v) : v_(v) { validate(v_); }

  /// Builds (x, x, 1 - 2x), the symmetric-incumbent parametrisation.
  static Simplex3 symmetric(double x) { return Simplex3(x, x, 1.0 - 2.0 * x); }

  /// Skips validation; for hot paths whose inputs are valid by construction.
  static Simplex3 unchecked(const Triple& v) noexcept {
    Simplex3 s;
    s.v_ = v;
    return s;
  }

  double operator[](std::size_t i) const noexcept { return v_[i]; }
  double operator[](Operator op) const noexcept { return v_[index_of(op)]; }
  const Triple& values() const noexcept { return v_; }

  friend bool operator==(const Simplex3&, const Simplex3&) = default;

  static bool is_valid(const Triple& v) noexcept {
    for (double x : v) {
      if (!(x >= 0.0 && x <= 1.0)) return false;
    }
    const double sum = v[0] + v[1] + v[2];
    return sum >= 1.0 - kSimplexTolerance && sum <= 1.0 + kSimplexTolerance;
  }

 private:
  Simplex3() = default;

  static void validate(const Triple& v) {
    if (!is_valid(v)) {
      throw DomainError(std::string(Tag::name) + " (" + std::to_string(v[0]) + ", " +
                        std::to_string(v[1]) + ", " + std::to_string(v[2]) +
                        ") is not on the probability simplex");
    }
  }

  Triple v_{};
};

struct SharesTag {
  static constexpr const char* name = "shares";
};
struct FieldTag {
  static constexpr const char* name = "advertising field";
};

/// Market shares (c1, c2, c3).
using Shares = Simplex3<SharesTag>;
/// Advertising field (h1, h2, h3): the resampling law of the advertising channel.
using AdvertisingField = Simplex3<FieldTag>;

/// Throws DomainError unless p is a probability.
void require_probability(double p, std::string_view what);

}  // namespace oligo
