#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "oligo/rng.hpp"
#include "oligo/types.hpp"

namespace oligo {

/// Smallest side for which the 2x2 panel and its 8 neighbours never overlap.
inline constexpr int kMinSide = 4;

struct Site {
  int x = 0;
  int y = 0;
  friend bool operator==(const Site&, const Site&) = default;
};

/// The 2x2 panel anchored at a site (its top-left corner) and the eight
/// sites orthogonally adjacent to the block. Neighbour order is fixed and
/// defines the order of random draws in apply_update:
///   (x-1,y) (x-1,y+1) (x+2,y) (x+2,y+1) (x,y-1) (x+1,y-1) (x,y+2) (x+1,y+2)
struct PanelGeometry {
  std::array<Site, 4> panel;
  std::array<Site, 8> neighbors;
};

PanelGeometry panel_geometry(Site site, int side);

/// L x L periodic lattice of operator labels with a cached per-operator tally.
class Lattice {
 public:
  /// Uniform lattice; throws DimensionError if side < kMinSide.
  explicit Lattice(int side, Operator fill = Operator::first);

  /// Row-major cells (index y * side + x).
  static Lattice from_cells(int side, std::span<const Operator> cells);

  int side() const noexcept { return side_; }
  std::size_t size() const noexcept { return cells_.size(); }

  Operator at(Site s) const noexcept { return static_cast<Operator>(cells_[index(s)]); }
  void set(Site s, Operator op) noexcept;

  /// Raw labels 1..3, row-major.
  std::span<const std::uint8_t> labels() const noexcept { return cells_; }

  const std::array<std::int64_t, 3>& counts() const noexcept { return counts_; }

  /// Fresh tally of every cell, ignoring the cache.
  std::array<std::int64_t, 3> recount() const;

  std::size_t index(Site s) const noexcept {
    return static_cast<std::size_t>(s.y) * static_cast<std::size_t>(side_) +
           static_cast<std::size_t>(s.x);
  }

  friend bool operator==(const Lattice& a, const Lattice& b) {
    return a.side_ == b.side_ && a.cells_ == b.cells_;
  }

 private:
  friend std::size_t apply_update(Lattice&, Site, ModelKind, double, const AdvertisingField&,
                                  Rng&);

  int side_;
  std::vector<std::uint8_t> cells_;
  std::array<std::int64_t, 3> counts_{};
};

/// Integer counts from largest-remainder rounding of shares * total.
/// Ties in the remainder go to the lower operator index.
std::array<std::int64_t, 3> largest_remainder_counts(const Shares& shares, std::int64_t total);

/// Exact largest-remainder counts placed by a seeded Fisher-Yates shuffle.
Lattice init_lattice(int side, const Shares& c0, Rng& rng);
Lattice init_lattice(int side, const Shares& c0, std::uint64_t seed);

/// One draw from the advertising law: consumes exactly one uniform.
Operator sample_operator(const AdvertisingField& h, Rng& rng);

/// One elementary update of the panel anchored at `site`.
///
/// CF: a unanimous panel sets all eight neighbours to its operator and draws
/// nothing. Otherwise each neighbour, in PanelGeometry order, draws u; if
/// u < 1 - p it draws again and is resampled from h.
///
/// CAP: each neighbour, in order, draws u; if u < p the conformity channel
/// fires (neighbour adopts the panel's operator when the panel is unanimous,
/// no-op otherwise); else it draws again and is resampled from h.
///
/// Neighbour outcomes depend only on the pre-update panel. Returns the
/// number of cells whose label actually changed.
std::size_t apply_update(Lattice& lattice, Site site, ModelKind model, double p,
                         const AdvertisingField& h, Rng& rng);

/// One update at a uniformly random anchor (one extra draw for the site).
std::size_t apply_random_update(Lattice& lattice, ModelKind model, double p,
                                const AdvertisingField& h, Rng& rng);

/// counts / L^2.
Shares concentrations(const Lattice& lattice);

}  // namespace oligo
