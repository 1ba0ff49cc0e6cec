#include "oligo/lattice.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "oligo/simd/kernels.hpp"

namespace oligo {

namespace {

void require_side(int side) {
  if (side < kMinSide) {
    throw DimensionError("lattice side " + std::to_string(side) + " is below the minimum " +
                         std::to_string(kMinSide));
  }
}

inline int wrap(int v, int side) noexcept {
  if (v < 0) return v + side;
  if (v >= side) return v - side;
  return v;
}

inline Operator draw_operator(double h1, double h12, bool h3_empty, double u) noexcept {
  if (u < h1) return Operator::first;
  if (u < h12 || h3_empty) return Operator::second;
  return Operator::entrant;
}

}  // namespace

PanelGeometry panel_geometry(Site site, int side) {
  require_side(side);
  if (site.x < 0 || site.x >= side || site.y < 0 || site.y >= side) {
    throw DomainError("site (" + std::to_string(site.x) + ", " + std::to_string(site.y) +
                      ") is outside the lattice");
  }
  const int x = site.x;
  const int y = site.y;
  const auto at = [side](int a, int b) { return Site{wrap(a, side), wrap(b, side)}; };
  return PanelGeometry{
      {at(x, y), at(x + 1, y), at(x, y + 1), at(x + 1, y + 1)},
      {at(x - 1, y), at(x - 1, y + 1), at(x + 2, y), at(x + 2, y + 1), at(x, y - 1),
       at(x + 1, y - 1), at(x, y + 2), at(x + 1, y + 2)},
  };
}

Lattice::Lattice(int side, Operator fill) : side_(side) {
  require_side(side);
  cells_.assign(static_cast<std::size_t>(side) * static_cast<std::size_t>(side),
                static_cast<std::uint8_t>(fill));
  counts_[index_of(fill)] = static_cast<std::int64_t>(cells_.size());
}

Lattice Lattice::from_cells(int side, std::span<const Operator> cells) {
  Lattice lattice(side);
  if (cells.size() != lattice.size()) {
    throw DimensionError("expected " + std::to_string(lattice.size()) + " cells, got " +
                         std::to_string(cells.size()));
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto label = static_cast<int>(cells[i]);
    operator_from_label(label);
    lattice.cells_[i] = static_cast<std::uint8_t>(label);
  }
  lattice.counts_ = lattice.recount();
  return lattice;
}

void Lattice::set(Site s, Operator op) noexcept {
  auto& cell = cells_[index(s)];
  --counts_[cell - 1];
  cell = static_cast<std::uint8_t>(op);
  ++counts_[cell - 1];
}

std::array<std::int64_t, 3> Lattice::recount() const {
  return simd::tally(simd::active_isa(), cells_);
}

std::array<std::int64_t, 3> largest_remainder_counts(const Shares& shares, std::int64_t total) {
  std::array<std::int64_t, 3> counts{};
  std::array<double, 3> remainder{};
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double exact = shares[i] * static_cast<double>(total);
    counts[i] = static_cast<std::int64_t>(exact);
    remainder[i] = exact - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  // Floors never exceed the total for shares summing to 1 within 1e-12.
  for (std::size_t k = 0; assigned < total; k = (k + 1) % 3) {
    ++counts[order[k]];
    ++assigned;
  }
  return counts;
}

Lattice init_lattice(int side, const Shares& c0, Rng& rng) {
  require_side(side);
  Lattice lattice(side);
  const auto n = static_cast<std::int64_t>(lattice.size());
  const auto counts = largest_remainder_counts(c0, n);

  std::vector<Operator> cells;
  cells.reserve(lattice.size());
  for (std::size_t i = 0; i < 3; ++i) {
    cells.insert(cells.end(), static_cast<std::size_t>(counts[i]), operator_from_index(i));
  }
  for (std::size_t i = cells.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(cells[i - 1], cells[j]);
  }
  return Lattice::from_cells(side, cells);
}

Lattice init_lattice(int side, const Shares& c0, std::uint64_t seed) {
  Rng rng(seed);
  return init_lattice(side, c0, rng);
}

Operator sample_operator(const AdvertisingField& h, Rng& rng) {
  return draw_operator(h[0], h[0] + h[1], h[2] == 0.0, rng.uniform());
}

std::size_t apply_update(Lattice& lattice, Site site, ModelKind model, double p,
                         const AdvertisingField& h, Rng& rng) {
  const int side = lattice.side_;
  const int x = site.x;
  const int y = site.y;
  const int xl = wrap(x - 1, side), x1 = wrap(x + 1, side), x2 = wrap(x + 2, side);
  const int yu = wrap(y - 1, side), y1 = wrap(y + 1, side), y2 = wrap(y + 2, side);

  auto* cells = lattice.cells_.data();
  const auto at = [side](int cx, int cy) {
    return static_cast<std::size_t>(cy) * static_cast<std::size_t>(side) +
           static_cast<std::size_t>(cx);
  };

  const std::uint8_t o = cells[at(x, y)];
  const bool unanimous = cells[at(x1, y)] == o && cells[at(x, y1)] == o && cells[at(x1, y1)] == o;

  const std::array<std::size_t, 8> neighbors{at(xl, y), at(xl, y1), at(x2, y), at(x2, y1),
                                             at(x, yu), at(x1, yu), at(x, y2), at(x1, y2)};

  const double h1 = h[0];
  const double h12 = h[0] + h[1];
  const bool h3_empty = h[2] == 0.0;
  auto& counts = lattice.counts_;
  std::size_t changed = 0;
  const auto assign = [&](std::size_t idx, std::uint8_t label) {
    std::uint8_t& cell = cells[idx];
    if (cell != label) {
      --counts[cell - 1];
      ++counts[label - 1];
      cell = label;
      ++changed;
    }
  };

  if (model == ModelKind::cf) {
    if (unanimous) {
      for (auto idx : neighbors) assign(idx, o);
    } else {
      const double advertise = 1.0 - p;
      for (auto idx : neighbors) {
        if (rng.uniform() < advertise) {
          assign(idx, static_cast<std::uint8_t>(draw_operator(h1, h12, h3_empty, rng.uniform())));
        }
      }
    }
  } else {
    for (auto idx : neighbors) {
      if (rng.uniform() < p) {
        if (unanimous) assign(idx, o);
      } else {
        assign(idx, static_cast<std::uint8_t>(draw_operator(h1, h12, h3_empty, rng.uniform())));
      }
    }
  }
  return changed;
}

std::size_t apply_random_update(Lattice& lattice, ModelKind model, double p,
                                const AdvertisingField& h, Rng& rng) {
  const auto idx = rng.below(lattice.size());
  const auto side = static_cast<std::uint64_t>(lattice.side());
  const Site site{static_cast<int>(idx % side), static_cast<int>(idx / side)};
  return apply_update(lattice, site, model, p, h, rng);
}

Shares concentrations(const Lattice& lattice) {
  const auto n = static_cast<double>(lattice.size());
  const auto& c = lattice.counts();
  return Shares::unchecked({static_cast<double>(c[0]) / n, static_cast<double>(c[1]) / n,
                            static_cast<double>(c[2]) / n});
}

}  // namespace oligo
