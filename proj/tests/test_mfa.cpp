#include "doctest.h"

#include <cmath>

#include "oligo/mfa.hpp"
#include "oligo/rng.hpp"

using namespace oligo;

namespace {

// Independent formulation of the map as pairwise fluxes: s gains
// k c_s^4 c_a from every competitor a and loses k c_a^4 c_s to it.
Triple flux_step(ModelKind model, const Triple& c, double p, const Triple& h) {
  const double k = model == ModelKind::cf ? 1.0 : p;
  Triple out{};
  for (int s = 0; s < 3; ++s) {
    double flux = 0.0;
    for (int a = 0; a < 3; ++a) {
      if (a == s) continue;
      flux += k * (std::pow(c[s], 4) * c[a] - std::pow(c[a], 4) * c[s]);
    }
    out[s] = c[s] + (1.0 - p) * (h[s] - c[s]) + flux;
  }
  return out;
}

Triple random_simplex(Rng& rng) {
  const double a = rng.uniform();
  const double b = rng.uniform();
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  return {lo, hi - lo, 1.0 - hi};
}

}  // namespace

TEST_SUITE("mfa") {

TEST_CASE("CAP at p = 1 from (0.5, 0.3, 0.2)") {
  // Exact rationals: 329/625, 7161/25000, 4679/25000.
  const Shares c(0.5, 0.3, 0.2);
  const auto r = mfa::step(ModelKind::cap, c, 1.0, AdvertisingField::symmetric(1.0 / 3.0));
  CHECK(r.next[0] == doctest::Approx(0.5264).epsilon(1e-14));
  CHECK(r.next[1] == doctest::Approx(0.28644).epsilon(1e-14));
  CHECK(r.next[2] == doctest::Approx(0.18716).epsilon(1e-14));
  CHECK_FALSE(r.clamped);
  CHECK(std::fabs(r.increments[0] + r.increments[1] + r.increments[2]) < 1e-15);
}

TEST_CASE("map agrees with the flux formulation") {
  Rng rng(4);
  for (int i = 0; i < 20000; ++i) {
    const Triple c = random_simplex(rng);
    const Triple h = random_simplex(rng);
    const double p = rng.uniform();
    for (auto model : {ModelKind::cf, ModelKind::cap}) {
      const auto d = mfa::increments(model, Shares::unchecked(c), p, AdvertisingField::unchecked(h));
      const auto ref = flux_step(model, c, p, h);
      for (int s = 0; s < 3; ++s) REQUIRE(c[s] + d[s] == doctest::Approx(ref[s]).epsilon(1e-12));
    }
  }
}

TEST_CASE("increments sum to zero") {
  Rng rng(5);
  for (int i = 0; i < 100000; ++i) {
    const auto c = Shares::unchecked(random_simplex(rng));
    const auto h = AdvertisingField::unchecked(random_simplex(rng));
    const double p = rng.uniform();
    for (auto model : {ModelKind::cf, ModelKind::cap}) {
      const auto d = mfa::increments(model, c, p, h);
      REQUIRE(std::fabs(d[0] + d[1] + d[2]) < 1e-12);
    }
  }
}

TEST_CASE("CAP never leaves the simplex") {
  Rng rng(6);
  for (int i = 0; i < 100000; ++i) {
    const auto c = Shares::unchecked(random_simplex(rng));
    const auto h = AdvertisingField::unchecked(random_simplex(rng));
    REQUIRE_FALSE(mfa::step(ModelKind::cap, c, rng.uniform(), h).clamped);
  }
}

TEST_CASE("CF clamps and renormalises when a share would go negative") {
  const auto r = mfa::step(ModelKind::cf, Shares(0.3, 0.7, 0.0), 0.0, AdvertisingField(0.0, 0.5, 0.5));
  CHECK(r.increments[0] < -0.3);
  CHECK(r.clamped);
  CHECK(r.next[0] == 0.0);
  CHECK(Shares::is_valid(r.next.values()));
}

TEST_CASE("symmetric point is fixed") {
  const auto third = Shares::symmetric(1.0 / 3.0);
  for (auto model : {ModelKind::cf, ModelKind::cap}) {
    for (double p : {0.0, 0.4, 1.0}) {
      const auto r = mfa::step(model, third, p, AdvertisingField::symmetric(1.0 / 3.0));
      for (int s = 0; s < 3; ++s) CHECK(r.next[s] == doctest::Approx(third[s]).epsilon(1e-15));
    }
  }
}

TEST_CASE("CAP at p = 0 maps to h") {
  const auto r = mfa::step(ModelKind::cap, Shares(0.5, 0.3, 0.2), 0.0, AdvertisingField(0.4, 0.3, 0.3));
  CHECK(r.next[0] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(r.next[1] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(r.next[2] == doctest::Approx(0.3).epsilon(1e-15));

  const auto fp = mfa::fixed_point(ModelKind::cap, Shares(0.2, 0.5, 0.3), 0.0, AdvertisingField(0.4, 0.25, 0.35));
  CHECK(fp.iterations <= 2);
  CHECK(fp.residual < 1e-15);
  CHECK(fp.c_inf[0] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(fp.c_inf[1] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(fp.c_inf[2] == doctest::Approx(0.35).epsilon(1e-15));
}

TEST_CASE("CF and CAP coincide at p = 1") {
  Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    const auto c = Shares::unchecked(random_simplex(rng));
    const auto h = AdvertisingField::unchecked(random_simplex(rng));
    const auto a = mfa::step(ModelKind::cf, c, 1.0, h);
    const auto b = mfa::step(ModelKind::cap, c, 1.0, h);
    REQUIRE(a.next == b.next);
  }
}

TEST_CASE("swapping the incumbents commutes with the map") {
  Rng rng(8);
  for (int i = 0; i < 10000; ++i) {
    const double x = 0.5 * rng.uniform();
    const double y = 0.5 * rng.uniform();
    for (auto model : {ModelKind::cf, ModelKind::cap}) {
      const auto r = mfa::step(model, Shares::symmetric(x), rng.uniform(), AdvertisingField::symmetric(y));
      REQUIRE(r.next[0] == r.next[1]);
    }
  }
}

TEST_CASE("fixed points match the high-precision oracle") {
  // tests/oracles/mfa_oracle.py, 60-digit arithmetic.
  struct Case {
    ModelKind model;
    double p;
    AdvertisingField h;
    Shares c0;
    Triple expected;
  };
  const Case cases[] = {
      {ModelKind::cf, 0.4, {0.3, 0.3, 0.4}, {0.4, 0.4, 0.2},
       {0.28987662580041721819, 0.28987662580041721819, 0.42024674839916556362}},
      {ModelKind::cap, 0.5, {0.4, 0.3, 0.3}, {0.4, 0.4, 0.2},
       {0.41055081262605235698, 0.29472459368697382151, 0.29472459368697382151}},
      {ModelKind::cf, 0.6, {0.45, 0.45, 0.1}, {0.3, 0.3, 0.4},
       {0.45904161510526064555, 0.45904161510526064555, 0.081916769789478708903}},
  };
  for (const auto& k : cases) {
    const auto r = mfa::fixed_point(k.model, k.c0, k.p, k.h);
    CHECK(r.residual < 1e-10);
    CHECK_FALSE(r.clamped);
    for (int s = 0; s < 3; ++s) CHECK(std::fabs(r.c_inf[s] - k.expected[s]) < 1e-8);
  }
}

TEST_CASE("at low conformity the fixed point forgets c0") {
  for (auto model : {ModelKind::cf, ModelKind::cap}) {
    for (double p = 0.1; p <= 0.7 + 1e-9; p += 0.1) {
      for (double h : {0.1, 0.25, 1.0 / 3.0, 0.45}) {
        const auto field = AdvertisingField::symmetric(h);
        const auto a = mfa::fixed_point(model, Shares::symmetric(0.2), p, field);
        const auto b = mfa::fixed_point(model, Shares::symmetric(0.45), p, field);
        for (int s = 0; s < 3; ++s) CHECK(std::fabs(a.c_inf[s] - b.c_inf[s]) < 1e-6);
      }
    }
  }
}

TEST_CASE("CF mean field has no critical advertising level") {
  for (double p : {0.2, 0.5, 0.8}) {
    for (int k = 1; k <= 50; ++k) {
      const double h = k / 100.0;
      const auto r = mfa::fixed_point(ModelKind::cf, Shares::symmetric(0.4), p, AdvertisingField::symmetric(h));
      REQUIRE(r.c_inf[0] > 0.0);
    }
  }
}

TEST_CASE("scan equals per-node iteration bit for bit") {
  Rng rng(9);
  std::vector<mfa::ScanNode> nodes;
  for (int i = 0; i < 37; ++i) {
    nodes.push_back({rng.uniform(), AdvertisingField::unchecked(random_simplex(rng)),
                     Shares::unchecked(random_simplex(rng))});
  }
  for (auto model : {ModelKind::cf, ModelKind::cap}) {
    const auto batch = mfa::fixed_point_scan(model, nodes);
    REQUIRE(batch.size() == nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto one = mfa::fixed_point(model, nodes[i].c0, nodes[i].p, nodes[i].h);
      CHECK(batch[i].c_inf == one.c_inf);
      CHECK(batch[i].iterations == one.iterations);
      CHECK(batch[i].residual == one.residual);
      CHECK(batch[i].clamped == one.clamped);
    }
  }
}

TEST_CASE("non-convergence is reported, not thrown") {
  const auto r = mfa::fixed_point(ModelKind::cf, Shares(0.4, 0.4, 0.2), 0.4, AdvertisingField(0.3, 0.3, 0.4), {1e-10, 3});
  CHECK(r.iterations == 3);
  CHECK(r.residual >= 1e-10);
  CHECK_THROWS_AS(mfa::fixed_point(ModelKind::cf, Shares(0.4, 0.4, 0.2), 0.4, AdvertisingField(0.3, 0.3, 0.4), {0.0, 3}),
                  DomainError);
  CHECK_THROWS_AS(mfa::step(ModelKind::cf, Shares(0.4, 0.4, 0.2), 1.5, AdvertisingField(0.3, 0.3, 0.4)), DomainError);
}

}
