#include "oligo/mc.hpp"

#include <cmath>
#include <string>

namespace oligo::mc {

namespace {

std::int64_t sites(int L) { return static_cast<std::int64_t>(L) * L; }

bool monochrome(const Lattice& lattice) {
  const auto n = static_cast<std::int64_t>(lattice.size());
  for (auto c : lattice.counts()) {
    if (c == n) return true;
  }
  return false;
}

void require_increasing(const std::vector<double>& axis, const char* name) {
  if (axis.empty()) throw DomainError(std::string("sweep axis '") + name + "' is empty");
  for (std::size_t i = 1; i < axis.size(); ++i) {
    if (!(axis[i] > axis[i - 1])) {
      throw DomainError(std::string("sweep axis '") + name + "' is not strictly increasing");
    }
  }
}

}  // namespace

void SimConfig::validate() const {
  if (L < kMinSide) {
    throw DimensionError("L = " + std::to_string(L) + " is below " + std::to_string(kMinSide));
  }
  require_probability(p, "p");
  if (max_sweeps < 1) throw ConfigError("max_sweeps must be at least 1");
}

std::vector<TrajectorySample> run_trajectory(const SimConfig& config, std::int64_t total_updates,
                                             std::int64_t record_every) {
  config.validate();
  if (total_updates < 1) throw ConfigError("total_updates must be at least 1");
  if (record_every < 1) throw ConfigError("record_every must be at least 1");
  if (total_updates > config.max_sweeps * sites(config.L)) {
    throw ConfigError("total_updates exceeds max_sweeps * L^2");
  }

  Rng rng(config.seed);
  Lattice lattice = init_lattice(config.L, config.c0, rng);
  const double per_sweep = static_cast<double>(sites(config.L));

  std::vector<TrajectorySample> series;
  series.reserve(static_cast<std::size_t>(total_updates / record_every + 1));
  series.push_back({0, 0.0, concentrations(lattice)});
  for (std::int64_t u = 1; u <= total_updates; ++u) {
    apply_random_update(lattice, config.model, config.p, config.field, rng);
    if (u % record_every == 0) {
      series.push_back({u, static_cast<double>(u) / per_sweep, concentrations(lattice)});
    }
  }
  return series;
}

std::vector<Shares> run_piecewise(Lattice& lattice, ModelKind model, double p,
                                  std::span<const AdvertisingField> fields,
                                  std::int64_t updates_per_segment, Rng& rng) {
  require_probability(p, "p");
  if (updates_per_segment < 1) throw ConfigError("updates_per_segment must be at least 1");
  std::vector<Shares> out;
  out.reserve(fields.size());
  for (const auto& field : fields) {
    for (std::int64_t u = 0; u < updates_per_segment; ++u) {
      apply_random_update(lattice, model, p, field, rng);
    }
    out.push_back(concentrations(lattice));
  }
  return out;
}

SteadyStateResult run_to_steady(const SimConfig& config, const SteadyOptions& options) {
  config.validate();
  if (options.delta_T < 1) throw ConfigError("delta_T must be at least 1");
  if (!(options.epsilon > 0.0)) throw ConfigError("epsilon must be positive");

  Rng rng(config.seed);
  Lattice lattice = init_lattice(config.L, config.c0, rng);
  const std::int64_t per_sweep = sites(config.L);
  const auto dT = static_cast<std::size_t>(options.delta_T);

  // prefix[k] = sum of samples s_0 .. s_{k-1}
  std::vector<Triple> prefix{Triple{}};
  const auto push = [&prefix](const Shares& s) {
    Triple next = prefix.back();
    for (std::size_t i = 0; i < 3; ++i) next[i] += s[i];
    prefix.push_back(next);
  };
  const auto window_mean = [&prefix, dT](std::size_t start) {
    Triple m{};
    for (std::size_t i = 0; i < 3; ++i) {
      m[i] = (prefix[start + dT][i] - prefix[start][i]) / static_cast<double>(dT);
    }
    return m;
  };

  push(concentrations(lattice));
  // A monochrome CF lattice is absorbing: every panel is unanimous and no
  // draw can change it, so later samples are copies of the current one.
  bool frozen = config.model == ModelKind::cf && monochrome(lattice);

  SteadyStateResult result;
  result.delta_T = options.delta_T;
  const auto advance = [&] {
    if (!frozen) {
      for (std::int64_t u = 0; u < per_sweep; ++u) {
        apply_random_update(lattice, config.model, config.p, config.field, rng);
      }
      frozen = config.model == ModelKind::cf && monochrome(lattice);
    }
    push(concentrations(lattice));
  };

  const std::int64_t search_limit = config.max_sweeps - options.delta_T;
  for (std::int64_t sweep = 1; sweep <= search_limit; ++sweep) {
    advance();
    const std::size_t samples = prefix.size() - 1;
    if (samples < 2 * dT) continue;
    const std::size_t tau = samples - 2 * dT;
    const Triple early = window_mean(tau);
    const Triple late = window_mean(tau + dT);
    bool close = true;
    for (std::size_t i = 0; i < 3; ++i) {
      close = close && std::fabs(early[i] - late[i]) < options.epsilon;
    }
    if (close) {
      // Average over a fresh window that played no part in the stopping
      // decision; reusing `late` biases c_inf toward the initial state.
      for (int k = 0; k < options.delta_T; ++k) advance();
      result.c_inf = Shares::unchecked(window_mean(samples));
      result.t_T = static_cast<std::int64_t>(tau);
      result.converged = true;
      result.sweeps = sweep + options.delta_T;
      return result;
    }
  }

  while (static_cast<std::int64_t>(prefix.size()) - 1 < config.max_sweeps + 1) advance();
  const std::size_t samples = prefix.size() - 1;
  const std::size_t start = samples >= dT ? samples - dT : 0;
  Triple m{};
  const double count = static_cast<double>(samples - start);
  for (std::size_t i = 0; i < 3; ++i) m[i] = (prefix[samples][i] - prefix[start][i]) / count;
  result.c_inf = Shares::unchecked(m);
  result.t_T = static_cast<std::int64_t>(start);
  result.converged = false;
  result.sweeps = config.max_sweeps;
  return result;
}

double EnsembleResult::incumbent_mean() const {
  double sum = 0.0;
  for (const auto& r : replicas) sum += 0.5 * (r.c_inf[0] + r.c_inf[1]);
  return replicas.empty() ? 0.0 : sum / static_cast<double>(replicas.size());
}

double EnsembleResult::incumbent_standard_error() const {
  const std::size_t n = replicas.size();
  if (n < 2) return 0.0;
  const double m = incumbent_mean();
  double ss = 0.0;
  for (const auto& r : replicas) {
    const double d = 0.5 * (r.c_inf[0] + r.c_inf[1]) - m;
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
}

std::size_t EnsembleResult::converged_count() const {
  std::size_t k = 0;
  for (const auto& r : replicas) k += r.converged ? 1 : 0;
  return k;
}

EnsembleResult summarize(std::vector<SteadyStateResult> replicas) {
  EnsembleResult out;
  const std::size_t n = replicas.size();
  if (n == 0) return out;
  for (const auto& r : replicas) {
    for (std::size_t i = 0; i < 3; ++i) out.mean[i] += r.c_inf[i];
  }
  for (auto& m : out.mean) m /= static_cast<double>(n);
  if (n >= 2) {
    Triple ss{};
    for (const auto& r : replicas) {
      for (std::size_t i = 0; i < 3; ++i) {
        const double d = r.c_inf[i] - out.mean[i];
        ss[i] += d * d;
      }
    }
    for (std::size_t i = 0; i < 3; ++i) {
      out.standard_error[i] =
          std::sqrt(ss[i] / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
    }
  }
  out.replicas = std::move(replicas);
  return out;
}

EnsembleResult ensemble_steady(const SimConfig& config, std::size_t n_samples,
                               const SteadyOptions& options, const ExecOptions& exec) {
  config.validate();
  if (n_samples < 2) throw ConfigError("an ensemble needs at least 2 samples");
  std::vector<SteadyStateResult> replicas(n_samples);
  parallel_for(n_samples, exec, [&](std::size_t r) {
    SimConfig replica = config;
    replica.seed = derive_seed(config.seed, r);
    replicas[r] = run_to_steady(replica, options);
  });
  return summarize(std::move(replicas));
}

PhaseDiagram sweep(const SweepGrid& grid, const SimConfig& base, std::size_t n_samples,
                   const SteadyOptions& options, const ExecOptions& exec) {
  base.validate();
  if (n_samples < 2) throw ConfigError("an ensemble needs at least 2 samples");
  require_increasing(grid.p, "p");
  require_increasing(grid.h, "h");
  require_increasing(grid.c0, "c0");
  for (double p : grid.p) require_probability(p, "p");
  for (double h : grid.h) {
    if (!(h >= 0.0 && h <= 0.5)) {
      throw DomainError("incumbent field h = " + std::to_string(h) + " is outside [0, 0.5]");
    }
  }
  for (double c : grid.c0) {
    if (!(c > 0.0 && c < 0.5)) {
      throw DomainError("incumbent share c0 = " + std::to_string(c) + " is outside (0, 0.5)");
    }
  }

  PhaseDiagram diagram;
  diagram.axes = grid;
  std::vector<SimConfig> nodes;
  for (double p : grid.p) {
    for (double h : grid.h) {
      for (double c0 : grid.c0) {
        SimConfig node = base;
        node.p = p;
        node.field = AdvertisingField::symmetric(h);
        node.c0 = Shares::symmetric(c0);
        node.seed = derive_seed(base.seed, nodes.size());
        nodes.push_back(node);
        diagram.points.push_back({p, h, c0, {}, {}, 0});
      }
    }
  }

  std::vector<SteadyStateResult> results(nodes.size() * n_samples);
  parallel_for(results.size(), exec, [&](std::size_t task) {
    const std::size_t node = task / n_samples;
    const std::size_t r = task % n_samples;
    SimConfig replica = nodes[node];
    replica.seed = derive_seed(nodes[node].seed, r);
    results[task] = run_to_steady(replica, options);
  });

  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto first = results.begin() + static_cast<std::ptrdiff_t>(k * n_samples);
    auto summary = summarize({first, first + static_cast<std::ptrdiff_t>(n_samples)});
    diagram.points[k].mean = summary.mean;
    diagram.points[k].standard_error = summary.standard_error;
    diagram.points[k].converged = summary.converged_count();
  }
  return diagram;
}

CriticalField find_hc(const HcQuery& query, const ExecOptions& exec) {
  require_probability(query.p, "p");
  if (!(query.tolerance > 0.0)) throw ConfigError("h_c tolerance must be positive");
  if (query.scan_points < 2) throw ConfigError("h_c scan needs at least 2 points");
  if (!(query.h_min >= 0.0 && query.h_min < 0.5)) throw DomainError("h_min must be in [0, 0.5)");
  if (!(query.c0 > 0.0 && query.c0 < 0.5)) throw DomainError("c0 must be in (0, 0.5)");

  SimConfig base;
  base.model = query.model;
  base.L = query.L;
  base.p = query.p;
  base.c0 = Shares::symmetric(query.c0);
  base.seed = query.seed;
  base.max_sweeps = query.max_sweeps;

  CriticalField out;
  out.p = query.p;
  out.tolerance = query.tolerance;

  const auto probe = [&](double h) {
    SimConfig config = base;
    config.field = AdvertisingField::symmetric(h);
    const auto ensemble = ensemble_steady(config, query.n_samples, query.steady, exec);
    ScanSample s{h, ensemble.incumbent_mean(), ensemble.incumbent_standard_error(), false};
    s.extinct = s.incumbent < query.extinction_threshold;
    out.scan.push_back(s);
    return s.extinct;
  };

  const double step = (0.5 - query.h_min) / (query.scan_points - 1);
  std::vector<bool> extinct;
  for (int k = 0; k < query.scan_points; ++k) {
    const double h = k + 1 == query.scan_points ? 0.5 : query.h_min + step * k;
    extinct.push_back(probe(h));
  }

  // Expected pattern: extinct ... extinct, surviving ... surviving.
  std::size_t first_surviving = extinct.size();
  for (std::size_t k = 0; k < extinct.size(); ++k) {
    if (!extinct[k]) {
      first_surviving = k;
      break;
    }
  }
  for (std::size_t k = first_surviving; k < extinct.size(); ++k) {
    if (extinct[k]) {
      throw AmbiguityError("extinction indicator is not monotone in h across the scan", out.scan);
    }
  }
  if (first_surviving == 0 || first_surviving == extinct.size()) return out;

  double lo = out.scan[first_surviving - 1].h;
  double hi = out.scan[first_surviving].h;
  while (hi - lo > query.tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (probe(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.h_lo = lo;
  out.h_hi = hi;
  out.h_c = 0.5 * (lo + hi);
  return out;
}

}  // namespace oligo::mc
