#include "oligo/calibration.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "oligo/lattice.hpp"
#include "oligo/mc.hpp"
#include "oligo/rng.hpp"

namespace oligo::calib {

namespace {

constexpr double kRowSumTolerance = 1e-6;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string_view rest(line);
  while (true) {
    const auto comma = rest.find(',');
    out.push_back(trim(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

template <class T>
T parse_number(const std::string& text, const std::string& where) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(where + ": '" + text + "' is not a number");
  }
  return value;
}

Triple normalised_row(Triple v, const std::string& where, const char* what) {
  for (double x : v) {
    if (!(x >= 0.0 && x <= 1.0)) throw ParseError(where + ": " + what + " value outside [0, 1]");
  }
  const double sum = v[0] + v[1] + v[2];
  if (std::fabs(sum - 1.0) > kRowSumTolerance) {
    throw ParseError(where + ": " + what + " sum to " + std::to_string(sum) + ", not 1");
  }
  for (auto& x : v) x /= sum;
  return v;
}

}  // namespace

std::vector<Shares> MarketSeries::observed() const {
  std::vector<Shares> out;
  out.reserve(quarters.size());
  for (const auto& q : quarters) out.push_back(q.observed);
  return out;
}

void validate_series(const MarketSeries& series) {
  if (series.size() < 2) {
    throw ParseError("market series needs at least 2 quarters, got " +
                     std::to_string(series.size()));
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series.quarters[i].quarter != static_cast<int>(i) + 1) {
      throw ParseError("quarter indices must run 1, 2, ...; found " +
                       std::to_string(series.quarters[i].quarter) + " at position " +
                       std::to_string(i + 1));
    }
  }
}

MarketSeries parse_series(std::istream& in, const std::string& source) {
  static const std::vector<std::string> kColumns = {"quarter", "share_1", "share_2", "share_3",
                                                    "adv_1",   "adv_2",   "adv_3"};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw ParseError(source + ": empty file");

  const auto header = split_fields(line);
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < header.size(); ++i) position[header[i]] = i;
  std::vector<std::size_t> column;
  for (const auto& name : kColumns) {
    const auto it = position.find(name);
    if (it == position.end()) throw ParseError(source + ": missing column '" + name + "'");
    column.push_back(it->second);
  }

  MarketSeries series;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    const auto fields = split_fields(line);
    if (fields.size() < header.size()) throw ParseError(where + ": too few fields");
    QuarterRecord rec;
    rec.quarter = parse_number<int>(fields[column[0]], where);
    Triple shares{}, adv{};
    for (std::size_t i = 0; i < 3; ++i) {
      shares[i] = parse_number<double>(fields[column[1 + i]], where);
      adv[i] = parse_number<double>(fields[column[4 + i]], where);
    }
    rec.observed = Shares::unchecked(normalised_row(shares, where, "shares"));
    rec.advertising = AdvertisingField::unchecked(normalised_row(adv, where, "advertising shares"));
    if (!series.quarters.empty() && rec.quarter != series.quarters.back().quarter + 1) {
      throw ParseError(where + ": quarter " + std::to_string(rec.quarter) + " does not follow " +
                       std::to_string(series.quarters.back().quarter));
    }
    if (series.quarters.empty() && rec.quarter != 1) {
      throw ParseError(where + ": first quarter must be 1");
    }
    series.quarters.push_back(rec);
  }
  validate_series(series);
  return series;
}

MarketSeries load_series(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open market series '" + path.string() + "'");
  return parse_series(in, path.string());
}

Adjustment parse_adjustment(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(trim(part));
  if (parts.size() != 4) {
    throw DomainError("adjustment '" + text + "' is not of the form op:from:to:factor");
  }
  Adjustment a;
  const std::string where = "adjustment '" + text + "'";
  try {
    a.target = operator_from_label(parse_number<int>(parts[0], where));
    a.from = parse_number<int>(parts[1], where);
    a.to = parse_number<int>(parts[2], where);
    a.factor = parse_number<double>(parts[3], where);
  } catch (const ParseError& e) {
    throw DomainError(e.what());
  }
  if (a.from > a.to || a.from < 1) throw DomainError(where + ": bad quarter range");
  if (!(a.factor > 0.0 && a.factor <= 1.0)) throw DomainError(where + ": factor not in (0, 1]");
  return a;
}

AdvertisingSchedule build_schedule(const MarketSeries& series,
                                   std::span<const Adjustment> adjustments,
                                   std::int64_t total_updates) {
  validate_series(series);
  const auto T = static_cast<std::int64_t>(series.size());
  if (total_updates < T || total_updates % T != 0) {
    throw ConfigError("total updates " + std::to_string(total_updates) +
                      " is not a positive multiple of the " + std::to_string(T) + " quarters");
  }
  for (const auto& a : adjustments) {
    if (a.from < 1 || a.to > T || a.from > a.to) {
      throw ConfigError("adjustment range [" + std::to_string(a.from) + ", " +
                        std::to_string(a.to) + "] is outside quarters 1.." + std::to_string(T));
    }
    if (!(a.factor > 0.0 && a.factor <= 1.0)) throw ConfigError("adjustment factor not in (0, 1]");
  }

  AdvertisingSchedule schedule;
  schedule.updates_per_quarter = total_updates / T;
  for (const auto& rec : series.quarters) {
    Triple h = rec.advertising.values();
    for (const auto& a : adjustments) {
      if (rec.quarter < a.from || rec.quarter > a.to) continue;
      h[index_of(a.target)] *= a.factor;
      const double sum = h[0] + h[1] + h[2];
      for (auto& x : h) x /= sum;
    }
    schedule.fields.emplace_back(h);
  }
  return schedule;
}

std::vector<Shares> simulate_one(ModelKind model, double p, int L, const Shares& c0,
                                 const AdvertisingSchedule& schedule, std::uint64_t seed) {
  Rng rng(seed);
  Lattice lattice = init_lattice(L, c0, rng);
  return mc::run_piecewise(lattice, model, p, schedule.fields, schedule.updates_per_quarter, rng);
}

TrajectoryMatrix simulate_trajectories(const BandRunConfig& config,
                                       const AdvertisingSchedule& schedule,
                                       const ExecOptions& exec) {
  require_probability(config.p, "p");
  if (config.n_trajectories < 2) throw ConfigError("bands need at least 2 trajectories");
  if (schedule.fields.empty()) throw ConfigError("advertising schedule is empty");
  TrajectoryMatrix out(config.n_trajectories);
  parallel_for(config.n_trajectories, exec, [&](std::size_t r) {
    out[r] = simulate_one(config.model, config.p, config.L, config.c0, schedule,
                          derive_seed(config.seed, r));
  });
  return out;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw DomainError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  const double pos = q * n - 0.5;  // 0-based fractional order statistic
  if (pos <= 0.0) return values.front();
  if (pos >= n - 1.0) return values.back();
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

QuantileBands quantile_bands(const TrajectoryMatrix& trajectories) {
  QuantileBands bands;
  bands.n_trajectories = trajectories.size();
  if (trajectories.empty()) return bands;
  const std::size_t T = trajectories.front().size();
  std::vector<double> column(trajectories.size());
  for (std::size_t t = 0; t < T; ++t) {
    Triple lo{}, med{}, hi{};
    for (std::size_t op = 0; op < 3; ++op) {
      for (std::size_t r = 0; r < trajectories.size(); ++r) column[r] = trajectories[r][t][op];
      lo[op] = quantile(column, 0.025);
      med[op] = quantile(column, 0.5);
      hi[op] = quantile(column, 0.975);
    }
    bands.lower.push_back(lo);
    bands.median.push_back(med);
    bands.upper.push_back(hi);
  }
  return bands;
}

std::vector<Triple> ensemble_mean(const TrajectoryMatrix& trajectories) {
  if (trajectories.empty()) return {};
  std::vector<Triple> mean(trajectories.front().size(), Triple{});
  for (const auto& traj : trajectories) {
    for (std::size_t t = 0; t < mean.size(); ++t) {
      for (std::size_t op = 0; op < 3; ++op) mean[t][op] += traj[t][op];
    }
  }
  for (auto& m : mean) {
    for (auto& x : m) x /= static_cast<double>(trajectories.size());
  }
  return mean;
}

QuantileBands simulate_bands(const BandRunConfig& config, const AdvertisingSchedule& schedule,
                             const ExecOptions& exec) {
  return quantile_bands(simulate_trajectories(config, schedule, exec));
}

double mse_score(std::span<const Shares> observed, std::span<const Triple> predicted) {
  if (observed.size() != predicted.size() || observed.empty()) {
    throw DomainError("observed and predicted series differ in length");
  }
  double sum = 0.0;
  for (std::size_t t = 0; t < observed.size(); ++t) {
    for (std::size_t op = 0; op < 3; ++op) {
      const double d = predicted[t][op] - observed[t][op];
      sum += d * d;
    }
  }
  return sum / static_cast<double>(3 * observed.size());
}

FitResult fit_conformity(const BandRunConfig& config, const MarketSeries& series,
                         const AdvertisingSchedule& schedule, std::span<const double> p_grid,
                         const ExecOptions& exec, const Scorer& scorer, std::string score_tag) {
  if (p_grid.empty()) throw DomainError("p grid is empty");
  for (double p : p_grid) require_probability(p, "p");
  if (schedule.fields.size() != series.size()) {
    throw ConfigError("schedule length does not match the series");
  }
  const auto observed = series.observed();

  FitResult fit;
  fit.score_tag = std::move(score_tag);
  for (double p : p_grid) {
    BandRunConfig run = config;
    run.p = p;
    const auto mean = ensemble_mean(simulate_trajectories(run, schedule, exec));
    fit.p_grid.push_back(p);
    fit.scores.push_back(scorer(observed, mean));
  }
  const auto best = std::min_element(fit.scores.begin(), fit.scores.end());
  fit.best_p = fit.p_grid[static_cast<std::size_t>(best - fit.scores.begin())];
  return fit;
}

}  // namespace oligo::calib
