#include "oligo/cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <ostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "manifest.hpp"
#include "oligo/calibration.hpp"
#include "oligo/csv_io.hpp"
#include "oligo/mc.hpp"
#include "oligo/mfa.hpp"
#include "oligo/parallel.hpp"
#include "oligo/rng.hpp"

namespace oligo::cli {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), last, v);
  if (text.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw DomainError("'" + std::string(text) + "' is not a number");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == sep) {
      parts.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

}  // namespace

std::vector<double> parse_range(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() == 1) return {parse_number(parts[0])};
  if (parts.size() != 3) {
    throw DomainError("range '" + std::string(text) + "' is not of the form start:stop:step");
  }
  const double start = parse_number(parts[0]);
  const double stop = parse_number(parts[1]);
  const double step = parse_number(parts[2]);
  if (!(step > 0.0)) throw DomainError("range '" + std::string(text) + "' needs a positive step");
  if (stop < start) throw DomainError("range '" + std::string(text) + "' has stop < start");
  const double span = std::floor((stop - start) / step + 1e-9);
  if (span >= 1e6) throw DomainError("range '" + std::string(text) + "' has too many points");
  std::vector<double> values;
  for (long long k = 0; k <= static_cast<long long>(span); ++k) {
    values.push_back(std::round((start + static_cast<double>(k) * step) * 1e12) / 1e12);
  }
  return values;
}

Triple parse_triple(std::string_view text) {
  const auto parts = split(text, ',');
  if (parts.size() == 1) {
    const double x = parse_number(parts[0]);
    return {x, x, 1.0 - 2.0 * x};
  }
  if (parts.size() != 3) {
    throw DomainError("'" + std::string(text) + "' is neither a scalar nor a comma triple");
  }
  return {parse_number(parts[0]), parse_number(parts[1]), parse_number(parts[2])};
}

namespace {

// Raw flag values of one subcommand. Presence of optional flags is read from
// the CLI11 option objects.
struct Flags {
  std::string model = "cf";
  std::string p;
  std::string h;
  std::string c0;
  std::string p_grid = "0.1:0.9:0.05";
  std::string preset = "full";
  int L = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  long long updates = 0;
  long long record_every = 0;
  int delta_T = 100;
  double epsilon = 0.005;
  long long max_sweeps = 5000;
  double extinction_threshold = 0.005;
  double tol = 0.0;
  long long max_iter = 1000000;
  int scan_points = 11;
  double h_min = 0.05;
  std::string data;
  std::vector<std::string> adjust;
  bool no_adjust = false;
  std::string out;
  bool force = false;
  unsigned threads = 0;

  CLI::Option* L_opt = nullptr;
  CLI::Option* n_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* updates_opt = nullptr;
  CLI::Option* record_opt = nullptr;
  CLI::Option* adjust_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
};

struct Outcome {
  std::string csv;
  json results = json::object();
  std::string summary;
};

constexpr const char* kSubcommands[] = {"simulate", "steady", "sweep", "hc", "mfa", "bands", "fit"};

void add_io(CLI::App* sub, Flags& f, bool threaded) {
  sub->add_option("--out", f.out, "Output CSV path (stdout if omitted)");
  sub->add_flag("--force", f.force, "Overwrite existing outputs");
  if (threaded) {
    f.threads_opt = sub->add_option("--threads", f.threads, "Worker threads (1 = serial audit mode)")
                        ->check(CLI::PositiveNumber);
  }
}

void add_model(CLI::App* sub, Flags& f) {
  sub->add_option("--model", f.model, "cf or cap")->capture_default_str();
}

void add_seed(CLI::App* sub, Flags& f) {
  f.seed_opt = sub->add_option("--seed", f.seed, "Base seed (falls back to OLIGOSIM_SEED, then 1)");
}

void add_scale(CLI::App* sub, Flags& f, bool ensemble) {
  f.L_opt = sub->add_option("--L", f.L, "Lattice side");
  if (ensemble) {
    f.n_opt = sub->add_option("--n", f.n, "Replicas / trajectories");
    sub->add_option("--preset", f.preset, "Default scale: full (L=100, n=1000) or acceptance (L=50, n=100)")
        ->check(CLI::IsMember({"full", "acceptance"}))
        ->capture_default_str();
  }
}

void add_steady(CLI::App* sub, Flags& f) {
  sub->add_option("--delta-T", f.delta_T, "Averaging window in sweeps")->capture_default_str();
  sub->add_option("--epsilon", f.epsilon, "Window-mean agreement tolerance")->capture_default_str();
  sub->add_option("--max-sweeps", f.max_sweeps, "Sweep cap per replica")->capture_default_str();
}

void add_market(CLI::App* sub, Flags& f) {
  sub->add_option("--data", f.data, "Quarterly market CSV")->required();
  f.c0 = "0.4";
  sub->add_option("--c0", f.c0, "Initial shares: scalar incumbent share or triple")->capture_default_str();
  f.updates = 4212;
  f.updates_opt = sub->add_option("--updates", f.updates, "Total updates over the series")->capture_default_str();
  f.adjust_opt = sub->add_option("--adjust", f.adjust, "Advertising adjustment op:from:to:factor (repeatable)");
  sub->add_flag("--no-adjust", f.no_adjust, "Use the advertising series unadjusted")->excludes(f.adjust_opt);
  add_scale(sub, f, true);
  add_seed(sub, f);
}

std::uint64_t resolve_seed(const Flags& f) {
  if (f.seed_opt != nullptr && f.seed_opt->count() > 0) return f.seed;
  if (const char* env = std::getenv("OLIGOSIM_SEED"); env != nullptr && *env != '\0') {
    std::uint64_t v = 0;
    const std::string_view text(env);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw DomainError("OLIGOSIM_SEED '" + std::string(text) + "' is not an unsigned integer");
    }
    return v;
  }
  return 1;
}

int resolve_L(const Flags& f) {
  if (f.L_opt->count() > 0) return f.L;
  return f.preset == "acceptance" ? 50 : 100;
}

std::size_t resolve_n(const Flags& f) {
  if (f.n_opt->count() > 0) return f.n;
  return f.preset == "acceptance" ? 100 : 1000;
}

json triple_json(const Triple& t) { return json::array({t[0], t[1], t[2]}); }

Triple triple_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ParseError("expected a triple, got " + j.dump());
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

double scalar_arg(const std::string& text, const char* flag) {
  const auto values = parse_range(text);
  if (values.size() != 1 || text.find(':') != std::string::npos) {
    throw DomainError(std::string(flag) + " takes a single value here");
  }
  return values.front();
}

std::string canonical_adjustment(const calib::Adjustment& a) {
  return std::to_string(index_of(a.target) + 1) + ':' + std::to_string(a.from) + ':' +
         std::to_string(a.to) + ':' + io::format_number(a.factor);
}

json market_config(const Flags& f) {
  const Shares c0(parse_triple(f.c0));
  std::vector<std::string> adjust;
  if (!f.no_adjust) {
    if (f.adjust_opt->count() > 0) {
      for (const auto& text : f.adjust) adjust.push_back(canonical_adjustment(calib::parse_adjustment(text)));
    } else {
      adjust.push_back(canonical_adjustment(calib::Adjustment{}));
    }
  }
  if (f.data.empty()) throw DomainError("--data is empty");
  return {
      {"model", std::string(to_string(parse_model(f.model)))},
      {"data", std::filesystem::absolute(f.data).lexically_normal().string()},
      {"c0", triple_json(c0.values())},
      {"updates", f.updates},
      {"adjust", adjust},
      {"L", resolve_L(f)},
      {"n", resolve_n(f)},
      {"seed", resolve_seed(f)},
  };
}

// Flags -> fully resolved configuration. Every default is materialised here,
// so the configuration alone determines the run.
json resolve(const std::string& command, const Flags& f) {
  const std::string model(to_string(parse_model(f.model)));
  if (command == "simulate" || command == "steady") {
    const double p = scalar_arg(f.p, "--p");
    const AdvertisingField h(f.h.empty() ? AdvertisingField::symmetric(1.0 / 3.0).values() : parse_triple(f.h));
    const Shares c0(parse_triple(f.c0));
    json c = {{"model", model}, {"p", p},       {"h", triple_json(h.values())},
              {"c0", triple_json(c0.values())}, {"L", resolve_L(f)},
              {"seed", resolve_seed(f)},        {"max_sweeps", f.max_sweeps}};
    const auto sites = static_cast<long long>(c["L"].get<int>()) * c["L"].get<int>();
    if (command == "simulate") {
      c["updates"] = f.updates_opt->count() > 0 ? f.updates : 100 * sites;
      c["record_every"] = f.record_opt->count() > 0 ? f.record_every : sites;
    } else {
      c["n"] = resolve_n(f);
      c["delta_T"] = f.delta_T;
      c["epsilon"] = f.epsilon;
    }
    return c;
  }
  if (command == "sweep") {
    return {{"model", model},
            {"p", parse_range(f.p)},
            {"h", parse_range(f.h)},
            {"c0", parse_range(f.c0)},
            {"L", resolve_L(f)},
            {"n", resolve_n(f)},
            {"seed", resolve_seed(f)},
            {"delta_T", f.delta_T},
            {"epsilon", f.epsilon},
            {"max_sweeps", f.max_sweeps}};
  }
  if (command == "hc") {
    return {{"model", model},
            {"p", scalar_arg(f.p, "--p")},
            {"c0", scalar_arg(f.c0, "--c0")},
            {"L", resolve_L(f)},
            {"n", resolve_n(f)},
            {"seed", resolve_seed(f)},
            {"delta_T", f.delta_T},
            {"epsilon", f.epsilon},
            {"max_sweeps", f.max_sweeps},
            {"extinction_threshold", f.extinction_threshold},
            {"tolerance", f.tol},
            {"scan_points", f.scan_points},
            {"h_min", f.h_min}};
  }
  if (command == "mfa") {
    json c = {{"model", model}, {"p", parse_range(f.p)}, {"tol", f.tol}, {"max_iter", f.max_iter}};
    const std::string h = f.h.empty() ? "0.3333333333333333,0.3333333333333333,0.3333333333333334" : f.h;
    const bool point = h.find(',') != std::string::npos || f.c0.find(',') != std::string::npos;
    if (point) {
      c["mode"] = "point";
      c["h"] = triple_json(AdvertisingField(parse_triple(h)).values());
      c["c0"] = triple_json(Shares(parse_triple(f.c0)).values());
    } else {
      c["mode"] = "scan";
      c["h"] = parse_range(h);
      c["c0"] = parse_range(f.c0);
    }
    return c;
  }
  if (command == "bands") {
    json c = market_config(f);
    c["model"] = model;
    c["p"] = scalar_arg(f.p, "--p");
    return c;
  }
  if (command == "fit") {
    json c = market_config(f);
    c["model"] = model;
    c["p_grid"] = parse_range(f.p_grid);
    return c;
  }
  throw DomainError("unknown subcommand '" + command + "'");
}

mc::SteadyOptions steady_options(const json& c) {
  mc::SteadyOptions o;
  o.delta_T = c.at("delta_T").get<int>();
  o.epsilon = c.at("epsilon").get<double>();
  return o;
}

mc::SimConfig sim_config(const json& c) {
  mc::SimConfig s;
  s.model = parse_model(c.at("model").get<std::string>());
  s.L = c.at("L").get<int>();
  s.p = c.at("p").get<double>();
  s.field = AdvertisingField(triple_from(c.at("h")));
  s.c0 = Shares(triple_from(c.at("c0")));
  s.seed = c.at("seed").get<std::uint64_t>();
  s.max_sweeps = c.at("max_sweeps").get<std::int64_t>();
  return s;
}

struct Market {
  calib::MarketSeries series;
  calib::AdvertisingSchedule schedule;
  calib::BandRunConfig run;
};

Market market(const json& c) {
  Market m;
  m.series = calib::load_series(c.at("data").get<std::string>());
  calib::validate_series(m.series);
  std::vector<calib::Adjustment> adjust;
  for (const auto& a : c.at("adjust")) adjust.push_back(calib::parse_adjustment(a.get<std::string>()));
  m.schedule = calib::build_schedule(m.series, adjust, c.at("updates").get<std::int64_t>());
  m.run.model = parse_model(c.at("model").get<std::string>());
  m.run.L = c.at("L").get<int>();
  m.run.c0 = Shares(triple_from(c.at("c0")));
  m.run.n_trajectories = c.at("n").get<std::size_t>();
  m.run.seed = c.at("seed").get<std::uint64_t>();
  return m;
}

Outcome execute(const std::string& command, const json& c, const ExecOptions& exec) {
  Outcome o;
  if (command == "simulate") {
    const auto series = mc::run_trajectory(sim_config(c), c.at("updates").get<std::int64_t>(),
                                           c.at("record_every").get<std::int64_t>());
    o.csv = io::trajectory_csv(series);
  } else if (command == "steady") {
    const auto sim = sim_config(c);
    const auto n = c.at("n").get<std::size_t>();
    io::SteadyRow row{sim.p, sim.field, sim.c0, {}};
    if (n == 1) {
      auto single = sim;
      single.seed = derive_seed(sim.seed, 0);
      row.ensemble = mc::summarize({mc::run_to_steady(single, steady_options(c))});
    } else {
      row.ensemble = mc::ensemble_steady(sim, n, steady_options(c), exec);
    }
    o.csv = io::steady_csv(row);
    o.results = {{"converged", row.ensemble.converged_count()}, {"replicas", n}};
  } else if (command == "sweep") {
    mc::SweepGrid grid;
    grid.p = c.at("p").get<std::vector<double>>();
    grid.h = c.at("h").get<std::vector<double>>();
    grid.c0 = c.at("c0").get<std::vector<double>>();
    mc::SimConfig base;
    base.model = parse_model(c.at("model").get<std::string>());
    base.L = c.at("L").get<int>();
    base.seed = c.at("seed").get<std::uint64_t>();
    base.max_sweeps = c.at("max_sweeps").get<std::int64_t>();
    const auto diagram = mc::sweep(grid, base, c.at("n").get<std::size_t>(), steady_options(c), exec);
    o.csv = io::phase_diagram_csv(diagram.points);
  } else if (command == "hc") {
    mc::HcQuery q;
    q.model = parse_model(c.at("model").get<std::string>());
    q.p = c.at("p").get<double>();
    q.c0 = c.at("c0").get<double>();
    q.L = c.at("L").get<int>();
    q.n_samples = c.at("n").get<std::size_t>();
    q.seed = c.at("seed").get<std::uint64_t>();
    q.max_sweeps = c.at("max_sweeps").get<std::int64_t>();
    q.steady = steady_options(c);
    q.extinction_threshold = c.at("extinction_threshold").get<double>();
    q.tolerance = c.at("tolerance").get<double>();
    q.scan_points = c.at("scan_points").get<int>();
    q.h_min = c.at("h_min").get<double>();
    const auto field = mc::find_hc(q, exec);
    o.csv = io::hc_scan_csv(field);
    if (field.h_c) {
      o.results = {{"h_c", *field.h_c}, {"h_lo", *field.h_lo}, {"h_hi", *field.h_hi}};
      o.summary = "h_c=" + io::format_number(*field.h_c) + " h_lo=" + io::format_number(*field.h_lo) +
                  " h_hi=" + io::format_number(*field.h_hi);
    } else {
      o.results = {{"h_c", nullptr}};
      o.summary = "h_c=none";
    }
  } else if (command == "mfa") {
    const auto model = parse_model(c.at("model").get<std::string>());
    mfa::FixedPointOptions options;
    options.tol = c.at("tol").get<double>();
    options.max_iter = c.at("max_iter").get<std::int64_t>();
    const auto ps = c.at("p").get<std::vector<double>>();
    if (c.at("mode").get<std::string>() == "point") {
      const AdvertisingField h(triple_from(c.at("h")));
      const Shares c0(triple_from(c.at("c0")));
      std::vector<mfa::ScanNode> nodes;
      for (double p : ps) nodes.push_back({p, h, c0});
      const auto results = mfa::fixed_point_scan(model, nodes, options);
      std::vector<io::MfaPointRow> rows;
      for (std::size_t i = 0; i < nodes.size(); ++i) rows.push_back({nodes[i].p, h, c0, results[i]});
      o.csv = io::mfa_point_csv(rows);
    } else {
      const auto hs = c.at("h").get<std::vector<double>>();
      const auto c0s = c.at("c0").get<std::vector<double>>();
      std::vector<mfa::ScanNode> nodes;
      for (double p : ps) {
        for (double h : hs) {
          for (double c0 : c0s) nodes.push_back({p, AdvertisingField::symmetric(h), Shares::symmetric(c0)});
        }
      }
      const auto results = mfa::fixed_point_scan(model, nodes, options);
      std::vector<io::MfaRow> rows;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto hi = (i / c0s.size()) % hs.size();
        rows.push_back({nodes[i].p, hs[hi], c0s[i % c0s.size()], results[i]});
      }
      o.csv = io::mfa_scan_csv(rows);
    }
  } else if (command == "bands") {
    auto m = market(c);
    m.run.p = c.at("p").get<double>();
    o.csv = io::bands_csv(calib::simulate_bands(m.run, m.schedule, exec));
  } else if (command == "fit") {
    auto m = market(c);
    const auto grid = c.at("p_grid").get<std::vector<double>>();
    const auto fit = calib::fit_conformity(m.run, m.series, m.schedule, grid, exec);
    o.csv = io::fit_csv(fit);
    o.results = {{"best_p", fit.best_p}, {"score", fit.score_tag}};
    o.summary = "best_p=" + io::format_number(fit.best_p);
  } else {
    throw ParseError("unknown command '" + command + "'");
  }
  return o;
}

struct RunRequest {
  std::string command;
  json config;
  std::string out;
  bool force = false;
  unsigned threads = 1;
};

void perform(const RunRequest& req, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  if (!req.out.empty() && !req.force) {
    for (const fs::path& p : {fs::path(req.out), manifest_path_for(req.out)}) {
      if (fs::exists(p)) throw OutputExistsError("output '" + p.string() + "' exists (use --force to overwrite)");
    }
  }
  const auto started = std::chrono::system_clock::now();
  const auto t0 = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    outcome = execute(req.command, req.config, ExecOptions{req.threads});
  } catch (const json::exception& e) {
    throw ParseError(std::string("configuration: ") + e.what());
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (req.out.empty()) {
    out << outcome.csv;
    if (!outcome.summary.empty()) err << outcome.summary << '\n';
    return;
  }
  io::write_atomic(req.out, outcome.csv, req.force);
  Manifest m;
  m.command = req.command;
  m.config = req.config;
  m.results = outcome.results;
  m.output = req.out;
  m.threads = req.threads;
  m.started_at = utc_timestamp(started);
  m.wall_seconds = wall;
  io::write_atomic(manifest_path_for(req.out), to_json(m).dump(2) + "\n", req.force);
  if (!outcome.summary.empty()) out << outcome.summary << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lattice Monte Carlo and mean-field toolkit for three-brand market dynamics", "oligosim"};
  // --h is the advertising field, so help is long-form only.
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_version_flag("--version", std::string(OLIGOSIM_VERSION));
  app.require_subcommand(0, 1);

  std::string manifest_path;
  std::string replay_out;
  bool replay_force = false;
  unsigned replay_threads = 0;
  app.add_option("--manifest", manifest_path, "Replay the run recorded in a manifest");
  app.add_option("--out", replay_out, "With --manifest: write to this path instead");
  app.add_flag("--force", replay_force, "With --manifest: overwrite existing outputs");
  auto* replay_threads_opt =
      app.add_option("--threads", replay_threads, "With --manifest: worker threads")->check(CLI::PositiveNumber);

  std::map<std::string, Flags> flags;
  std::map<std::string, CLI::App*> subs;

  {
    auto& f = flags["simulate"];
    auto* s = subs["simulate"] = app.add_subcommand("simulate", "One trajectory under a constant field");
    add_model(s, f);
    f.p = "0.5";
    f.c0 = "0.4";
    s->add_option("--p", f.p, "Conformity")->capture_default_str();
    s->add_option("--h", f.h, "Field: scalar incumbent level or triple (default 1/3 each)");
    s->add_option("--c0", f.c0, "Initial shares: scalar incumbent share or triple")->capture_default_str();
    add_scale(s, f, false);
    f.updates_opt = s->add_option("--updates", f.updates, "Total updates (default 100 sweeps)");
    f.record_opt = s->add_option("--record-every", f.record_every, "Recording stride in updates (default one sweep)");
    s->add_option("--max-sweeps", f.max_sweeps, "Cap on the run length in sweeps")->capture_default_str();
    add_seed(s, f);
    add_io(s, f, false);
  }
  {
    auto& f = flags["steady"];
    auto* s = subs["steady"] = app.add_subcommand("steady", "Ensemble steady state at one parameter point");
    add_model(s, f);
    f.p = "0.5";
    f.c0 = "0.4";
    s->add_option("--p", f.p, "Conformity")->capture_default_str();
    s->add_option("--h", f.h, "Field: scalar incumbent level or triple (default 1/3 each)");
    s->add_option("--c0", f.c0, "Initial shares: scalar incumbent share or triple")->capture_default_str();
    add_scale(s, f, true);
    add_steady(s, f);
    add_seed(s, f);
    add_io(s, f, true);
  }
  {
    auto& f = flags["sweep"];
    auto* s = subs["sweep"] = app.add_subcommand("sweep", "Phase diagram over (p, h, c0)");
    add_model(s, f);
    f.c0 = "0.4";
    s->add_option("--p", f.p, "Conformity value or start:stop:step")->required();
    s->add_option("--h", f.h, "Incumbent field value or range")->required();
    s->add_option("--c0", f.c0, "Incumbent initial share value or range")->capture_default_str();
    add_scale(s, f, true);
    add_steady(s, f);
    add_seed(s, f);
    add_io(s, f, true);
  }
  {
    auto& f = flags["hc"];
    auto* s = subs["hc"] = app.add_subcommand("hc", "Critical advertising level below which incumbents die out");
    add_model(s, f);
    f.c0 = "0.4";
    f.tol = 0.01;
    s->add_option("--p", f.p, "Conformity")->required();
    s->add_option("--c0", f.c0, "Incumbent initial share")->capture_default_str();
    add_scale(s, f, true);
    add_steady(s, f);
    s->add_option("--extinction-threshold", f.extinction_threshold, "Incumbent share counted as extinct")
        ->capture_default_str();
    s->add_option("--tol", f.tol, "Bracket width")->capture_default_str();
    s->add_option("--scan-points", f.scan_points, "Points in the initial h scan")->capture_default_str();
    s->add_option("--h-min", f.h_min, "Lowest h in the initial scan")->capture_default_str();
    add_seed(s, f);
    add_io(s, f, true);
  }
  {
    auto& f = flags["mfa"];
    auto* s = subs["mfa"] = app.add_subcommand("mfa", "Mean-field fixed points");
    add_model(s, f);
    f.c0 = "0.4";
    f.tol = 1e-10;
    s->add_option("--p", f.p, "Conformity value or range")->required();
    s->add_option("--h", f.h, "Field: value, range or triple (default 1/3 each)");
    s->add_option("--c0", f.c0, "Initial shares: value, range or triple")->capture_default_str();
    s->add_option("--tol", f.tol, "Residual tolerance")->capture_default_str();
    s->add_option("--max-iter", f.max_iter, "Iteration cap")->capture_default_str();
    add_io(s, f, false);
  }
  {
    auto& f = flags["bands"];
    auto* s = subs["bands"] = app.add_subcommand("bands", "95% quantile bands along a market series");
    add_model(s, f);
    f.p = "0.4";
    s->add_option("--p", f.p, "Conformity")->capture_default_str();
    add_market(s, f);
    add_io(s, f, true);
  }
  {
    auto& f = flags["fit"];
    auto* s = subs["fit"] = app.add_subcommand("fit", "Fit the conformity level to a market series");
    add_model(s, f);
    s->add_option("--p-grid", f.p_grid, "Candidate conformity values")->capture_default_str();
    add_market(s, f);
    add_io(s, f, true);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "oligosim: " << e.what() << '\n';
    return 2;
  }

  try {
    RunRequest req;
    if (!manifest_path.empty()) {
      if (!app.get_subcommands().empty()) throw DomainError("--manifest cannot be combined with a subcommand");
      const Manifest m = load_manifest(manifest_path);
      if (std::find(std::begin(kSubcommands), std::end(kSubcommands), m.command) == std::end(kSubcommands)) {
        throw ParseError("manifest names unknown command '" + m.command + "'");
      }
      req.command = m.command;
      req.config = m.config;
      req.out = replay_out.empty() ? m.output : replay_out;
      req.force = replay_force;
      req.threads = replay_threads_opt->count() > 0 ? replay_threads : default_threads();
    } else {
      if (app.get_subcommands().empty()) throw DomainError("a subcommand or --manifest is required");
      if (!replay_out.empty() || replay_force || replay_threads_opt->count() > 0) {
        throw DomainError("--out, --force and --threads go after the subcommand");
      }
      req.command = app.get_subcommands().front()->get_name();
      const Flags& f = flags.at(req.command);
      req.config = resolve(req.command, f);
      req.out = f.out;
      req.force = f.force;
      req.threads = f.threads_opt != nullptr && f.threads_opt->count() > 0 ? f.threads : default_threads();
    }
    perform(req, out, err);
  } catch (const mc::AmbiguityError& e) {
    err << "oligosim: " << e.what() << " (" << e.scan().size() << " scan points)\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "oligosim: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    err << "oligosim: " << e.what() << '\n';
    return 2;
  } catch (const OutputExistsError& e) {
    err << "oligosim: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "oligosim: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace oligo::cli
