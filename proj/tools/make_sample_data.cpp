// Generates the synthetic quarterly market series shipped in data/.
//
// Advertising shares follow a hand-made schedule (an entrant with a heavy
// early campaign, incumbents trading places); observed shares are one CF
// trajectory at L = 100, 156 updates per quarter, from (0.40, 0.40, 0.20),
// with operator 2's advertising scaled by 0.9 over quarters 17..24.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>

#include "CLI11.hpp"
#include "oligo/calibration.hpp"
#include "oligo/csv_io.hpp"

namespace {

oligo::calib::MarketSeries advertising_plan(int quarters) {
  oligo::calib::MarketSeries series;
  for (int t = 1; t <= quarters; ++t) {
    const double x = static_cast<double>(t - 1) / (quarters - 1);
    const double season = 0.02 * std::sin(2.0 * std::numbers::pi * (t - 1) / 4.0);
    const double entrant = 0.60 - 0.30 * x + season;
    const double first = 0.27 + 0.06 * x - 0.5 * season;
    const double second = 1.0 - entrant - first;
    oligo::calib::QuarterRecord rec;
    rec.quarter = t;
    rec.advertising = oligo::AdvertisingField(first, second, entrant);
    series.quarters.push_back(rec);
  }
  return series;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate the synthetic market series"};
  double p = 0.35;
  std::string model_name = "cf";
  std::uint64_t seed = 2008;
  int quarters = 27;
  std::string out;
  app.add_option("--p", p, "Conformity used to generate observed shares");
  app.add_option("--model", model_name, "cf or cap");
  app.add_option("--seed", seed, "Trajectory seed");
  app.add_option("--quarters", quarters, "Number of quarters")->check(CLI::Range(2, 1000));
  app.add_option("--out", out, "Output CSV (stdout if omitted)");
  CLI11_PARSE(app, argc, argv);

  try {
    auto series = advertising_plan(quarters);
    const std::vector<oligo::calib::Adjustment> adjust =
        quarters >= 24 ? std::vector<oligo::calib::Adjustment>{{}}
                       : std::vector<oligo::calib::Adjustment>{};
    const auto schedule = oligo::calib::build_schedule(series, adjust, 156LL * quarters);
    const auto observed = oligo::calib::simulate_one(oligo::parse_model(model_name), p, 100,
                                                     oligo::Shares(0.4, 0.4, 0.2), schedule, seed);

    std::string csv = "quarter,share_1,share_2,share_3,adv_1,adv_2,adv_3\n";
    for (int t = 0; t < quarters; ++t) {
      const auto& rec = series.quarters[static_cast<std::size_t>(t)];
      csv += std::to_string(t + 1);
      for (std::size_t i = 0; i < 3; ++i) csv += ',' + oligo::io::format_number(observed[t][i]);
      for (std::size_t i = 0; i < 3; ++i) {
        csv += ',' + oligo::io::format_number(rec.advertising[i]);
      }
      csv += '\n';
    }
    if (out.empty()) {
      std::cout << csv;
    } else {
      oligo::io::write_atomic(out, csv, true);
    }
  } catch (const std::exception& e) {
    std::cerr << "make_sample_data: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
