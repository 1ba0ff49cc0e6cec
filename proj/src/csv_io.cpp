#include "oligo/csv_io.hpp"

#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <system_error>

#include "oligo/errors.hpp"

namespace oligo::io {

std::string format_number(double v) {
  // At least 9 significant digits, more only when needed to round-trip.
  char buf[64];
  for (int precision = 9; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%#.*g", precision, v);
    double back = 0.0;
    std::from_chars(buf, buf + std::strlen(buf), back);
    if (back == v) break;
  }
  return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& content, bool force) {
  namespace fs = std::filesystem;
  if (!force && fs::exists(path)) {
    throw OutputExistsError("output '" + path.string() + "' exists (use --force to overwrite)");
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot move output into '" + path.string() + "': " + ec.message());
  }
}

namespace {

void row(std::string& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out += ',';
    out += format_number(v);
    first = false;
  }
  out += '\n';
}

void row(std::string& out, std::initializer_list<double> values, long long flag) {
  row(out, values);
  out.back() = ',';
  out += std::to_string(flag);
  out += '\n';
}

}  // namespace

std::string trajectory_csv(std::span<const mc::TrajectorySample> series) {
  std::string out = "t,c1,c2,c3\n";
  for (const auto& s : series) row(out, {s.t, s.shares[0], s.shares[1], s.shares[2]});
  return out;
}

std::string phase_diagram_csv(std::span<const mc::PhasePoint> points) {
  std::string out = "p,h,c0,c1_inf,c2_inf,c3_inf,se1,se2,se3\n";
  for (const auto& pt : points) {
    row(out, {pt.p, pt.h, pt.c0, pt.mean[0], pt.mean[1], pt.mean[2], pt.standard_error[0],
              pt.standard_error[1], pt.standard_error[2]});
  }
  return out;
}

std::string mfa_scan_csv(std::span<const MfaRow> rows) {
  std::string out = "p,h,c0,c1_inf,c2_inf,c3_inf,se1,se2,se3,clamped\n";
  for (const auto& r : rows) {
    const auto& c = r.result.c_inf;
    row(out, {r.p, r.h, r.c0, c[0], c[1], c[2], 0.0, 0.0, 0.0}, r.result.clamped ? 1 : 0);
  }
  return out;
}

std::string mfa_point_csv(std::span<const MfaPointRow> rows) {
  std::string out = "p,h1,h2,h3,c0_1,c0_2,c0_3,c1_inf,c2_inf,c3_inf,iterations,residual,clamped\n";
  for (const auto& r : rows) {
    const auto& c = r.result.c_inf;
    out += format_number(r.p) + ',';
    row(out, {r.h[0], r.h[1], r.h[2], r.c0[0], r.c0[1], r.c0[2], c[0], c[1], c[2]});
    out.back() = ',';
    out += std::to_string(r.result.iterations) + ',';
    row(out, {r.result.residual}, r.result.clamped ? 1 : 0);
  }
  return out;
}

std::string steady_csv(const SteadyRow& r) {
  std::string out = "p,h1,h2,h3,c0_1,c0_2,c0_3,c1_inf,c2_inf,c3_inf,se1,se2,se3,converged\n";
  const auto& e = r.ensemble;
  row(out, {r.p, r.h[0], r.h[1], r.h[2], r.c0[0], r.c0[1], r.c0[2], e.mean[0], e.mean[1], e.mean[2],
            e.standard_error[0], e.standard_error[1], e.standard_error[2]},
      static_cast<long long>(e.converged_count()));
  return out;
}

std::string bands_csv(const calib::QuantileBands& bands) {
  std::string out = "quarter,op,lo,med,hi\n";
  for (std::size_t t = 0; t < bands.lower.size(); ++t) {
    for (std::size_t op = 0; op < 3; ++op) {
      out += std::to_string(t + 1) + ',' + std::to_string(op + 1) + ',';
      row(out, {bands.lower[t][op], bands.median[t][op], bands.upper[t][op]});
    }
  }
  return out;
}

std::string fit_csv(const calib::FitResult& fit) {
  std::string out = "p,score\n";
  for (std::size_t i = 0; i < fit.p_grid.size(); ++i) row(out, {fit.p_grid[i], fit.scores[i]});
  return out;
}

std::string hc_scan_csv(const mc::CriticalField& field) {
  std::string out = "h,incumbent,se,extinct\n";
  for (const auto& s : field.scan) row(out, {s.h, s.incumbent, s.standard_error}, s.extinct ? 1 : 0);
  return out;
}

}  // namespace oligo::io
