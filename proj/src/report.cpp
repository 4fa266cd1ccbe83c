#include "mimo/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "mimo/error.hpp"

namespace mimo::report {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(Errc::invalid_config, fmt::format("cannot open '{}' for writing", path));
  return os;
}

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                              "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

void write_csv(std::ostream& os, const sim::SweepResult& result) {
  os << kCsvHeader << '\n';
  for (const sim::DetectorCurve& curve : result.curves) {
    for (const sim::BerPoint& p : curve.points) {
      fmt::print(os, "{},{},{},{},{},{},{},{:.6e},{:.2f}\n", curve.detector, result.constellation,
                 result.nr, p.ebn0_db, p.symbols, p.bits, p.bit_errors, p.ber,
                 p.wall_ns_per_symbol);
    }
  }
}

void write_csv_file(const std::string& path, const sim::SweepResult& result) {
  std::ofstream os = open_out(path);
  write_csv(os, result);
}

void write_svg(std::ostream& os, const sim::SweepResult& result) {
  constexpr double kWidth = 640, kHeight = 480, kLeft = 70, kRight = 170, kTop = 30, kBottom = 50;
  double x_min = 1e300, x_max = -1e300, ber_min = 1.0;
  for (const auto& curve : result.curves) {
    for (const auto& p : curve.points) {
      x_min = std::min(x_min, p.ebn0_db);
      x_max = std::max(x_max, p.ebn0_db);
      if (p.ber > 0.0) ber_min = std::min(ber_min, p.ber);
    }
  }
  if (x_min > x_max) x_min = 0.0, x_max = 1.0;
  if (x_max == x_min) x_max = x_min + 1.0;
  const double decade_lo = std::floor(std::log10(ber_min));
  const double decade_hi = 0.0;
  const double decades = std::max(1.0, decade_hi - decade_lo);
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * pw; };
  auto py = [&](double ber) { return kTop + (decade_hi - std::log10(ber)) / decades * ph; };

  fmt::print(os,
             "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
             "font-family=\"sans-serif\" font-size=\"12\">\n",
             kWidth, kHeight);
  fmt::print(os, "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#000\"/>\n",
             kLeft, kTop, pw, ph);
  for (int d = 0; d <= static_cast<int>(decades); ++d) {
    const double y = kTop + d / decades * ph;
    fmt::print(os, "<line x1=\"{}\" y1=\"{:.1f}\" x2=\"{}\" y2=\"{:.1f}\" stroke=\"#ddd\"/>\n",
               kLeft, y, kLeft + pw, y);
    fmt::print(os, "<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">1e{}</text>\n", kLeft - 6,
               y + 4, static_cast<int>(decade_hi) - d);
  }
  for (int i = 0; i <= 5; ++i) {
    const double v = x_min + i * (x_max - x_min) / 5.0;
    fmt::print(os, "<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\">{:g}</text>\n", px(v),
               kTop + ph + 18, v);
  }
  fmt::print(os, "<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\">Eb/N0 (dB)</text>\n",
             kLeft + pw / 2, kHeight - 10);
  fmt::print(os, "<text x=\"{}\" y=\"{}\">{} Nr={}</text>\n", kLeft, kTop - 10,
             result.constellation, result.nr);

  for (std::size_t k = 0; k < result.curves.size(); ++k) {
    const auto& curve = result.curves[k];
    const char* colour = kPalette[k % kPalette.size()];
    std::string pts;
    for (const auto& p : curve.points) {
      if (p.ber > 0.0) pts += fmt::format("{:.1f},{:.1f} ", px(p.ebn0_db), py(p.ber));
    }
    fmt::print(os, "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
               colour, pts);
    const double ly = kTop + 16.0 * (k + 1);
    fmt::print(os, "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\"/>\n",
               kWidth - kRight + 10, ly, kWidth - kRight + 30, ly, colour);
    fmt::print(os, "<text x=\"{}\" y=\"{}\">{}</text>\n", kWidth - kRight + 36, ly + 4,
               curve.detector);
  }
  os << "</svg>\n";
}

void write_svg_file(const std::string& path, const sim::SweepResult& result) {
  std::ofstream os = open_out(path);
  write_svg(os, result);
}

void write_bench_table(std::ostream& os, const std::vector<sim::BenchRow>& rows) {
  os << "detector,constellation,ns_per_symbol\n";
  for (const auto& r : rows) fmt::print(os, "{},{},{:.1f}\n", r.detector, r.constellation, r.ns_per_symbol);
}

}  // namespace mimo::report
