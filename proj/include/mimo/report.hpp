#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mimo/sim.hpp"

namespace mimo::report {

inline constexpr const char* kCsvHeader =
    "detector,constellation,nr,ebn0_db,symbols,bits,bit_errors,ber,ns_per_symbol";

// One row per (detector, Eb/N0) point, LF line endings.
void write_csv(std::ostream& os, const sim::SweepResult& result);
void write_csv_file(const std::string& path, const sim::SweepResult& result);

// Log-scale BER curves, one polyline per detector.
void write_svg(std::ostream& os, const sim::SweepResult& result);
void write_svg_file(const std::string& path, const sim::SweepResult& result);

void write_bench_table(std::ostream& os, const std::vector<sim::BenchRow>& rows);

}  // namespace mimo::report
