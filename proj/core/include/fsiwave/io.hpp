#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace fsiwave {

/// Locale-independent float formatting, 17 significant digits.
std::string format_double(double v);

/// CSV writer that mirrors every file as a gnuplot-friendly .dat
/// (space-separated, '#'-prefixed header).
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    void row(const std::vector<double>& values);

  private:
    std::ofstream csv_;
    std::ofstream dat_;
    std::size_t columns_;
};

/// Reads a CSV written by CsvWriter: returns rows of doubles, skipping
/// the header.
std::vector<std::vector<double>> read_csv(const std::string& path);

}  // namespace fsiwave
