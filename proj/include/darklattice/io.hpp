#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace darklattice {

// Fixed-precision text for numeric CSV fields ('.' decimal, locale independent).
std::string fmt(double v, int precision = 12);

// RFC-4180 quoting when needed.
std::string csv_field(const std::string& s);

class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const std::vector<std::string>& header, const std::string& comment = {});
  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& values);

 private:
  std::ostream& os_;
  std::size_t columns_;
};

std::uint64_t fnv1a64(const std::string& data);
std::string hex64(std::uint64_t v);

}  // namespace darklattice
