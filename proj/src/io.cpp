#include "darklattice/io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "darklattice/core.hpp"

namespace darklattice {

std::string fmt(double v, int precision) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop negative zero
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvWriter::CsvWriter(std::ostream& os, const std::vector<std::string>& header,
                     const std::string& comment)
    : os_(os), columns_(header.size()) {
  if (!comment.empty()) os_ << "# " << comment << "\r\n";
  row(header);
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> s;
  s.reserve(values.size());
  for (double v : values) s.push_back(fmt(v));
  row(s);
}

void CsvWriter::row(const std::vector<std::string>& values) {
  if (values.size() != columns_) fail(ErrorKind::consistency, "csv row width mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) os_ << ',';
    os_ << csv_field(values[i]);
  }
  os_ << "\r\n";
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace darklattice
