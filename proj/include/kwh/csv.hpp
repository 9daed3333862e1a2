#pragma once

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <utility>
#include <string>
#include <vector>

#include "kwh/errors.hpp"
#include "kwh/grid.hpp"
#include "kwh/linalg.hpp"

namespace kwh {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

inline bool numeric_field(const std::string& s) {
  char* end = nullptr;
  std::strtod(s.c_str(), &end);
  return end != s.c_str();
}

/// Signal CSV: one `re,im` pair per line, optional header, LF endings.
inline ComplexVector read_signal_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open signal csv: " + path);
  std::vector<std::complex<double>> entries;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (first && !fields.empty() && !numeric_field(fields[0])) {
      first = false;
      continue;  // header
    }
    first = false;
    if (fields.size() != 2)
      throw ConfigError("signal csv: expected `re,im` in " + path);
    entries.emplace_back(std::stod(fields[0]), std::stod(fields[1]));
  }
  if (entries.empty()) throw ConfigError("signal csv is empty: " + path);
  ComplexVector v(static_cast<Eigen::Index>(entries.size()));
  for (std::size_t i = 0; i < entries.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = entries[i];
  return v;
}

/// Matrix CSV: sparse `row,col,re,im` triplets, optional header.
inline ComplexMatrix read_matrix_csv(const std::string& path, long rows,
                                     long cols) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open matrix csv: " + path);
  ComplexMatrix m = ComplexMatrix::Zero(rows, cols);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (first && !fields.empty() && !numeric_field(fields[0])) {
      first = false;
      continue;
    }
    first = false;
    if (fields.size() != 4)
      throw ConfigError("matrix csv: expected `row,col,re,im` in " + path);
    const long r = std::stol(fields[0]);
    const long c = std::stol(fields[1]);
    if (r < 0 || r >= rows || c < 0 || c >= cols)
      throw ConfigError("matrix csv: index (" + fields[0] + "," + fields[1] +
                        ") out of range in " + path);
    m(r, c) = {std::stod(fields[2]), std::stod(fields[3])};
  }
  return m;
}

inline void write_csv(const std::string& path, const std::string& header,
                      const std::vector<std::pair<double, double>>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write csv: " + path);
  out << header << "\n";
  for (const auto& [a, b] : rows) out << a << "," << b << "\n";
}

}  // namespace kwh
