#pragma once

#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <cstdio>

#include "kwh/csv.hpp"
#include "kwh/report.hpp"
#include "kwh/errors.hpp"
#include "kwh/gabor.hpp"
#include "kwh/operators.hpp"

namespace kwh {

struct WindowSpec {
  std::string kind;  // indicator | gaussian | csv
  long start = 0, length = 1;       // indicator
  bool normalize = true;            // indicator: unit L2 norm
  double center = 0.0, width = 1.0; // gaussian (in grid units, first axis)
  std::string path;                 // csv
};

struct FrequencySpec {
  std::string kind;  // integer_range | list | lattice
  long count = 0;                          // integer_range: {0..count-1}
  std::vector<std::vector<double>> values; // list
  double step = 1.0;                       // lattice: multiples of step
  long lattice_count = 0;
};

struct ShiftSpec {
  std::string kind;  // generator | list
  std::vector<std::vector<long>> generator;
  std::vector<std::vector<long>> values;
};

struct OperatorSpec {
  std::string kind;  // translation | modulation | fourier_diagonal | csv | identity | zero
  std::vector<long> shift;
  std::vector<double> frequency;
  std::uint64_t seed = 0;
  bool unitary = false;  // fourier_diagonal U only
  std::string path;
};

struct ExperimentConfig {
  GridSpec grid;
  WindowSpec window;
  FrequencySpec frequencies;
  ShiftSpec shifts;
  OperatorSpec operator_k;
  std::optional<OperatorSpec> operator_u;
  double rank_threshold = 1e-10;
  double psd_tol = 1e-8;
  double verdict_tol = 1e-8;
  std::uint64_t seed = 0;
  std::string source_text;  // canonical text for the config hash
};

namespace detail {

inline void require_keys(const Json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key))
      throw ConfigError("unknown key `" + key + "` in " + where);
}

inline std::vector<long> long_vector(const Json& j) {
  std::vector<long> v;
  for (const auto& x : j) v.push_back(x.get<long>());
  return v;
}

inline WindowSpec parse_window(const Json& j) {
  require_keys(j, {"kind", "start", "length", "normalize", "center", "width",
                   "path"},
               "window");
  WindowSpec w;
  w.kind = j.at("kind").get<std::string>();
  if (w.kind == "indicator") {
    w.start = j.value("start", 0L);
    w.length = j.at("length").get<long>();
    w.normalize = j.value("normalize", true);
  } else if (w.kind == "gaussian") {
    w.center = j.value("center", 0.0);
    w.width = j.at("width").get<double>();
  } else if (w.kind == "csv") {
    w.path = j.at("path").get<std::string>();
  } else {
    throw ConfigError("window kind must be indicator|gaussian|csv");
  }
  return w;
}

inline FrequencySpec parse_frequencies(const Json& j) {
  require_keys(j, {"kind", "count", "values", "step"}, "frequencies");
  FrequencySpec f;
  f.kind = j.at("kind").get<std::string>();
  if (f.kind == "integer_range") {
    f.count = j.at("count").get<long>();
  } else if (f.kind == "list") {
    for (const auto& row : j.at("values"))
      f.values.push_back(row.get<std::vector<double>>());
  } else if (f.kind == "lattice") {
    f.step = j.at("step").get<double>();
    f.lattice_count = j.at("count").get<long>();
  } else {
    throw ConfigError("frequencies kind must be integer_range|list|lattice");
  }
  return f;
}

inline ShiftSpec parse_shifts(const Json& j) {
  require_keys(j, {"kind", "matrix", "values"}, "shifts");
  ShiftSpec s;
  s.kind = j.at("kind").get<std::string>();
  if (s.kind == "generator") {
    for (const auto& row : j.at("matrix")) s.generator.push_back(long_vector(row));
  } else if (s.kind == "list") {
    for (const auto& row : j.at("values")) s.values.push_back(long_vector(row));
  } else {
    throw ConfigError("shifts kind must be generator|list");
  }
  return s;
}

inline OperatorSpec parse_operator(const Json& j, const std::string& where) {
  require_keys(j, {"kind", "shift", "frequency", "seed", "unitary", "path"},
               where);
  OperatorSpec op;
  op.kind = j.at("kind").get<std::string>();
  if (op.kind == "translation") {
    op.shift = long_vector(j.at("shift"));
  } else if (op.kind == "modulation") {
    op.frequency = j.at("frequency").get<std::vector<double>>();
  } else if (op.kind == "fourier_diagonal") {
    op.seed = j.value("seed", 0ULL);
    op.unitary = j.value("unitary", false);
  } else if (op.kind == "csv") {
    op.path = j.at("path").get<std::string>();
  } else if (op.kind != "identity" && op.kind != "zero") {
    throw ConfigError(where +
                      " kind must be "
                      "translation|modulation|fourier_diagonal|csv|identity|zero");
  }
  return op;
}

}  // namespace detail

inline ExperimentConfig parse_config(const Json& j, const std::string& text) {
  detail::require_keys(j,
                       {"grid", "window", "frequencies", "shifts", "operator_k",
                        "operator_u", "tolerances", "seed"},
                       "config");
  ExperimentConfig cfg;
  cfg.source_text = text;
  detail::require_keys(j.at("grid"), {"sizes"}, "grid");
  cfg.grid.sizes = detail::long_vector(j.at("grid").at("sizes"));
  if (!cfg.grid.valid()) throw ConfigError("grid sizes must all be >= 1");
  cfg.window = detail::parse_window(j.at("window"));
  cfg.frequencies = detail::parse_frequencies(j.at("frequencies"));
  cfg.shifts = detail::parse_shifts(j.at("shifts"));
  cfg.operator_k = detail::parse_operator(j.at("operator_k"), "operator_k");
  if (j.contains("operator_u"))
    cfg.operator_u = detail::parse_operator(j.at("operator_u"), "operator_u");
  if (j.contains("tolerances")) {
    detail::require_keys(j.at("tolerances"),
                         {"rank_threshold", "psd_tol", "verdict_tol"},
                         "tolerances");
    cfg.rank_threshold = j.at("tolerances").value("rank_threshold", 1e-10);
    cfg.psd_tol = j.at("tolerances").value("psd_tol", 1e-8);
    cfg.verdict_tol = j.at("tolerances").value("verdict_tol", 1e-8);
  }
  cfg.seed = j.value("seed", 0ULL);
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  try {
    return parse_config(j, text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
}

// FNV-1a over the canonical config text plus the seed
inline std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 1469598103934665603ULL;
  auto feed = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  };
  feed(cfg.source_text);
  feed(std::to_string(cfg.seed));
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

inline Signal build_window(const WindowSpec& spec, const GridSpec& grid) {
  const long n = grid.total();
  ComplexVector v = ComplexVector::Zero(n);
  if (spec.kind == "indicator") {
    if (spec.length < 1 || spec.length > n)
      throw ConfigError("indicator window length out of range");
    const double amp =
        spec.normalize ? 1.0 / std::sqrt(static_cast<double>(spec.length)) : 1.0;
    for (long i = 0; i < spec.length; ++i) {
      std::vector<long> idx = grid.unflatten((spec.start + i) % n);
      v(grid.flatten(idx)) = amp;
    }
  } else if (spec.kind == "gaussian") {
    // sampled Gaussian on the first axis distance, cyclic
    for (long t = 0; t < n; ++t) {
      const std::vector<long> ti = grid.unflatten(t);
      double d2 = 0.0;
      for (long j = 0; j < grid.dimension(); ++j) {
        double dj = std::abs(static_cast<double>(ti[j]) - spec.center);
        dj = std::min(dj, static_cast<double>(grid.sizes[j]) - dj);
        d2 += dj * dj;
      }
      v(t) = std::exp(-d2 / (2.0 * spec.width * spec.width));
    }
    v /= v.norm();
  } else {
    v = read_signal_csv(spec.path);
    if (v.size() != n)
      throw ConfigError("window csv length " + std::to_string(v.size()) +
                        " != grid size " + std::to_string(n));
  }
  return {grid, std::move(v)};
}

inline std::vector<std::vector<double>> build_frequencies(
    const FrequencySpec& spec, const GridSpec& grid) {
  std::vector<std::vector<double>> freqs;
  const long d = grid.dimension();
  if (spec.kind == "integer_range") {
    if (spec.count < 1) throw ConfigError("frequency count must be >= 1");
    if (d == 1) {
      for (long m = 0; m < spec.count; ++m)
        freqs.push_back({static_cast<double>(m)});
    } else {
      // multi-index range {0..count-1}^d
      std::vector<long> idx(d, 0);
      while (true) {
        freqs.emplace_back(idx.begin(), idx.end());
        long j = d - 1;
        while (j >= 0 && ++idx[j] == spec.count) idx[j--] = 0;
        if (j < 0) break;
      }
    }
  } else if (spec.kind == "list") {
    freqs = spec.values;
    for (const auto& c : freqs)
      if (static_cast<long>(c.size()) != d)
        throw ConfigError("frequency vector length != grid dimension");
  } else {
    if (spec.lattice_count < 1) throw ConfigError("frequency count must be >= 1");
    for (long m = 0; m < spec.lattice_count; ++m)
      freqs.push_back(std::vector<double>(d, spec.step * m));
  }
  if (freqs.empty()) throw ConfigError("empty frequency set");
  return freqs;
}

inline std::vector<std::vector<long>> build_shifts(const ShiftSpec& spec,
                                                   const GridSpec& grid) {
  if (spec.kind == "generator") return lattice_shifts(spec.generator, grid);
  for (const auto& b : spec.values)
    if (static_cast<long>(b.size()) != grid.dimension())
      throw ConfigError("shift vector length != grid dimension");
  if (spec.values.empty()) throw ConfigError("empty shift set");
  return spec.values;
}

inline BoundedOperator build_operator(const OperatorSpec& spec,
                                      const GridSpec& grid) {
  if (spec.kind == "translation") return translation_op(grid, spec.shift);
  if (spec.kind == "modulation") return modulation_op(grid, spec.frequency);
  if (spec.kind == "fourier_diagonal")
    return fourier_diagonal_pair(grid, spec.seed, spec.unitary).first;
  if (spec.kind == "identity") return identity_op(grid);
  if (spec.kind == "zero") return zero_op(grid);
  const long n = grid.total();
  return {grid, read_matrix_csv(spec.path, n, n)};
}

/// U from its spec; fourier_diagonal yields the second element of the pair so
/// a config sharing one seed for K and U gets a commuting pair.
inline BoundedOperator build_operator_u(const OperatorSpec& spec,
                                        const GridSpec& grid) {
  if (spec.kind == "fourier_diagonal")
    return fourier_diagonal_pair(grid, spec.seed, spec.unitary).second;
  return build_operator(spec, grid);
}

inline GaborSystem build_system(const ExperimentConfig& cfg) {
  GaborSystem system{cfg.grid, build_window(cfg.window, cfg.grid),
                     build_frequencies(cfg.frequencies, cfg.grid),
                     build_shifts(cfg.shifts, cfg.grid)};
  system.validate();
  return system;
}

}  // namespace kwh
