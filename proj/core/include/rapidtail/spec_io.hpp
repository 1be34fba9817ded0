#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rapidtail/skewell.hpp"

// TOML configuration:
//
//   mu = [0.0, 0.0]
//   sigma = [[1.0, 0.5], [0.5, 1.0]]
//   delta = [0.6, 0.6]
//   generator = "normal"
//
//   [run]            # optional; every key optional
//   t_grid = [3.0, 4.0, 5.0, 6.0]
//   u_grid = [1e-5, 1e-6, 1e-7]
//   w = [1.0, 1.0]
//   x = [1.0, 1.0]
//   seed = 7
//   threshold = 5e-3
//   out = "report.csv"
namespace rapidtail {

struct RunSettings {
  std::optional<std::vector<double>> t_grid;
  std::optional<std::vector<double>> u_grid;
  std::optional<std::vector<double>> w;
  std::optional<std::vector<double>> x;
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold;
  std::optional<std::string> out;
};

struct ConfigDocument {
  SkewEllipticalSpec spec;
  RunSettings run;
};

/// Canonical TOML of the spec (17 significant digits, so parse_config
/// recovers identical values). InvalidSpec for generators without a name.
std::string serialize_spec(const SkewEllipticalSpec& spec);

/// Parses then validates. InvalidSpec on syntax errors, missing or mistyped
/// keys; the build_spec errors for invalid values.
ConfigDocument parse_config(std::string_view text);

/// InvalidSpec when the file cannot be read.
ConfigDocument load_config(const std::filesystem::path& path);

}  // namespace rapidtail
