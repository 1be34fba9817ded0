#include "rapidtail/report.hpp"

#include <cmath>
#include <cstdint>

#include <fmt/format.h>

#include "rapidtail/spec_io.hpp"

namespace rapidtail {
namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

std::string spec_hash(const SkewEllipticalSpec& spec) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize_spec(spec)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

Metadata report_metadata(const ConvergenceReport& r) {
  Metadata m;
  m.emplace_back("report", r.name);
  m.emplace_back("probe", r.probe_label);
  m.emplace_back("extrapolation", std::string(to_string(r.method)));
  m.emplace_back("degenerate_extrapolation", r.degenerate_extrapolation ? "true" : "false");
  m.emplace_back("threshold", num(r.threshold));
  m.emplace_back("extrapolated", num(r.extrapolated));
  m.emplace_back("target", r.target ? num(*r.target) : "none");
  m.emplace_back("final_rel_err", r.target ? num(r.final_rel_error()) : "none");
  m.emplace_back("verdict", std::string(to_string(r.verdict)));
  return m;
}

std::string report_body(const ConvergenceReport& r) {
  std::string out = "probe,raw,target,rel_err\n";
  for (std::size_t k = 0; k < r.probe_grid.size(); ++k) {
    out += fmt::format("{},{},{},{}\n", num(r.probe_grid[k]), num(r.raw_values[k]),
                       r.target ? num(*r.target) : "", num(r.rel_errors[k]));
  }
  return out;
}

void write_report_csv(std::ostream& os, const ConvergenceReport& r, const Metadata& extra) {
  for (const auto& [k, v] : extra) os << "# " << k << '=' << v << '\n';
  for (const auto& [k, v] : report_metadata(r)) os << "# " << k << '=' << v << '\n';
  os << report_body(r);
}

}  // namespace rapidtail
