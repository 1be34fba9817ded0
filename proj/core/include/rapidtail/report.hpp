#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "rapidtail/skewell.hpp"
#include "rapidtail/verify.hpp"

namespace rapidtail {

using Metadata = std::vector<std::pair<std::string, std::string>>;

/// 64-bit FNV-1a of the canonical TOML form of the spec, as 16 hex digits.
std::string spec_hash(const SkewEllipticalSpec& spec);

/// Report fields as key/value pairs (name, method, threshold, extrapolated,
/// target, verdict, ...), appended to the caller's metadata on output.
Metadata report_metadata(const ConvergenceReport& report);

/// `probe,raw,target,rel_err` header plus one row per probe. Deterministic:
/// every number is written with 17 significant digits.
std::string report_body(const ConvergenceReport& report);

/// Metadata block ("# key=value" lines: caller entries, then report fields)
/// followed by report_body.
void write_report_csv(std::ostream& os, const ConvergenceReport& report, const Metadata& extra);

}  // namespace rapidtail
