#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "vmfe/estimation.hpp"
#include "vmfe/experiment.hpp"
#include "vmfe/vmf_elliptical.hpp"

namespace vmfe::io {

/// Shortest representation that parses back to the same double; "inf", "-inf", "nan" otherwise.
std::string format_double(double x);

/// Whole-string parse; accepts the format_double spellings. Throws ParseError naming `what`.
double parse_double(std::string_view text, std::string_view what);

// Parameters document:
//   {"m": 2, "generator": "gaussian", "mu": [..], "lambda": [[l11], [l21, l22]],
//    "mu_v": [..], "tau": 1.5}
// lambda is written as ragged lower-triangular rows; full square rows are
// accepted on read if their strict upper part is zero.
nlohmann::json params_to_json(const VmfEllipticalParams& params);
/// Throws ParseError naming the offending field path (e.g. "lambda[1][0]").
VmfEllipticalParams params_from_json(const nlohmann::json& doc);

VmfEllipticalParams read_params(const std::filesystem::path& path);
void write_params(const std::filesystem::path& path, const VmfEllipticalParams& params);

/// CSV with header x1..xm. Throws ParseError with the 1-based line number on
/// ragged rows or non-numeric cells.
SampleMatrix read_samples(std::istream& in);
SampleMatrix read_samples(const std::filesystem::path& path);
void write_samples(std::ostream& out, const SampleMatrix& data);
void write_samples(const std::filesystem::path& path, const SampleMatrix& data);

nlohmann::json report_to_json(const FitReport& report, const FitConfig& config, std::string_view trace_path);
/// Columns: iter,loglik.
void write_trace(std::ostream& out, const FitReport& report);

/// Keys mirror ExperimentSpec fields; missing keys keep their defaults.
ExperimentSpec spec_from_json(const nlohmann::json& doc);
nlohmann::json spec_to_json(const ExperimentSpec& spec);

/// Opens for writing or throws IoError.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace vmfe::io
