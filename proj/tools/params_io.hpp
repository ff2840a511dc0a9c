#pragma once

// Parameter store and output formatting shared by the CLI and the tests.
//
// Store layout: <dir>/<label>_R<R>.json with
//   {label, R, params{alpha, gamma, a1, a2, b2, b3, p[, xi0]}, energy, p, A,
//    meta{git_rev, rule_N}}
// where energy is E_total in Ry, p the trial parameter and A the separation
// constant from the first-order xi channel.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "twocenter/core.hpp"
#include "twocenter/trial.hpp"

namespace twocenter::io {

/// File-system or parse failure (CLI exit code 4).
class IOError : public Error {
 public:
  using Error::Error;
};

/// Revision baked in at configure time, "unknown" outside a checkout.
const char* git_revision();

/// ASCII spectroscopic name ("3dpg"); "n.m.L.+" for labels without one,
/// so the result never needs CSV quoting.
std::string label_name(const StateLabel& label);

/// %.17g; NaN and infinities spelled nan / inf / -inf.
std::string format_double(double x);

struct ParameterRecord {
  StateLabel label;
  double R = 0;
  TrialParamsd params;
  double energy = 0;
  double p = 0;
  double A = 0;
  int rule_N = 0;
  std::string git_rev;
};

nlohmann::ordered_json to_json(const ParameterRecord& record);
/// Throws IOError on missing fields or an unknown label.
ParameterRecord record_from_json(const nlohmann::json& j);

/// TWOCENTER_DATA_DIR, or "twocenter-data" in the working directory.
std::filesystem::path data_dir();
std::filesystem::path store_path(const std::filesystem::path& dir, const StateLabel& label,
                                 double R);

void write_record(const std::filesystem::path& file, const ParameterRecord& record);
ParameterRecord read_record(const std::filesystem::path& file);

/// Whole-string decimal parse; DomainError naming `what` otherwise.
double parse_number(const std::string& text, const char* what);

/// "start:stop:step", inclusive of stop, values rounded to 1e-12.
std::vector<double> parse_grid(const std::string& text);

/// Minimal CSV table: a header and rows of already formatted cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write(std::ostream& out) const;
};

/// Parse a comma-separated file with a header row. No quoting support;
/// none of the files we read need it.
CsvTable read_csv(const std::filesystem::path& file);

/// Write text to a file, creating parent directories. Throws IOError.
void write_text(const std::filesystem::path& file, const std::string& text);

}  // namespace twocenter::io
