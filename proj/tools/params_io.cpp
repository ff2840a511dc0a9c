#include "params_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#ifndef TWOCENTER_GIT_REV
#define TWOCENTER_GIT_REV "unknown"
#endif

namespace twocenter::io {

const char* git_revision() { return TWOCENTER_GIT_REV; }

std::string label_name(const StateLabel& l) {
  if (const auto d = united_atom_designation(l)) return std::string(d->ascii_name);
  return std::to_string(l.n) + "." + std::to_string(l.m) + "." + std::to_string(l.lambda) + "." +
         (l.parity == Parity::Plus ? "+" : "-");
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

nlohmann::ordered_json to_json(const ParameterRecord& r) {
  nlohmann::ordered_json params;
  params["alpha"] = r.params.alpha;
  params["gamma"] = r.params.gamma;
  params["a1"] = r.params.a1;
  params["a2"] = r.params.a2;
  params["b2"] = r.params.b2;
  params["b3"] = r.params.b3;
  params["p"] = r.params.p;
  if (r.params.xi0) params["xi0"] = *r.params.xi0;

  nlohmann::ordered_json j;
  j["label"] = label_name(r.label);
  j["R"] = r.R;
  j["params"] = params;
  j["energy"] = r.energy;
  j["p"] = r.p;
  j["A"] = r.A;
  j["meta"] = {{"git_rev", r.git_rev}, {"rule_N", r.rule_N}};
  return j;
}

ParameterRecord record_from_json(const nlohmann::json& j) {
  try {
    ParameterRecord r;
    const auto label = label_from_name(j.at("label").get<std::string>());
    if (!label) throw IOError("unknown label in parameter record");
    r.label = *label;
    r.R = j.at("R").get<double>();
    const auto& p = j.at("params");
    r.params.alpha = p.at("alpha").get<double>();
    r.params.gamma = p.at("gamma").get<double>();
    r.params.a1 = p.at("a1").get<double>();
    r.params.a2 = p.at("a2").get<double>();
    r.params.b2 = p.at("b2").get<double>();
    r.params.b3 = p.at("b3").get<double>();
    r.params.p = p.at("p").get<double>();
    if (p.contains("xi0")) r.params.xi0 = p.at("xi0").get<double>();
    r.energy = j.at("energy").get<double>();
    r.p = j.at("p").get<double>();
    r.A = j.at("A").get<double>();
    if (j.contains("meta")) {
      r.git_rev = j["meta"].value("git_rev", "");
      r.rule_N = j["meta"].value("rule_N", 0);
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw IOError(std::string("malformed parameter record: ") + e.what());
  }
}

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("TWOCENTER_DATA_DIR"); env && *env) return env;
  return "twocenter-data";
}

std::filesystem::path store_path(const std::filesystem::path& dir, const StateLabel& label,
                                 double R) {
  return dir / (label_name(label) + "_R" + format_double(R) + ".json");
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::error_code ec;
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path(), ec);
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IOError("cannot open " + file.string() + " for writing");
  out << text;
  if (!out) throw IOError("write failed: " + file.string());
}

void write_record(const std::filesystem::path& file, const ParameterRecord& record) {
  write_text(file, to_json(record).dump(2) + "\n");
}

ParameterRecord read_record(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IOError("cannot open " + file.string());
  try {
    return record_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw IOError(file.string() + ": " + e.what());
  }
}

double parse_number(const std::string& text, const char* what) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v))
    throw DomainError(std::string("bad ") + what + ": '" + text + "'");
  return v;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string s; std::getline(ss, s, ':');) parts.push_back(s);
  if (parts.size() != 3) throw DomainError("--R-grid expects start:stop:step");
  const double a = parse_number(parts[0], "grid start");
  const double b = parse_number(parts[1], "grid stop");
  const double h = parse_number(parts[2], "grid step");
  if (!(h > 0) || b < a) throw DomainError("--R-grid needs step > 0 and stop >= start");
  const double count = std::floor((b - a) / h + 1e-9) + 1;
  if (count > 10000) throw DomainError("--R-grid has too many points");
  std::vector<double> out;
  for (int i = 0; i < int(count); ++i) {
    // round away the accumulated binary noise so 0.1 steps print cleanly
    out.push_back(std::round((a + i * h) * 1e12) / 1e12);
  }
  return out;
}

void CsvTable::write(std::ostream& out) const {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
}

CsvTable read_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IOError("cannot open " + file.string());
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw IOError(file.string() + ": empty file");
  t.header = split(line);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != t.header.size())
      throw IOError(file.string() + ": row with " + std::to_string(cells.size()) +
                    " cells, header has " + std::to_string(t.header.size()));
    t.rows.push_back(std::move(cells));
  }
  return t;
}

}  // namespace twocenter::io
