// twocenter: command-line front end.
//
// Exit codes: 0 ok, 2 invalid input, 3 numerical non-convergence, 4 I/O.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "params_io.hpp"
#include "tables.hpp"
#include "twocenter/nonlinearization.hpp"
#include "twocenter/oracle.hpp"
#include "twocenter/united_atom.hpp"

namespace tc = twocenter;
namespace io = twocenter::io;
using nlohmann::ordered_json;

namespace {

struct Options {
  std::string state;
  std::string R;
  std::string R_grid;
  std::string precision = "standard";
  int quad_N = 64;
  std::string out;
  std::string format;
  std::string config;
  int threads = 0;
  // optimize
  bool store = false;
  bool use_store = false;
  // pt
  std::string correction_prefix;
  // transitions
  std::string kind = "E1";
  std::string final_state;
  // united-atom
  int count = 5;
  // reproduce-tables
  std::string which = "all";
  std::string grid = "reference";
};

std::vector<double> R_values(const Options& o) {
  if (!o.R.empty() && !o.R_grid.empty()) throw tc::DomainError("give either --R or --R-grid");
  std::vector<double> Rs;
  if (!o.R.empty())
    Rs.push_back(io::parse_number(o.R, "--R"));
  else if (!o.R_grid.empty())
    Rs = io::parse_grid(o.R_grid);
  else
    throw tc::DomainError("--R or --R-grid is required");
  for (double R : Rs)
    if (!(R > 0)) throw tc::DomainError("R must be positive");
  return Rs;
}

tc::StateLabel state_label(const std::string& name, const char* flag = "--state") {
  if (name.empty()) throw tc::DomainError(std::string(flag) + " is required");
  const auto l = tc::label_from_name(name);
  if (!l) throw tc::DomainError("unknown state '" + name + "'");
  return *l;
}

tc::Precision precision_of(const Options& o) {
  if (o.precision == "standard") return tc::Precision::Standard;
  if (o.precision == "extended") return tc::Precision::Extended;
  throw tc::DomainError("--precision must be standard or extended");
}

std::string format_of(const Options& o) {
  if (!o.format.empty()) {
    if (o.format != "csv" && o.format != "json") throw tc::DomainError("--format must be csv or json");
    return o.format;
  }
  if (o.out.size() > 5 && o.out.substr(o.out.size() - 5) == ".json") return "json";
  return "csv";
}

io::RunOptions run_options(const Options& o) {
  if (o.quad_N < 8 || o.quad_N > 4096) throw tc::DomainError("--quad-N out of range [8, 4096]");
  io::RunOptions r;
  r.quad_N = o.quad_N;
  r.precision = precision_of(o);
  r.threads = o.threads;
  return r;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty())
    std::cout << text;
  else
    io::write_text(o.out, text);
}

void emit_table(const Options& o, const io::CsvTable& csv, const ordered_json& json) {
  if (format_of(o) == "json") return emit(o, json.dump(2) + "\n");
  std::ostringstream s;
  csv.write(s);
  emit(o, s.str());
}

// config keys use the long flag names without dashes
void apply_config(Options& o) {
  if (o.config.empty()) return;
  std::ifstream in(o.config);
  if (!in) throw io::IOError("cannot open config " + o.config);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw io::IOError(o.config + ": " + e.what());
  }
  if (!j.is_object()) throw tc::DomainError("config must be a JSON object");
  auto text = [](const nlohmann::json& v) {
    return v.is_string() ? v.get<std::string>() : v.dump();
  };
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "state") o.state = text(v);
      else if (key == "R") o.R = text(v);
      else if (key == "R-grid") o.R_grid = text(v);
      else if (key == "precision") o.precision = text(v);
      else if (key == "quad-N") o.quad_N = v.get<int>();
      else if (key == "out") o.out = text(v);
      else if (key == "format") o.format = text(v);
      else if (key == "threads") o.threads = v.get<int>();
      else if (key == "store") o.store = v.get<bool>();
      else if (key == "use-store") o.use_store = v.get<bool>();
      else if (key == "correction-table") o.correction_prefix = text(v);
      else if (key == "kind") o.kind = text(v);
      else if (key == "final") o.final_state = text(v);
      else if (key == "count") o.count = v.get<int>();
      else if (key == "which") o.which = text(v);
      else if (key == "grid") o.grid = text(v);
      else throw tc::DomainError("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::type_error& e) {
    throw tc::DomainError(std::string("config: ") + e.what());
  }
}

// ---- subcommands ----------------------------------------------------------

int cmd_optimize(const Options& o) {
  const auto label = state_label(o.state);
  if (!tc::has_variational_preset(label))
    throw tc::DomainError("no trial function for " + io::label_name(label));
  const auto run = run_options(o);
  const auto Rs = R_values(o);
  const auto dir = io::data_dir();
  const bool json = format_of(o) == "json";

  std::vector<io::ParameterRecord> records;
  std::optional<tc::TrialParamsd> warm, ground;
  for (double R : Rs) {
    tc::PhysicalSetup setup;
    setup.R = R;
    if (o.use_store) {
      const auto stored = io::store_path(dir, label, R);
      if (std::filesystem::exists(stored)) warm = io::read_record(stored).params;
    }
    if (label.n == 1) {
      // same ground state chain as `optimize --state` on the sector ground
      ground = io::optimize_best(io::sector_ground(label), setup, run, ground ? &*ground : nullptr)
                   .params;
    }
    const auto res =
        io::optimize_best(label, setup, run, warm ? &*warm : nullptr, ground ? &*ground : nullptr);
    if (!res.converged) throw tc::ConvergenceError("optimizer did not converge at R=" + io::format_double(R));
    warm = res.params;
    io::ParameterRecord rec;
    rec.label = label;
    rec.R = R;
    rec.params = res.params;
    rec.energy = res.energy.E_total;
    rec.p = res.params.p;
    rec.A = io::separation_constant(label, res.params, setup);
    rec.rule_N = run.quad_N;
    rec.git_rev = io::git_revision();
    if (o.store) io::write_record(io::store_path(dir, label, R), rec);
    records.push_back(rec);
  }

  if (json) {
    if (records.size() == 1) return emit(o, io::to_json(records[0]).dump(2) + "\n"), 0;
    ordered_json arr = ordered_json::array();
    for (const auto& r : records) arr.push_back(io::to_json(r));
    return emit(o, arr.dump(2) + "\n"), 0;
  }
  io::CsvTable t;
  t.header = {"state", "R", "energy", "alpha", "gamma", "a1", "a2", "b2", "b3", "p", "xi0", "A"};
  for (const auto& r : records) {
    const auto& q = r.params;
    t.rows.push_back({io::label_name(r.label), io::format_double(r.R), io::format_double(r.energy),
                      io::format_double(q.alpha), io::format_double(q.gamma),
                      io::format_double(q.a1), io::format_double(q.a2), io::format_double(q.b2),
                      io::format_double(q.b3), io::format_double(q.p),
                      q.xi0 ? io::format_double(*q.xi0) : "", io::format_double(r.A)});
  }
  std::ostringstream s;
  t.write(s);
  emit(o, s.str());
  return 0;
}

int cmd_oracle(const Options& o) {
  const auto label = state_label(o.state);
  const auto Rs = R_values(o);
  tc::OracleOptions opt;
  opt.precision = precision_of(o);
  std::vector<tc::OracleResult> res(Rs.size());
  std::vector<std::string> errors(Rs.size());
  io::parallel_for(int(Rs.size()), o.threads, [&](int i) {
    tc::PhysicalSetup setup;
    setup.R = Rs[i];
    try {
      res[i] = tc::solve_bispectral(label, setup, opt);
    } catch (const tc::Error& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < Rs.size(); ++i)
    if (!errors[i].empty()) throw tc::ConvergenceError("R=" + io::format_double(Rs[i]) + ": " + errors[i]);

  io::CsvTable t;
  t.header = {"state", "R", "E_total", "E_prime", "A", "p", "radial_nodes", "mismatch", "basis"};
  ordered_json arr = ordered_json::array();
  for (std::size_t i = 0; i < Rs.size(); ++i) {
    const auto& r = res[i];
    t.rows.push_back({io::label_name(label), io::format_double(Rs[i]), io::format_double(r.E_total),
                      io::format_double(r.E_prime), io::format_double(r.A), io::format_double(r.p),
                      std::to_string(r.radial_nodes), io::format_double(r.radial_mismatch),
                      std::to_string(r.angular_basis_size)});
    arr.push_back({{"state", io::label_name(label)}, {"R", Rs[i]}, {"E_total", r.E_total},
                   {"E_prime", r.E_prime}, {"A", r.A}, {"p", r.p},
                   {"radial_nodes", r.radial_nodes}, {"mismatch", r.radial_mismatch},
                   {"basis", r.angular_basis_size}});
  }
  emit_table(o, t, arr);
  return 0;
}

int cmd_pt(const Options& o) {
  const auto label = state_label(o.state);
  if (!tc::has_variational_preset(label))
    throw tc::DomainError("no trial function for " + io::label_name(label));
  const auto run = run_options(o);
  const auto Rs = R_values(o);
  if (!o.correction_prefix.empty() && Rs.size() != 1)
    throw tc::DomainError("--correction-table needs a single --R");

  io::CsvTable t;
  t.header = {"state", "R", "E_variational", "p", "A1_xi", "A1_eta", "consistency",
              "E_corrected", "node_shift"};
  ordered_json arr = ordered_json::array();
  for (double R : Rs) {
    tc::PhysicalSetup setup;
    setup.R = R;
    const auto res = io::optimize_best(label, setup, run);
    const auto xi = tc::first_correction_xi(res.params, label, setup);
    const auto eta = tc::first_correction_eta(res.params, label, setup);
    const auto cons = tc::consistency_residual(xi.A1, eta.A1);
    double E_corr = std::nan("");
    if (label.n == 0) {
      const auto cs = tc::corrected_state(res.params, label, setup);
      E_corr = tc::corrected_energy(cs).E_total;
      if (!o.correction_prefix.empty()) {
        std::ostringstream a, b;
        tc::write_correction_csv(a, cs.xi);
        tc::write_correction_csv(b, cs.eta);
        io::write_text(o.correction_prefix + "_xi.csv", "xi,phase,slope\n" + a.str());
        io::write_text(o.correction_prefix + "_eta.csv", "eta,phase,slope\n" + b.str());
      }
    }
    t.rows.push_back({io::label_name(label), io::format_double(R),
                      io::format_double(res.energy.E_total), io::format_double(res.params.p),
                      io::format_double(xi.A1), io::format_double(eta.A1),
                      io::format_double(cons.relative), io::format_double(E_corr),
                      io::format_double(xi.node_shift)});
    ordered_json j;
    j["state"] = io::label_name(label);
    j["R"] = R;
    j["E_variational"] = res.energy.E_total;
    j["p"] = res.params.p;
    j["A1_xi"] = xi.A1;
    j["A1_eta"] = eta.A1;
    j["consistency"] = cons.relative;
    if (label.n == 0) j["E_corrected"] = E_corr;
    j["node_shift"] = xi.node_shift;
    arr.push_back(std::move(j));
  }
  emit_table(o, t, arr);
  return 0;
}

tc::Multipole multipole_of(const std::string& k) {
  if (k == "E1") return tc::Multipole::E1;
  if (k == "B1" || k == "M1") return tc::Multipole::B1;
  if (k == "E2") return tc::Multipole::E2;
  throw tc::DomainError("--kind must be E1, B1 or E2");
}

int cmd_transitions(const Options& o) {
  const auto kind = multipole_of(o.kind);
  const auto initial = state_label(o.state.empty() ? "1ssg" : o.state);
  const auto fin = state_label(o.final_state, "--final");
  for (const auto& l : {initial, fin})
    if (!tc::has_variational_preset(l))
      throw tc::DomainError("no trial function for " + io::label_name(l));
  const auto Rs = R_values(o);
  io::Workspace ws(run_options(o));
  ws.prepare({initial, fin}, Rs);

  std::vector<tc::TransitionRecord> recs(Rs.size());
  std::vector<std::string> errors(Rs.size());
  std::vector<bool> invalid(Rs.size(), false);
  io::parallel_for(int(Rs.size()), o.threads, [&](int i) {
    tc::PhysicalSetup setup;
    setup.R = Rs[i];
    try {
      recs[i] = tc::compute_transition(kind, ws.transition(initial, Rs[i]),
                                       ws.transition(fin, Rs[i]), setup);
    } catch (const tc::DomainError& e) {
      errors[i] = e.what();
      invalid[i] = true;
    } catch (const tc::Error& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < Rs.size(); ++i) {
    if (errors[i].empty()) continue;
    const std::string msg = "R=" + io::format_double(Rs[i]) + ": " + errors[i];
    if (invalid[i]) throw tc::DomainError(msg);
    throw tc::ConvergenceError(msg);
  }

  io::CsvTable t;
  t.header = {"kind", "initial", "final", "R", "deltaE", "S", "G", "f", "forbidden"};
  ordered_json arr = ordered_json::array();
  for (const auto& r : recs) {
    t.rows.push_back({tc::to_string(r.kind), io::label_name(r.initial), io::label_name(r.final_state),
                      io::format_double(r.R), io::format_double(r.deltaE), io::format_double(r.S),
                      std::to_string(r.G), io::format_double(r.f), r.forbidden ? "1" : "0"});
    arr.push_back({{"kind", tc::to_string(r.kind)}, {"initial", io::label_name(r.initial)},
                   {"final", io::label_name(r.final_state)}, {"R", r.R}, {"deltaE", r.deltaE},
                   {"S", r.S}, {"G", r.G}, {"f", r.f}, {"forbidden", r.forbidden}});
  }
  emit_table(o, t, arr);
  return 0;
}

int cmd_united_atom(const Options& o) {
  std::vector<tc::StateLabel> labels;
  if (!o.state.empty()) {
    labels.push_back(state_label(o.state));
  } else {
    for (const char* n : {"1ssg", "2psu", "2ppu", "3dpg", "3ddg", "4fdu", "2ssg", "3psu", "3dsg", "4fsu"})
      labels.push_back(*tc::label_from_name(n));
  }
  if (o.count < 2 || o.count > 12) throw tc::DomainError("--count must be in [2, 12]");
  const auto Rs = tc::limit_sequence(o.count);
  tc::OracleOptions opt;
  opt.precision = precision_of(o);

  std::vector<tc::LimitReport> reports(labels.size());
  std::vector<std::string> errors(labels.size());
  for (const auto& l : labels) (void)tc::limit_form(l);  // validation before work
  io::parallel_for(int(labels.size()), o.threads, [&](int i) {
    try {
      reports[i] = tc::limit_convergence_probe(labels[i], Rs, opt);
    } catch (const tc::Error& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (!errors[i].empty()) throw tc::ConvergenceError(io::label_name(labels[i]) + ": " + errors[i]);

  io::CsvTable t;
  t.header = {"state", "orbital", "R", "E_prime", "A", "R_over_p", "dev_R_over_p",
              "dev_E_prime", "dev_A"};
  ordered_json arr = ordered_json::array();
  for (const auto& rep : reports) {
    const auto& ao = rep.form.orbital;
    const std::string orb = std::to_string(ao.n) + "." + std::to_string(ao.l) + "." +
                            std::to_string(ao.m);
    ordered_json pts = ordered_json::array();
    for (const auto& p : rep.points) {
      t.rows.push_back({io::label_name(rep.form.label), orb, io::format_double(p.R),
                        io::format_double(p.E_prime), io::format_double(p.A),
                        io::format_double(p.R_over_p), io::format_double(p.dev_R_over_p),
                        io::format_double(p.dev_E_prime), io::format_double(p.dev_A)});
      pts.push_back({{"R", p.R}, {"E_prime", p.E_prime}, {"A", p.A}, {"R_over_p", p.R_over_p},
                     {"dev_R_over_p", p.dev_R_over_p}, {"dev_E_prime", p.dev_E_prime},
                     {"dev_A", p.dev_A}});
    }
    ordered_json j;
    j["state"] = io::label_name(rep.form.label);
    j["orbital"] = {ao.n, ao.l, ao.m};
    if (rep.form.node_constant) j["node_constant"] = *rep.form.node_constant;
    j["A_limit"] = tc::united_atom_A(rep.form.label);
    j["points"] = std::move(pts);
    j["order_R_over_p"] = rep.order_R_over_p;
    j["order_E_prime"] = rep.order_E_prime;
    j["order_A"] = rep.order_A;
    arr.push_back(std::move(j));
  }
  emit_table(o, t, arr);
  return 0;
}

int cmd_reproduce(const Options& o) {
  std::vector<std::string> names;
  if (o.which == "all")
    names = io::dataset_names();
  else if (io::is_dataset(o.which))
    names = {o.which};
  else
    throw tc::DomainError("--which must be 'all' or one of: ground, sigma-u, pi-delta, nodal, "
                          "separation, e1, b1, e2");
  const bool custom = !o.R.empty() || !o.R_grid.empty();
  if (!custom && o.grid != "reference") throw tc::DomainError("--grid must be 'reference'");
  const auto run = run_options(o);
  const std::string fmt = format_of(o);
  const std::filesystem::path out_dir = o.out.empty() ? "tables" : o.out;
  const auto golden = io::golden_dir();

  io::Workspace ws(run);
  std::vector<io::DiffRow> diff;
  bool failed_points = false;
  for (const auto& name : names) {
    const auto grid = custom ? R_values(o) : io::reference_grid(golden, name);
    const auto d = io::compute_dataset(ws, name, grid);
    for (const auto& r : d.rows) failed_points = failed_points || !r.error.empty();
    if (fmt == "json") {
      io::write_text(out_dir / (name + ".json"), io::dataset_json(d).dump(2) + "\n");
    } else {
      std::ostringstream s;
      io::dataset_csv(d).write(s);
      io::write_text(out_dir / (name + ".csv"), s.str());
    }
    const auto rows = io::diff_against_golden(d, golden);
    int within = 0;
    double worst = 0;
    for (const auto& r : rows) {
      within += r.within;
      worst = std::max(worst, r.rel_diff);
    }
    std::cout << name << ": " << rows.size() << " compared, " << within << " within tolerance, "
              << "max rel diff " << io::format_double(worst) << "\n";
    diff.insert(diff.end(), rows.begin(), rows.end());
  }
  std::ostringstream s;
  io::diff_csv(diff).write(s);
  io::write_text(out_dir / "diff_report.csv", s.str());
  if (failed_points) {
    std::cerr << "some points did not converge; see the error column\n";
    return 3;
  }
  return 0;
}

void add_common(CLI::App* app, Options& o) {
  app->add_option("--state", o.state, "state label: 1ssg, 3dπg or (n,m,L,±)");
  app->add_option("--R", o.R, "internuclear distance (bohr)");
  app->add_option("--R-grid", o.R_grid, "start:stop:step, stop included");
  app->add_option("--precision", o.precision, "standard or extended");
  app->add_option("--quad-N", o.quad_N, "quadrature nodes for the optimizer");
  app->add_option("--out", o.out, "output file (directory for reproduce-tables)");
  app->add_option("--format", o.format, "csv or json");
  app->add_option("--config", o.config, "JSON file whose keys override the flags");
  app->add_option("--threads", o.threads, "worker threads, 0 = all cores");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"H2+ low-lying states: trial wavefunctions, perturbative checks, "
               "exact separated solutions and transition strengths"};
  app.require_subcommand(1);
  Options o;

  auto* opt = app.add_subcommand("optimize", "variational parameters of a state");
  add_common(opt, o);
  opt->add_flag("--store", o.store, "also write records into $TWOCENTER_DATA_DIR");
  opt->add_flag("--use-store", o.use_store, "start from stored records when present");

  auto* ora = app.add_subcommand("oracle", "exact separated solution");
  add_common(ora, o);

  auto* pt = app.add_subcommand("pt", "first-order corrections and consistency");
  add_common(pt, o);
  pt->add_option("--correction-table", o.correction_prefix, "write <prefix>_xi.csv and _eta.csv");

  auto* tr = app.add_subcommand("transitions", "oscillator strengths from --state (1ssg)");
  add_common(tr, o);
  tr->add_option("--kind", o.kind, "E1, B1 or E2");
  tr->add_option("--final", o.final_state, "final state");

  auto* ua = app.add_subcommand("united-atom", "R -> 0 convergence probe");
  add_common(ua, o);
  ua->add_option("--count", o.count, "points of R = 0.5 * 2^-k");

  auto* rt = app.add_subcommand("reproduce-tables", "regenerate the reference datasets and diff them");
  add_common(rt, o);
  rt->add_option("--which", o.which, "dataset name or 'all'");
  rt->add_option("--grid", o.grid, "'reference': the R values of the golden files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    apply_config(o);
    if (opt->parsed()) return cmd_optimize(o);
    if (ora->parsed()) return cmd_oracle(o);
    if (pt->parsed()) return cmd_pt(o);
    if (tr->parsed()) return cmd_transitions(o);
    if (ua->parsed()) return cmd_united_atom(o);
    if (rt->parsed()) return cmd_reproduce(o);
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const io::IOError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const tc::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const tc::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const tc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
