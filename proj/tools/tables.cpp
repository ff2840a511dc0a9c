#include "tables.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <set>
#include <thread>

#include "twocenter/nonlinearization.hpp"

#ifndef TWOCENTER_GOLDEN_DEFAULT
#define TWOCENTER_GOLDEN_DEFAULT "data/golden"
#endif

namespace twocenter::io {

namespace {

StateLabel must_label(const char* name) {
  const auto l = label_from_name(name);
  if (!l) throw DomainError(std::string("unknown state ") + name);
  return *l;
}

struct TransitionSpec {
  Multipole kind;
  const char* final_state;
};

std::vector<StateLabel> labels_of(std::initializer_list<const char*> names) {
  std::vector<StateLabel> out;
  for (const char* n : names) out.push_back(must_label(n));
  return out;
}

std::vector<StateLabel> dataset_labels(const std::string& name) {
  if (name == "ground") return labels_of({"1ssg"});
  if (name == "sigma-u") return labels_of({"2psu"});
  if (name == "pi-delta") return labels_of({"2ppu", "3dpg", "3ddg", "4fdu"});
  if (name == "nodal") return labels_of({"2ssg", "3psu"});
  if (name == "separation")
    return labels_of({"1ssg", "2psu", "2ppu", "3dpg", "3ddg", "4fdu", "2ssg", "3psu"});
  if (name == "e1") return labels_of({"1ssg", "2ppu", "3psu"});
  if (name == "b1") return labels_of({"1ssg", "3dpg"});
  if (name == "e2") return labels_of({"1ssg", "3dpg", "3ddg", "2ssg"});
  throw DomainError("unknown dataset " + name);
}

std::vector<TransitionSpec> dataset_transitions(const std::string& name) {
  if (name == "e1") return {{Multipole::E1, "2ppu"}, {Multipole::E1, "3psu"}};
  if (name == "b1") return {{Multipole::B1, "3dpg"}};
  if (name == "e2") return {{Multipole::E2, "3dpg"}, {Multipole::E2, "3ddg"}, {Multipole::E2, "2ssg"}};
  return {};
}

// half a unit in the last printed digit of a decimal literal
double half_last_digit(const std::string& printed) {
  std::string mant = printed;
  int exponent = 0;
  if (const auto e = printed.find_first_of("eE"); e != std::string::npos) {
    mant = printed.substr(0, e);
    exponent = std::atoi(printed.c_str() + e + 1);
  }
  const auto dot = mant.find('.');
  const int decimals = dot == std::string::npos ? 0 : int(mant.size() - dot - 1);
  return 0.5 * std::pow(10.0, exponent - decimals);
}

}  // namespace

OptimizeOptions optimize_options(const RunOptions& run) {
  OptimizeOptions o;
  o.quad_N = run.quad_N;
  o.precision = run.precision;
  return o;
}

OptimizationResult optimize_best(const StateLabel& label, const PhysicalSetup& setup,
                                 const RunOptions& run, const TrialParamsd* warm,
                                 const TrialParamsd* ground) {
  auto opts = optimize_options(run);
  if (ground && label.n == 1) opts.node_reference = *ground;
  auto best = optimize_state(label, setup, seed_params(label, setup.R), opts);
  if (warm) {
    try {
      auto w = optimize_state(label, setup, *warm, opts);
      if (w.energy.E_total < best.energy.E_total) best = std::move(w);
    } catch (const ConvergenceError&) {
      // the seeded run already stands
    }
  }
  return best;
}

StateLabel sector_ground(StateLabel label) {
  label.n = 0;
  return label;
}

TransitionState transition_state(const StateLabel& label, const TrialParamsd& params,
                                 const PhysicalSetup& setup) {
  if (label.n == 0) return corrected_transition_state(corrected_state(params, label, setup));
  return plain_state(params, label, setup);
}

double separation_constant(const StateLabel& label, const TrialParamsd& params,
                           const PhysicalSetup& setup) {
  return first_correction_xi(params, label, setup).A1;
}

void parallel_for(int n, int threads, const std::function<void(int)>& f) {
  if (threads <= 0) threads = int(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) f(i);
    });
  for (auto& th : pool) th.join();
}

void Workspace::prepare(const std::vector<StateLabel>& labels, const std::vector<double>& grid) {
  std::vector<double> sorted = grid;
  std::sort(sorted.begin(), sorted.end());
  // sector ground states first: nodal states are built orthogonal to them
  std::vector<StateLabel> grounds;
  for (const auto& l : labels) {
    if (l.n != 1) continue;
    const auto g = sector_ground(l);
    if (std::find(grounds.begin(), grounds.end(), g) == grounds.end()) grounds.push_back(g);
  }
  if (!grounds.empty()) sweep(grounds, sorted);
  sweep(labels, sorted);
}

void Workspace::sweep(const std::vector<StateLabel>& labels, const std::vector<double>& sorted) {
  parallel_for(int(labels.size()), run_.threads, [&](int k) {
    const auto& label = labels[k];
    const std::string key = to_string(label);
    std::optional<TrialParamsd> warm;
    for (double R : sorted) {
      std::optional<TrialParamsd> ground;
      {
        std::lock_guard lock(mutex_);
        const auto it = states_.find({key, R});
        if (it != states_.end()) {
          if (it->second.result) warm = it->second.result->params;
          continue;
        }
        if (label.n == 1) {
          const auto g = states_.find({to_string(sector_ground(label)), R});
          if (g != states_.end() && g->second.result) ground = g->second.result->params;
        }
      }
      Entry e;
      PhysicalSetup setup;
      setup.R = R;
      try {
        e.result = optimize_best(label, setup, run_, warm ? &*warm : nullptr,
                                 ground ? &*ground : nullptr);
        warm = e.result->params;
      } catch (const DomainError& ex) {
        e.error = ex.what();
        e.validation = true;
      } catch (const Error& ex) {
        e.error = ex.what();
      }
      std::lock_guard lock(mutex_);
      states_.emplace(Key{key, R}, std::move(e));
    }
  });
}

const OptimizationResult& Workspace::state(const StateLabel& label, double R) {
  {
    std::lock_guard lock(mutex_);
    const auto it = states_.find({to_string(label), R});
    if (it != states_.end()) {
      if (it->second.result) return *it->second.result;
      if (it->second.validation) throw DomainError(it->second.error);
      throw ConvergenceError(it->second.error);
    }
  }
  prepare({label}, {R});
  return state(label, R);
}

TransitionState Workspace::transition(const StateLabel& label, double R) {
  const Key key{to_string(label), R};
  {
    std::lock_guard lock(mutex_);
    if (const auto it = transitions_.find(key); it != transitions_.end()) return it->second;
  }
  PhysicalSetup setup;
  setup.R = R;
  auto t = transition_state(label, state(label, R).params, setup);
  std::lock_guard lock(mutex_);
  return transitions_.emplace(key, std::move(t)).first->second;
}

const std::vector<std::string>& dataset_names() {
  static const std::vector<std::string> names = {"ground", "sigma-u",    "pi-delta", "nodal",
                                                 "separation", "e1",     "b1",       "e2"};
  return names;
}

bool is_dataset(const std::string& name) {
  const auto& n = dataset_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

std::vector<double> reference_grid(const std::filesystem::path& dir, const std::string& name) {
  const auto t = read_csv(dir / (name + ".csv"));
  std::set<double> Rs;
  for (const auto& r : t.rows) Rs.insert(std::stod(r.at(1)));
  return {Rs.begin(), Rs.end()};
}

Dataset compute_dataset(Workspace& ws, const std::string& name, const std::vector<double>& grid) {
  const auto labels = dataset_labels(name);
  ws.prepare(labels, grid);

  Dataset d;
  d.name = name;
  const int nR = int(grid.size());
  std::vector<std::vector<DatasetRow>> per_R(nR);

  const auto transitions = dataset_transitions(name);
  parallel_for(nR, ws.run().threads, [&](int i) {
    const double R = grid[i];
    PhysicalSetup setup;
    setup.R = R;
    auto& out = per_R[i];
    auto push = [&](const StateLabel& l, const char* q, auto&& compute) {
      DatasetRow row{label_name(l), R, q, std::nan(""), ""};
      try {
        row.value = compute();
      } catch (const Error& e) {
        row.error = e.what();
      }
      out.push_back(std::move(row));
    };

    if (!transitions.empty()) {
      const auto initial = must_label("1ssg");
      for (const auto& tr : transitions) {
        const auto fin = must_label(tr.final_state);
        push(fin, "f", [&] {
          return compute_transition(tr.kind, ws.transition(initial, R), ws.transition(fin, R),
                                    setup)
              .f;
        });
      }
      return;
    }
    for (const auto& l : labels) {
      if (name == "separation") {
        push(l, "A_xi", [&] { return first_correction_xi(ws.state(l, R).params, l, setup).A1; });
        push(l, "A_eta", [&] { return first_correction_eta(ws.state(l, R).params, l, setup).A1; });
        continue;
      }
      push(l, "E", [&] { return ws.state(l, R).energy.E_total; });
      push(l, "p", [&] { return ws.state(l, R).params.p; });
      if (name == "nodal")
        push(l, "xi0", [&] {
          const auto& x = ws.state(l, R).params.xi0;
          if (!x) throw ConvergenceError("no node");
          return *x;
        });
    }
  });
  for (auto& v : per_R)
    for (auto& r : v) d.rows.push_back(std::move(r));
  return d;
}

CsvTable dataset_csv(const Dataset& d) {
  CsvTable t;
  t.header = {"state", "R", "quantity", "value", "error"};
  for (const auto& r : d.rows) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    t.rows.push_back({r.state, format_double(r.R), r.quantity, format_double(r.value), err});
  }
  return t;
}

nlohmann::ordered_json dataset_json(const Dataset& d) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : d.rows) {
    nlohmann::ordered_json j;
    j["state"] = r.state;
    j["R"] = r.R;
    j["quantity"] = r.quantity;
    if (r.error.empty())
      j["value"] = r.value;
    else
      j["error"] = r.error;
    rows.push_back(std::move(j));
  }
  nlohmann::ordered_json out;
  out["dataset"] = d.name;
  out["rows"] = std::move(rows);
  return out;
}

double diff_tolerance(const std::string& quantity, const std::string& printed) {
  const double ref = std::abs(std::stod(printed));
  double floor = 0;
  if (quantity == "E")
    floor = 5e-9;
  else if (quantity == "xi0")
    floor = 1e-5;
  else if (quantity == "p")
    floor = 1e-4 * ref;
  else if (quantity == "f")
    floor = 5e-6 * ref;
  else
    floor = 1e-7 * ref;  // separation constants
  return std::max(floor, half_last_digit(printed));
}

std::vector<DiffRow> diff_against_golden(const Dataset& d, const std::filesystem::path& dir) {
  const auto golden = read_csv(dir / (d.name + ".csv"));
  std::vector<DiffRow> out;
  for (const auto& row : d.rows) {
    if (!row.error.empty()) continue;
    for (const auto& g : golden.rows) {
      const std::string& q = g[2];
      const bool same_q = q == row.quantity || (q == "A" && (row.quantity == "A_xi" || row.quantity == "A_eta"));
      if (g[0] != row.state || std::stod(g[1]) != row.R || !same_q) continue;
      DiffRow r;
      r.dataset = d.name;
      r.state = row.state;
      r.R = row.R;
      r.quantity = row.quantity;
      r.source = g[4] + (q != row.quantity ? "/" + q : "");
      r.reference = g[3];
      r.computed = row.value;
      const double ref = std::stod(g[3]);
      r.abs_diff = std::abs(row.value - ref);
      r.rel_diff = ref != 0 ? r.abs_diff / std::abs(ref) : r.abs_diff;
      r.tolerance = diff_tolerance(row.quantity, g[3]);
      r.within = r.abs_diff <= r.tolerance;
      out.push_back(std::move(r));
    }
  }
  return out;
}

CsvTable diff_csv(const std::vector<DiffRow>& rows) {
  CsvTable t;
  t.header = {"dataset",  "state",    "R",        "quantity",  "source", "reference",
              "computed", "abs_diff", "rel_diff", "tolerance", "status"};
  for (const auto& r : rows)
    t.rows.push_back({r.dataset, r.state, format_double(r.R), r.quantity, r.source, r.reference,
                      format_double(r.computed), format_double(r.abs_diff),
                      format_double(r.rel_diff), format_double(r.tolerance),
                      r.within ? "ok" : "off"});
  return t;
}

std::filesystem::path golden_dir() {
  if (const char* env = std::getenv("TWOCENTER_GOLDEN_DIR"); env && *env) return env;
  return TWOCENTER_GOLDEN_DEFAULT;
}

}  // namespace twocenter::io
