#pragma once

// Batch computations behind the CLI: optimized states cached per (label, R),
// the reference datasets and the diff against the bundled golden files.
//
// Dataset names: ground, sigma-u, pi-delta, nodal, separation, e1, b1, e2.

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "params_io.hpp"
#include "twocenter/transitions.hpp"
#include "twocenter/variational.hpp"

namespace twocenter::io {

struct RunOptions {
  int quad_N = 64;  // optimizer rule size; quotients use the library default
  Precision precision = Precision::Standard;
  int threads = 0;  // 0: hardware concurrency
};

OptimizeOptions optimize_options(const RunOptions& run);

/// Optimize from the built-in seed and, when given, from `warm`; keep the
/// lower energy. Both runs are variational bounds, so the lower one wins.
/// For n = 1 the node is placed against `ground` (the sector ground state
/// the caller reports); without it a seeded ground state is optimized.
OptimizationResult optimize_best(const StateLabel& label, const PhysicalSetup& setup,
                                 const RunOptions& run, const TrialParamsd* warm = nullptr,
                                 const TrialParamsd* ground = nullptr);

/// n = 0 state of the same (m, Lambda, parity) sector.
StateLabel sector_ground(StateLabel label);

/// Corrected state for nodeless labels, plain ansatz otherwise.
TransitionState transition_state(const StateLabel& label, const TrialParamsd& params,
                                 const PhysicalSetup& setup);

/// A from the first-order xi channel at p = p(E).
double separation_constant(const StateLabel& label, const TrialParamsd& params,
                           const PhysicalSetup& setup);

/// Run f(i) for i in [0, n) on a small worker pool. Results must be
/// written to index-addressed slots so the output order stays fixed.
void parallel_for(int n, int threads, const std::function<void(int)>& f);

/// Thread-safe cache of optimized states and transition states.
class Workspace {
 public:
  explicit Workspace(RunOptions run) : run_(run) {}

  const RunOptions& run() const { return run_; }

  /// Optimize label along an increasing grid (seed and warm start, best
  /// kept), labels in parallel. Already cached points are skipped.
  void prepare(const std::vector<StateLabel>& labels, const std::vector<double>& grid);

  /// Throws the recorded error when the point failed.
  const OptimizationResult& state(const StateLabel& label, double R);
  TransitionState transition(const StateLabel& label, double R);

 private:
  void sweep(const std::vector<StateLabel>& labels, const std::vector<double>& sorted);

  struct Entry {
    std::optional<OptimizationResult> result;
    std::string error;
    bool validation = false;
  };
  using Key = std::pair<std::string, double>;

  RunOptions run_;
  std::mutex mutex_;
  std::map<Key, Entry> states_;
  std::map<Key, TransitionState> transitions_;
};

struct DatasetRow {
  std::string state;  // ASCII spectroscopic name
  double R = 0;
  std::string quantity;
  double value = 0;
  std::string error;  // non-empty when the point could not be computed
};

struct Dataset {
  std::string name;
  std::vector<DatasetRow> rows;
};

const std::vector<std::string>& dataset_names();
bool is_dataset(const std::string& name);

/// R values of the golden file, ascending.
std::vector<double> reference_grid(const std::filesystem::path& golden_dir,
                                   const std::string& name);

Dataset compute_dataset(Workspace& ws, const std::string& name, const std::vector<double>& grid);

CsvTable dataset_csv(const Dataset& d);
nlohmann::ordered_json dataset_json(const Dataset& d);

struct DiffRow {
  std::string dataset, state, quantity, source;
  double R = 0;
  std::string reference;  // as printed
  double computed = 0;
  double abs_diff = 0;
  double rel_diff = 0;
  double tolerance = 0;  // on abs_diff
  bool within = false;
};

/// Tolerance on |ours - ref|: the quantity floor or half a unit in the
/// last printed digit of the reference, whichever is larger.
double diff_tolerance(const std::string& quantity, const std::string& printed);

/// Compare every computed row with the golden rows of the same state, R
/// and quantity (A_xi and A_eta also against the exact A). Entries with an
/// unmarked sign are stored as positive and compared as stored.
std::vector<DiffRow> diff_against_golden(const Dataset& d, const std::filesystem::path& golden_dir);

CsvTable diff_csv(const std::vector<DiffRow>& rows);

/// Directory of the bundled golden CSVs: $TWOCENTER_GOLDEN_DIR, else the
/// source tree location recorded at build time.
std::filesystem::path golden_dir();

}  // namespace twocenter::io
