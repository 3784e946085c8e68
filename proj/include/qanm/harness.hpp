#ifndef QANM_HARNESS_HPP_
#define QANM_HARNESS_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qanm/analysis.hpp"
#include "qanm/consensus.hpp"
#include "qanm/objective.hpp"

namespace qanm {

struct ExperimentConfig {
  Scenario scenario = Scenario::kShared;
  int nodes = 20;
  int dim = 5;
  double alpha = 0.12;
  std::vector<double> deltas;  // one run per quantization level; must be nonempty
  int iterations = 300;
  std::uint64_t seed = 0;
  bool baseline_only = false;  // restrict to the forced beta = 0 method
  double graph_probability = 0.15;
  std::string graph_file;   // optional edge-list file; generated when empty
  std::string output_path;  // CSV destination; empty disables the file write
  long round_budget = kDefaultRoundBudget;
  double error_floor = 0.0;
};

struct LabeledTrace {
  std::string method;  // "qanm" or "baseline"
  double delta = 0.0;
  ConvergenceTrace trace;
};

// Runs one simulation per (delta, method) cell. All cells share the graph,
// objectives, initial states and per-iteration consensus seed schedule, so the
// accelerated and baseline runs are directly comparable. Writes the CSV when
// an output path is configured.
std::vector<LabeledTrace> run_experiment(const ExperimentConfig& config);

// One row per (method, delta, k):
//   method,delta,k,error_e,consensus_gap,xi,rounds,tokens,bits_estimate
// Doubles are printed with 17 significant digits so parsing the file back
// recovers them bitwise. Deterministic ordering, RFC-4180-style quoting.
void export_csv(const std::vector<LabeledTrace>& traces, std::ostream& os);
void export_csv(const std::vector<LabeledTrace>& traces, const std::string& path);

// Entry point behind the command-line tool. Returns 0 on success, 2 on usage
// errors, 1 on runtime failures.
int cli_main(int argc, const char* const* argv);

}  // namespace qanm

#endif  // QANM_HARNESS_HPP_
