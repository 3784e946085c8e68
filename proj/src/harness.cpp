#include "qanm/harness.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "qanm/digraph.hpp"
#include "qanm/errors.hpp"
#include "qanm/optimizer.hpp"
#include "qanm/rng.hpp"

namespace qanm {

namespace {

// Named sub-streams derived from the experiment seed.
constexpr std::uint64_t kGraphStream = 0x67726170;
constexpr std::uint64_t kObjectiveStream = 0x6f626a73;
constexpr std::uint64_t kInitStream = 0x696e6974;
constexpr std::uint64_t kConsensusStream = 0x636f6e73;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& raw) {
  if (raw.find_first_of(",\"\n") == std::string::npos) return raw;
  std::string quoted = "\"";
  for (char c : raw) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::vector<Eigen::VectorXd> draw_initial_states(int n, int dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Eigen::VectorXd> states;
  states.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd x(dim);
    for (int j = 0; j < dim; ++j) x[j] = rng.uniform(1.0, 5.0);
    states.push_back(std::move(x));
  }
  return states;
}

Digraph build_graph(const ExperimentConfig& config) {
  if (!config.graph_file.empty()) {
    Digraph g = Digraph::load_edge_list_file(config.graph_file);
    if (g.node_count() != config.nodes) {
      throw std::invalid_argument("graph file has " + std::to_string(g.node_count()) +
                                  " nodes but the configuration asks for " +
                                  std::to_string(config.nodes));
    }
    return g;
  }
  return generate_strongly_connected(config.nodes, config.graph_probability,
                                     mix_seed(config.seed, kGraphStream));
}

void validate(const ExperimentConfig& config) {
  if (config.iterations < 1) {
    throw std::invalid_argument("iterations must be >= 1");
  }
  if (config.deltas.empty()) {
    throw std::invalid_argument("at least one quantization level is required");
  }
  if (!(config.alpha > 0.0)) {
    throw std::invalid_argument("step size must be positive");
  }
  if (config.nodes < 1) {
    throw std::invalid_argument("node count must be >= 1");
  }
  if (config.dim < 1) {
    throw std::invalid_argument("dimension must be >= 1");
  }
}

}  // namespace

std::vector<LabeledTrace> run_experiment(const ExperimentConfig& config) {
  validate(config);
  const Digraph graph = build_graph(config);
  const auto objectives = build_scenario_objectives(
      config.scenario, config.nodes, config.dim, mix_seed(config.seed, kObjectiveStream));
  const auto initial_states =
      draw_initial_states(config.nodes, config.dim, mix_seed(config.seed, kInitStream));

  std::vector<std::pair<std::string, std::optional<double>>> methods;
  if (!config.baseline_only) methods.emplace_back("qanm", std::nullopt);
  methods.emplace_back("baseline", 0.0);

  std::vector<LabeledTrace> traces;
  for (const auto& [name, override_beta] : methods) {
    for (double delta : config.deltas) {
      QanmConfig run_config;
      run_config.alpha = config.alpha;
      run_config.delta = QuantizationLevel(delta);
      run_config.max_outer_iterations = config.iterations;
      run_config.momentum_override = override_beta;
      run_config.seed = mix_seed(config.seed, kConsensusStream);
      run_config.error_floor = config.error_floor;
      run_config.consensus_round_budget = config.round_budget;
      traces.push_back(
          {name, delta, run_qanm(run_config, graph, objectives, initial_states)});
    }
  }
  if (!config.output_path.empty()) {
    export_csv(traces, config.output_path);
  }
  return traces;
}

void export_csv(const std::vector<LabeledTrace>& traces, std::ostream& os) {
  if (traces.empty()) {
    throw std::invalid_argument("no traces to export");
  }
  os << "method,delta,k,error_e,consensus_gap,xi,rounds,tokens,bits_estimate\n";
  for (const auto& labeled : traces) {
    for (const auto& rec : labeled.trace.iterations) {
      os << csv_field(labeled.method) << ',' << format_double(labeled.delta) << ','
         << rec.k << ',' << format_double(rec.error) << ','
         << format_double(rec.consensus_gap) << ',' << format_double(rec.lyapunov)
         << ',' << rec.rounds << ',' << rec.tokens << ',' << rec.bits_estimate
         << '\n';
    }
  }
}

void export_csv(const std::vector<LabeledTrace>& traces, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  export_csv(traces, out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing output file: " + path);
}

namespace {

std::vector<std::vector<std::int64_t>> read_consensus_inputs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  std::vector<std::vector<std::int64_t>> inputs;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::vector<std::int64_t> values;
    std::int64_t v = 0;
    while (row >> v) values.push_back(v);
    if (!row.eof()) {
      throw std::invalid_argument("malformed integer vector in " + path + ": " + line);
    }
    if (!values.empty()) inputs.push_back(std::move(values));
  }
  if (inputs.empty()) {
    throw std::invalid_argument("input file " + path + " holds no vectors");
  }
  return inputs;
}

void print_certificate(std::ostream& os, const GlobalConstants& constants,
                       const ConvergenceCertificate& cert) {
  os << "mu=" << format_double(constants.strong_convexity) << '\n'
     << "L=" << format_double(constants.smoothness) << '\n'
     << "beta_hat=" << format_double(constants.beta_hat) << '\n'
     << "beta_tilde=" << format_double(constants.beta_tilde) << '\n'
     << "eta=" << format_double(cert.eta) << '\n'
     << "b=" << format_double(cert.b) << '\n'
     << "c=" << format_double(cert.c) << '\n'
     << "d=" << format_double(cert.d) << '\n'
     << "condition_holds=" << (cert.condition_holds ? "true" : "false") << '\n'
     << "d_in_unit=" << (cert.d_in_unit ? "true" : "false") << '\n'
     << "step_size_ok=" << (cert.step_size_ok ? "true" : "false") << '\n';
}

int run_command(const ExperimentConfig& config) {
  const auto traces = run_experiment(config);
  for (const auto& labeled : traces) {
    const auto& last = labeled.trace.iterations.back();
    std::cout << labeled.method << " delta=" << format_double(labeled.delta)
              << " iterations=" << labeled.trace.iterations.size()
              << " final_error=" << format_double(last.error)
              << " final_distance=" << format_double(labeled.trace.final_mean_distance)
              << '\n';
  }
  if (!config.output_path.empty()) {
    std::cout << "wrote " << config.output_path << '\n';
  }
  return 0;
}

int certify_command(const ExperimentConfig& config, std::optional<double> momentum) {
  const auto objectives = build_scenario_objectives(
      config.scenario, config.nodes, config.dim, mix_seed(config.seed, kObjectiveStream));
  const auto betas = momentum_coefficients(objectives, momentum);
  const auto constants = global_constants(objectives, betas);
  const auto cert = compute_certificate(constants, config.alpha, config.nodes);
  print_certificate(std::cout, constants, cert);
  return 0;
}

int consensus_command(const std::string& input_path, const std::string& graph_file,
                      double graph_probability, double delta, std::uint64_t seed,
                      long round_budget, const std::string& trace_path) {
  const auto inputs = read_consensus_inputs(input_path);
  const int n = static_cast<int>(inputs.size());
  Digraph graph = graph_file.empty()
                      ? generate_strongly_connected(n, graph_probability,
                                                    mix_seed(seed, kGraphStream))
                      : Digraph::load_edge_list_file(graph_file);
  if (graph.node_count() != n) {
    throw std::invalid_argument("graph has " + std::to_string(graph.node_count()) +
                                " nodes but the input file provides " + std::to_string(n) +
                                " vectors");
  }

  std::ofstream trace_out;
  RoundTraceFn trace;
  if (!trace_path.empty()) {
    trace_out.open(trace_path);
    if (!trace_out) throw std::runtime_error("cannot open trace file: " + trace_path);
    trace = [&trace_out](long round, int node, const FtqacNodeState& st) {
      trace_out << "round=" << round << " node=" << node << " z=" << st.weight << " y=";
      for (std::size_t j = 0; j < st.mass.size(); ++j) {
        trace_out << (j ? "," : "") << st.mass[j];
      }
      trace_out << " M=";
      for (std::size_t j = 0; j < st.stop_max.size(); ++j) {
        trace_out << (j ? "," : "") << st.stop_max[j];
      }
      trace_out << " m=";
      for (std::size_t j = 0; j < st.stop_min.size(); ++j) {
        trace_out << (j ? "," : "") << st.stop_min[j];
      }
      trace_out << '\n';
    };
  }

  const auto result = run_consensus(inputs, graph, QuantizationLevel(delta),
                                    mix_seed(seed, kConsensusStream), round_budget,
                                    std::move(trace));
  std::cout << "nodes=" << n << " diameter=" << graph.diameter()
            << " rounds=" << result.rounds << " tokens=" << result.stats.tokens_sent
            << '\n';
  std::cout << "lattice=";
  for (std::size_t j = 0; j < result.output.size(); ++j) {
    std::cout << (j ? "," : "") << result.output[j];
  }
  std::cout << '\n' << "output=";
  for (Eigen::Index j = 0; j < result.outputs.front().size(); ++j) {
    std::cout << (j ? "," : "") << format_double(result.outputs.front()[j]);
  }
  std::cout << '\n';
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Distributed quantized optimization simulator"};
  app.require_subcommand(1);
  app.set_config("--config");

  const std::map<std::string, Scenario> scenario_names{
      {"shared", Scenario::kShared}, {"personalized", Scenario::kPersonalized}};

  ExperimentConfig config;
  std::optional<double> momentum;

  auto add_scenario_flags = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", config.scenario, "objective family")
        ->transform(CLI::CheckedTransformer(scenario_names, CLI::ignore_case));
    cmd->add_option("--nodes", config.nodes, "number of nodes")->check(CLI::PositiveNumber);
    cmd->add_option("--dim", config.dim, "state dimension")->check(CLI::PositiveNumber);
    cmd->add_option("--alpha", config.alpha, "gradient step size");
    cmd->add_option("--seed", config.seed, "experiment seed");
  };

  CLI::App* run = app.add_subcommand("run", "run a full experiment and export a CSV trace");
  add_scenario_flags(run);
  run->add_option("--delta", config.deltas, "quantization level (repeatable)")
      ->required()
      ->check(CLI::PositiveNumber);
  run->add_option("--iters", config.iterations, "outer iteration budget");
  run->add_flag("--baseline", config.baseline_only, "run only the forced beta=0 method");
  run->add_option("--graph-prob", config.graph_probability, "extra edge probability")
      ->check(CLI::Range(0.0, 1.0));
  run->add_option("--graph-file", config.graph_file, "edge-list file instead of a generated graph");
  run->add_option("--out", config.output_path, "CSV output path");
  run->add_option("--round-budget", config.round_budget, "consensus round cap");
  run->add_option("--error-floor", config.error_floor, "stop once the error metric falls below");

  CLI::App* certify = app.add_subcommand("certify", "print the convergence certificate for a configuration");
  add_scenario_flags(certify);
  certify->add_option("--momentum", momentum, "force a uniform momentum coefficient");
  bool certify_baseline = false;
  certify->add_flag("--baseline", certify_baseline, "force beta = 0");

  CLI::App* consensus = app.add_subcommand("consensus", "run one standalone consensus instance");
  std::string input_path;
  std::string trace_path;
  double consensus_delta = 1.0;
  consensus->add_option("--input", input_path,
                        "file with one whitespace-separated integer vector per node")
      ->required();
  consensus->add_option("--graph-file", config.graph_file, "edge-list file");
  consensus->add_option("--graph-prob", config.graph_probability, "extra edge probability")
      ->check(CLI::Range(0.0, 1.0));
  consensus->add_option("--delta", consensus_delta, "quantization level")
      ->check(CLI::PositiveNumber);
  consensus->add_option("--seed", config.seed, "protocol seed");
  consensus->add_option("--round-budget", config.round_budget, "round cap");
  consensus->add_option("--trace", trace_path, "per-round state trace output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return run_command(config);
    if (certify->parsed()) {
      if (certify_baseline) momentum = 0.0;
      return certify_command(config, momentum);
    }
    if (consensus->parsed()) {
      return consensus_command(input_path, config.graph_file, config.graph_probability,
                               consensus_delta, config.seed, config.round_budget,
                               trace_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace qanm
