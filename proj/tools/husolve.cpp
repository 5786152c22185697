// Command-line front end: instance generation, solving, rounding, resource
// estimation and benchmark campaigns.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hu/artifact_io.hpp"
#include "hu/bench.hpp"
#include "hu/instances.hpp"
#include "hu/quantum_emu.hpp"
#include "hu/resource_model.hpp"
#include "hu/rounding.hpp"
#include "hu/search.hpp"
#include "hu/solver.hpp"

namespace fs = std::filesystem;
using namespace hu;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitCapReached = 3;

class PhaseTimer {
 public:
  void start(const std::string& phase) {
    finish();
    phase_ = phase;
    t0_ = std::chrono::steady_clock::now();
  }
  void finish() {
    if (phase_.empty()) return;
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", seconds);
    phases_.emplace_back(phase_, buf);
    phase_.clear();
  }
  KvPairs phases() {
    finish();
    return phases_;
  }

 private:
  std::string phase_;
  std::chrono::steady_clock::time_point t0_;
  KvPairs phases_;
};

std::string format_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void ensure_dir(const std::string& dir) {
  if (!dir.empty()) fs::create_directories(dir);
}

const char* status_name(HUStatus status) {
  switch (status) {
    case HUStatus::feasible: return "feasible";
    case HUStatus::infeasible: return "infeasible";
    case HUStatus::iteration_cap_reached: return "cap_reached";
  }
  return "unknown";
}

int status_exit_code(HUStatus status) {
  switch (status) {
    case HUStatus::feasible: return kExitOk;
    case HUStatus::infeasible: return kExitInfeasible;
    case HUStatus::iteration_cap_reached: return kExitCapReached;
  }
  return kExitError;
}

void print_ledger_verbose(const IterationLedger& ledger) {
  for (const auto& r : ledger.records) {
    std::fprintf(stderr,
                 "iter %llu %s lambda=%.4g overshoots=%d cost=%.4g diag=%.4g F=%.6g\n",
                 static_cast<unsigned long long>(r.iteration),
                 r.kind == UpdateKind::cost ? "cost" : "diag", r.lambda,
                 r.overshoots, r.cost_violation, r.diag_violation, r.free_energy);
  }
}

int dispatch(const std::vector<std::string>& args);

// --------------------------------------------------------------------------

int cmd_gen(const std::vector<std::string>& args) {
  CLI::App app{"generate a benchmark instance"};
  Eigen::Index n = 128;
  int s = 16;
  std::uint64_t seed = 1;
  bool no_block = false;
  std::string out = "instance";
  app.add_option("--n", n, "dimension")->required();
  app.add_option("--s", s, "sparsity")->required();
  app.add_option("--seed", seed, "rng seed");
  app.add_flag("--no-block", no_block, "disable the two-block layout");
  app.add_option("--out", out, "output path prefix");
  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  PhaseTimer timer;
  timer.start("generate");
  InstanceMetadata meta;
  const CostMatrix c = generate_instance({n, s, seed, !no_block}, &meta);
  timer.start("write");
  ensure_dir(fs::path(out).parent_path().string());
  store_matrix(c, out + ".coord");
  store_instance_metadata(meta, out + ".meta");
  timer.finish();

  RunManifest manifest;
  manifest.command = "gen";
  manifest.args = args;
  manifest.parameters = {{"n", std::to_string(n)},
                         {"s", std::to_string(s)},
                         {"seed", std::to_string(seed)},
                         {"block_form", no_block ? "false" : "true"},
                         {"out", out}};
  manifest.input_hashes = {{out + ".coord", file_hash_hex(out + ".coord")}};
  manifest.wall_clock = timer.phases();
  write_manifest(manifest, out + ".manifest");
  std::cout << "wrote " << out << ".coord (n=" << n << ", nnz=" << c.entries.size()
            << ")\n";
  return kExitOk;
}

// --------------------------------------------------------------------------

int cmd_solve(const std::vector<std::string>& args) {
  CLI::App app{"solve an instance (single probe or binary search)"};
  std::string instance;
  double epsilon = 0.01;
  double beta = 0.45;
  double gamma = 0.0;
  bool gamma_given = false;
  std::string mode = "classical";
  std::string diag_rule = "l2";
  double gap = 0.0;
  std::string noise = "uniform";
  std::uint64_t noise_seed = 0;
  int segments = 1;
  std::uint64_t max_iterations = 0;
  std::string out_dir = ".";
  bool verbose = false;
  app.add_option("--instance", instance, "instance file")->required();
  app.add_option("--epsilon", epsilon, "feasibility precision");
  app.add_option("--beta", beta, "momentum hyperparameter");
  auto* gamma_opt = app.add_option("--gamma", gamma, "probe a single threshold");
  app.add_option("--mode", mode, "classical | quantum | theoretical")
      ->check(CLI::IsMember({"classical", "quantum", "theoretical"}));
  app.add_option("--diag-rule", diag_rule, "l1 | l2 diagonal update direction")
      ->check(CLI::IsMember({"l1", "l2"}));
  app.add_option("--gap", gap, "binary search bracket width (default epsilon)");
  app.add_option("--noise", noise, "oracle noise for quantum mode")
      ->check(CLI::IsMember({"none", "uniform", "adversarial"}));
  app.add_option("--noise-seed", noise_seed, "seed of the oracle noise stream");
  app.add_option("--segments", segments, "trace estimations per update (quantum)");
  app.add_option("--max-iterations", max_iterations, "safety cap override");
  app.add_option("--out-dir", out_dir, "output directory")->envname("HU_OUT_DIR");
  app.add_flag("--verbose", verbose, "print one line per iteration");
  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  gamma_given = gamma_opt->count() > 0;
  if (gap == 0.0) gap = epsilon;

  PhaseTimer timer;
  timer.start("load");
  const CostMatrix c = load_matrix(instance);
  timer.start("solve");

  SolverConfig config;
  config.epsilon = epsilon;
  config.beta = beta;
  config.max_iterations = max_iterations;
  config.diag_rule = diag_rule == "l1" ? DiagRule::l1 : DiagRule::l2;
  if (mode == "theoretical") {
    config.step_mode = StepMode::theoretical;
    config.diag_rule = DiagRule::l1;
  }

  QuantumEmuConfig qconfig;
  qconfig.base = config;
  qconfig.noise.kind = noise == "none"
                           ? NoiseKind::none
                           : (noise == "uniform" ? NoiseKind::uniform
                                                 : NoiseKind::adversarial);
  qconfig.noise.rng_seed = noise_seed;
  qconfig.free_energy_segments = segments;

  ensure_dir(out_dir);
  KvPairs outcome;
  outcome.emplace_back("mode", mode);
  outcome.emplace_back("epsilon", format_double(epsilon));
  outcome.emplace_back("beta", format_double(beta));
  int exit_code = kExitOk;

  if (gamma_given) {
    outcome.emplace_back("gamma", format_double(gamma));
    HUStatus status;
    if (mode == "quantum") {
      QuantumRunResult run = quantum_hamiltonian_updates(c, gamma, qconfig);
      status = run.status;
      timer.start("write");
      write_quantum_ledger_csv(run, out_dir + "/ledger.csv");
      write_hamiltonian_artifact(run.hamiltonian, out_dir + "/hamiltonian.huham");
      const GibbsState exact = gibbs_state(run.hamiltonian);
      outcome.emplace_back("f_bound", format_double(run.f_bound));
      outcome.emplace_back("f_exact", format_double(exact.free_energy));
      outcome.emplace_back("bound_violations", std::to_string(run.bound_violations));
      outcome.emplace_back("cost_violation_exact",
                           format_double(trace_product(
                               cost_direction(c.to_dense(), gamma), exact.rho)));
      outcome.emplace_back("diag_violation_exact",
                           format_double(diag_violation_l1(exact.rho)));
      outcome.emplace_back("iterations", std::to_string(run.ledger.iterations));
      outcome.emplace_back("matrix_exponentials",
                           std::to_string(run.ledger.matrix_exponentials));
      if (verbose) print_ledger_verbose(run.ledger);
    } else {
      HUResult run = hamiltonian_updates(c, gamma, config);
      status = run.status;
      timer.start("write");
      write_ledger_csv(run.ledger, out_dir + "/ledger.csv");
      write_hamiltonian_artifact(run.hamiltonian, out_dir + "/hamiltonian.huham");
      outcome.emplace_back("free_energy", format_double(run.free_energy));
      outcome.emplace_back("cost_violation_exact",
                           format_double(trace_product(
                               cost_direction(c.to_dense(), gamma), run.rho)));
      outcome.emplace_back("diag_violation_exact",
                           format_double(diag_violation_l1(run.rho)));
      outcome.emplace_back("iterations", std::to_string(run.ledger.iterations));
      outcome.emplace_back("matrix_exponentials",
                           std::to_string(run.ledger.matrix_exponentials));
      if (verbose) print_ledger_verbose(run.ledger);
    }
    outcome.emplace_back("status", status_name(status));
    exit_code = status_exit_code(status);
  } else {
    outcome.emplace_back("gap", format_double(gap));
    SearchResult search;
    if (mode == "quantum") {
      search = bisect_over_gamma(gap, [&](double g) {
        QuantumRunResult run = quantum_hamiltonian_updates(c, g, qconfig);
        GibbsState exact = gibbs_state(run.hamiltonian);
        return ProbeOutcome{run.status, std::move(run.hamiltonian),
                            std::move(exact.rho), std::move(run.ledger)};
      });
    } else {
      search = binary_search(c, config, gap);
    }
    timer.start("write");
    write_search_trace_csv(search, out_dir + "/search_trace.csv");
    write_ledger_csv(search.ledger_star, out_dir + "/ledger.csv");
    write_hamiltonian_artifact(search.h_star, out_dir + "/hamiltonian.huham");
    outcome.emplace_back("gamma_lo", format_double(search.gamma_lo));
    outcome.emplace_back("gamma_hi", format_double(search.gamma_hi));
    outcome.emplace_back("probes", std::to_string(search.probes.size()));
    outcome.emplace_back("iterations", std::to_string(search.total_iterations));
    outcome.emplace_back("matrix_exponentials",
                         std::to_string(search.total_matrix_exponentials));
    outcome.emplace_back("status", search.aborted ? "cap_reached" : "complete");
    if (verbose) print_ledger_verbose(search.ledger_star);
    exit_code = search.aborted ? kExitCapReached : kExitOk;
  }

  write_kv_file(outcome, out_dir + "/outcome.kv");

  RunManifest manifest;
  manifest.command = "solve";
  manifest.args = args;
  manifest.parameters = outcome;
  manifest.input_hashes = {{instance, file_hash_hex(instance)}};
  manifest.wall_clock = timer.phases();
  write_manifest(manifest, out_dir + "/solve.manifest");

  std::cout << "status: " << kv_lookup(outcome, "status") << "\n";
  return exit_code;
}

// --------------------------------------------------------------------------

int cmd_round(const std::vector<std::string>& args) {
  CLI::App app{"randomized rounding of a stored solver state"};
  std::string hamiltonian;
  std::string instance;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  bool correct_first = false;
  double epsilon = 0.01;
  std::string out_dir = ".";
  app.add_option("--hamiltonian", hamiltonian, "stored Hamiltonian artifact")->required();
  app.add_option("--instance", instance, "instance file")->required();
  app.add_option("--trials", trials, "number of roundings");
  app.add_option("--seed", seed, "rounding rng seed");
  app.add_flag("--correct-first", correct_first,
               "apply the exact-diagonal correction before rounding");
  app.add_option("--epsilon", epsilon, "precision used by the correction");
  app.add_option("--out-dir", out_dir, "output directory")->envname("HU_OUT_DIR");
  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  PhaseTimer timer;
  timer.start("load");
  const CostMatrix c = load_matrix(instance);
  const SymMatrix h = read_hamiltonian_artifact(hamiltonian);
  timer.start("round");
  SymMatrix rho = gibbs_state(h).rho;
  KvPairs extra;
  if (correct_first) {
    CorrectionReport correction = correct_solution(rho, epsilon);
    extra.emplace_back("correction_trace_distance",
                       format_double(correction.trace_distance));
    extra.emplace_back("correction_large_deviation_rows",
                       std::to_string(correction.large_deviation_set.size()));
    rho = std::move(correction.rho_sharp);
  }
  const RoundingReport report = randomized_round(rho, c, trials, seed);
  if (report.best_value != c.quadratic_form(report.best_x)) {
    throw std::logic_error("round: best value does not match its vector");
  }

  timer.start("write");
  ensure_dir(out_dir);
  write_rounding_report_csv(report, out_dir + "/rounds.csv");
  write_rounding_summary(report, out_dir + "/rounds_summary.kv");
  if (!extra.empty()) write_kv_file(extra, out_dir + "/correction.kv");

  RunManifest manifest;
  manifest.command = "round";
  manifest.args = args;
  manifest.parameters = {{"trials", std::to_string(trials)},
                         {"seed", std::to_string(seed)},
                         {"correct_first", correct_first ? "true" : "false"},
                         {"epsilon", format_double(epsilon)},
                         {"mean", format_double(report.mean_value)},
                         {"best", format_double(report.best_value)}};
  manifest.input_hashes = {{instance, file_hash_hex(instance)},
                           {hamiltonian, file_hash_hex(hamiltonian)}};
  manifest.wall_clock = timer.phases();
  write_manifest(manifest, out_dir + "/round.manifest");

  std::cout << "mean " << report.mean_value << " best " << report.best_value << "\n";
  return kExitOk;
}

// --------------------------------------------------------------------------

int cmd_estimate(const std::vector<std::string>& args) {
  CLI::App app{"quantum resource estimate for a completed run"};
  std::string ledger_path;
  std::string instance;
  double epsilon = 0.01;
  int bits = 8;
  std::string out_dir = ".";
  app.add_option("--ledger", ledger_path, "ledger CSV of a completed run")->required();
  app.add_option("--instance", instance, "instance file")->required();
  app.add_option("--epsilon", epsilon, "precision the run used");
  app.add_option("--bits", bits, "logical bits per stored Hamiltonian entry");
  app.add_option("--out-dir", out_dir, "output directory")->envname("HU_OUT_DIR");
  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  PhaseTimer timer;
  timer.start("load");
  const CostMatrix c = load_matrix(instance);
  const IterationLedger ledger = read_ledger_csv(ledger_path);
  timer.start("estimate");
  const ResourceReport report =
      iteration_resources(ledger, c.n, c.sparsity, epsilon, bits);
  timer.start("write");
  ensure_dir(out_dir);
  write_resource_report(report, out_dir + "/resources.kv",
                        out_dir + "/resources_rows.csv");

  RunManifest manifest;
  manifest.command = "estimate";
  manifest.args = args;
  manifest.parameters = {{"epsilon", format_double(epsilon)},
                         {"bits", std::to_string(bits)},
                         {"total_gates", format_double(report.total_gates)},
                         {"break_even_seconds", format_double(report.break_even_seconds)}};
  manifest.input_hashes = {{instance, file_hash_hex(instance)},
                           {ledger_path, file_hash_hex(ledger_path)}};
  manifest.wall_clock = timer.phases();
  write_manifest(manifest, out_dir + "/estimate.manifest");

  std::cout << "total gates " << report.total_gates << ", break-even "
            << report.break_even_seconds << " s\n";
  return kExitOk;
}

// --------------------------------------------------------------------------

int cmd_bench(const std::vector<std::string>& args) {
  CLI::App app{"run a benchmark campaign"};
  std::string campaign;
  std::string out_dir = ".";
  int threads = 0;
  app.add_option("--campaign", campaign, "campaign spec file")->required();
  app.add_option("--out-dir", out_dir, "output directory")->envname("HU_OUT_DIR");
  app.add_option("--threads", threads, "worker pool size override");
  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  PhaseTimer timer;
  timer.start("run");
  CampaignSpec spec = parse_campaign_file(campaign);
  if (threads > 0) spec.threads = threads;
  ensure_dir(out_dir);
  const std::vector<std::string> written = run_campaign(spec, out_dir);
  timer.finish();

  RunManifest manifest;
  manifest.command = "bench";
  manifest.args = args;
  manifest.parameters = {{"kind", spec.kind},
                         {"instances", std::to_string(spec.instances)},
                         {"seed0", std::to_string(spec.seed0)}};
  manifest.input_hashes = {{campaign, file_hash_hex(campaign)}};
  manifest.wall_clock = timer.phases();
  write_manifest(manifest, out_dir + "/bench.manifest");

  for (const auto& name : written) std::cout << "wrote " << name << "\n";
  return kExitOk;
}

// --------------------------------------------------------------------------

int cmd_replay(const std::vector<std::string>& args) {
  CLI::App app{"re-run a recorded command"};
  std::string manifest_path;
  std::string out_dir;
  app.add_option("--manifest", manifest_path, "manifest to replay")->required();
  app.add_option("--out-dir", out_dir, "redirect outputs");
  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const RunManifest manifest = read_manifest(manifest_path);
  std::vector<std::string> replay_args = manifest.args;
  if (!out_dir.empty()) {
    bool replaced = false;
    for (std::size_t i = 0; i + 1 < replay_args.size(); ++i) {
      if (replay_args[i] == "--out-dir" || replay_args[i] == "--out") {
        replay_args[i + 1] = replay_args[i] == "--out"
                                 ? out_dir + "/" +
                                       fs::path(replay_args[i + 1]).filename().string()
                                 : out_dir;
        replaced = true;
      }
    }
    if (!replaced) {
      replay_args.push_back("--out-dir");
      replay_args.push_back(out_dir);
    }
  }
  std::vector<std::string> full;
  full.push_back(manifest.command);
  full.insert(full.end(), replay_args.begin(), replay_args.end());
  return dispatch(full);
}

int dispatch(const std::vector<std::string>& args) {
  if (args.empty()) {
    std::cerr << "usage: husolve <gen|solve|round|estimate|bench|replay> [options]\n";
    return kExitError;
  }
  const std::string command = args.front();
  const std::vector<std::string> rest(args.begin() + 1, args.end());
  if (command == "gen") return cmd_gen(rest);
  if (command == "solve") return cmd_solve(rest);
  if (command == "round") return cmd_round(rest);
  if (command == "estimate") return cmd_estimate(rest);
  if (command == "bench") return cmd_bench(rest);
  if (command == "replay") return cmd_replay(rest);
  std::cerr << "unknown command '" << command << "'\n";
  return kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return dispatch(args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
