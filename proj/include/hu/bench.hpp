#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hu/instances.hpp"
#include "hu/resource_model.hpp"
#include "hu/rounding.hpp"
#include "hu/search.hpp"
#include "hu/solver.hpp"

namespace hu {

struct Quartiles {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};
Quartiles quartiles(std::vector<double> values);

/// Runs fn(0..count-1) on a small worker pool. Results must be written to
/// per-index slots; the schedule never influences outputs.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

/// Internal stand-in for an external solver optimum: the certified-feasible
/// threshold of a binary search at 10x tighter precision.
struct ReferenceRun {
  double gamma_ref = 0.0;
  SymMatrix rho_ref{1};
  SymMatrix h_ref{1};
};
ReferenceRun reference_run(const CostMatrix& c, double epsilon_ref, double gap_ref);

/// Default solver configuration for benchmark protocols.
SolverConfig bench_config(double epsilon, double beta, DiagRule rule = DiagRule::l2);

// ---------------------------------------------------------------------------
// Feasible / infeasible / full-search comparison on one instance family.

struct ComparisonRow {
  std::uint64_t seed = 0;
  double gamma_ref = 0.0;
  std::uint64_t feasible_iterations = 0;
  std::uint64_t feasible_matrix_exponentials = 0;
  bool feasible_ok = false;
  std::uint64_t infeasible_iterations = 0;
  std::uint64_t infeasible_matrix_exponentials = 0;
  bool infeasible_certified = false;
  std::uint64_t search_iterations = 0;
  std::uint64_t search_matrix_exponentials = 0;
};

std::vector<ComparisonRow> run_comparison_protocol(Eigen::Index n, int s, double epsilon,
                                                   double beta, int instances,
                                                   std::uint64_t seed0, int threads);

// ---------------------------------------------------------------------------
// Cumulative-improvement ladder: feasible probe under successively enabled
// improvements (all with adaptive steps and free-energy termination).

struct LadderRow {
  std::uint64_t seed = 0;
  double gamma_ref = 0.0;
  std::uint64_t l1_iterations = 0;        // sign-based diagonal direction
  std::uint64_t l2_iterations = 0;        // magnitude-proportional direction
  std::uint64_t momentum_iterations = 0;  // + momentum
};

std::vector<LadderRow> run_ladder_protocol(Eigen::Index n, int s, double epsilon,
                                           double beta_final, int instances,
                                           std::uint64_t seed0, int threads,
                                           const std::vector<double>& gamma_refs = {});

/// Iteration count of the fixed-step predecessor algorithm, reported as its
/// analytic a-priori bound (64 eps^-2 ln n); it is never actually run.
double original_fixed_step_prediction(Eigen::Index n, double epsilon);

// ---------------------------------------------------------------------------
// Precision sweep: full binary searches across epsilon values, with
// correction and rounding measurements per run.

struct EpsSweepRow {
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  std::uint64_t search_iterations = 0;
  std::uint64_t search_matrix_exponentials = 0;
  double gamma_lo = 0.0;
  double diag_violation = 0.0;            // of rho_star
  double correction_trace_distance = 0.0; // ||rho_sharp - rho_star||_tr
  double round_mean = 0.0;
  double round_best = 0.0;
  double round_batch_max_mean = 0.0;
  double reference_round_mean = 0.0;
  double nu_mean = 0.0;  // (reference mean - run mean) / n
};

struct EpsSweepOptions {
  Eigen::Index n = 256;
  int s = 16;
  std::vector<double> epsilons;
  int instances = 10;
  std::uint64_t seed0 = 1;
  double beta = 0.45;
  std::uint64_t trials = 4000;
  double epsilon_ref = 1e-3;  // reference search precision and gap
  int threads = 1;
};

std::vector<EpsSweepRow> run_eps_sweep_protocol(const EpsSweepOptions& options);

// ---------------------------------------------------------------------------
// Momentum sweep at a fixed precision, for both diagonal update rules.

struct BetaSweepRow {
  double beta = 0.0;
  DiagRule rule = DiagRule::l2;
  Quartiles iterations;
};

std::vector<BetaSweepRow> run_beta_sweep_protocol(Eigen::Index n, int s, double epsilon,
                                                  const std::vector<double>& betas,
                                                  int instances, std::uint64_t seed0,
                                                  int threads);

// ---------------------------------------------------------------------------
// Resource accounting across problem sizes (one full search per n).

std::vector<ResourceReport> run_resource_protocol(const std::vector<Eigen::Index>& ns,
                                                  int s, double epsilon, double beta,
                                                  std::uint64_t seed0, int bits,
                                                  int threads);

// ---------------------------------------------------------------------------
// Campaign front end (line-oriented key-value spec files).

struct CampaignSpec {
  std::string kind;  // comparison | ladder | eps_sweep | beta_sweep | resources | smoke
  Eigen::Index n = 128;
  int s = 16;
  double epsilon = 0.01;
  double beta = 0.45;
  int instances = 20;
  std::uint64_t seed0 = 1;
  std::vector<double> epsilons;
  std::vector<double> betas;
  std::vector<Eigen::Index> ns;
  std::uint64_t trials = 4000;
  double epsilon_ref = 1e-3;
  int bits = 8;
  int threads = 1;
};

CampaignSpec parse_campaign_file(const std::string& path);

/// Executes a campaign and writes its tables under out_dir. Returns the
/// list of files written (relative names).
std::vector<std::string> run_campaign(const CampaignSpec& spec, const std::string& out_dir);

}  // namespace hu
