#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hu/instances.hpp"
#include "hu/sym_matrix.hpp"

namespace hu {

enum class StepMode { adaptive, theoretical };
enum class DiagRule { l1, l2 };

/// Hyperparameters of a Hamiltonian-Updates run.
struct SolverConfig {
  double epsilon = 0.01;  // feasibility precision, 0 < epsilon <= 1/2
  double beta = 0.0;      // momentum decay, 0 <= beta < 1
  double lambda_c0 = 1.0;
  double lambda_d0 = 1.0;
  StepMode step_mode = StepMode::adaptive;
  DiagRule diag_rule = DiagRule::l2;
  std::uint64_t max_iterations = 0;  // 0: 10x the a-priori bound
  double growth_factor = 1.3;
  double shrink_factor = 0.5;

  void validate() const;
  std::uint64_t iteration_cap(Eigen::Index n) const;
};

enum class UpdateKind { cost, diag };

struct IterationRecord {
  std::uint64_t iteration = 0;
  UpdateKind kind = UpdateKind::cost;
  double lambda = 0.0;          // step length actually applied
  int overshoots = 0;           // halvings before the sign condition held
  double cost_violation = 0.0;  // tr(P_c rho) at the branch decision
  double diag_violation = 0.0;  // sum_i |rho_ii - 1/n| at the branch decision
  double free_energy = 0.0;     // after the update
  double h_max_norm = 0.0;      // ||H||_max at the branch decision
  double wall_seconds = 0.0;
};

struct IterationLedger {
  std::vector<IterationRecord> records;
  std::uint64_t iterations = 0;
  std::uint64_t matrix_exponentials = 0;  // == iterations + total_overshoots
  std::uint64_t total_overshoots = 0;
  std::uint64_t theoretical_sign_violations = 0;
  double wall_seconds = 0.0;
};

enum class HUStatus { feasible, infeasible, iteration_cap_reached };

struct HUResult {
  HUStatus status = HUStatus::iteration_cap_reached;
  SymMatrix hamiltonian{1};
  SymMatrix rho{1};
  double free_energy = 0.0;
  IterationLedger ledger;
};

/// P_c = gamma * I - C.
SymMatrix cost_direction(const SymMatrix& c_dense, double gamma);

/// Sign-based diagonal update direction: diag(sgn(rho_ii - 1/n)) minus its
/// mean on the diagonal, with sgn(0) = 0. Satisfies
/// tr(rho * result) == sum_i |rho_ii - 1/n|.
SymMatrix diag_direction_l1(const SymMatrix& rho);

/// Magnitude-proportional direction (diag(rho) - I/n) / max_i |rho_ii - 1/n|,
/// largest absolute entry exactly 1. Requires at least one deviating
/// diagonal; throws when the state is already diagonal-feasible.
SymMatrix diag_direction_l2(const SymMatrix& rho);

/// sum_i |rho_ii - 1/n|.
double diag_violation_l1(const SymMatrix& rho);

struct UpdateResult {
  SymMatrix hamiltonian{1};
  GibbsState state{SymMatrix{1}, 0.0};
  double lambda_applied = 0.0;
  double lambda_next = 0.0;
  int overshoots = 0;
};

/// One adaptive update H -> H + lambda' * delta_h where lambda' is the first
/// value in {lambda, lambda/2, ...} for which tr(delta_h rho_new) >= 0.
/// Costs one matrix exponential per candidate step length.
UpdateResult update(const SymMatrix& h, const SymMatrix& delta_h, double lambda,
                    const SolverConfig& config);

/// Step length ((1 - beta)^2 / 2) * tr(rho delta_h) used in theoretical mode.
double theoretical_step(const SymMatrix& rho, const SymMatrix& delta_h, double beta);

/// Worst-case iteration count 16 (1-beta)^-6 eps^-2 ln(n) for a feasible
/// program solved in theoretical mode with the l1 diagonal direction.
double a_priori_bound_real(Eigen::Index n, double epsilon, double beta);
std::uint64_t a_priori_bound(Eigen::Index n, double epsilon, double beta);

/// Main solver loop. Runs until the state is epsilon-feasible (Feasible),
/// the free energy certifies infeasibility (Infeasible), or the safety cap
/// is reached.
HUResult hamiltonian_updates(const CostMatrix& c, double gamma, const SolverConfig& config);

/// Variant taking a dense cost matrix (used by tests with hand-built
/// matrices that are not sparse instances).
HUResult hamiltonian_updates_dense(const SymMatrix& c_dense, double gamma,
                                   const SolverConfig& config);

void write_ledger_csv(const IterationLedger& ledger, const std::string& path);
IterationLedger read_ledger_csv(const std::string& path);

}  // namespace hu
