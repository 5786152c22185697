#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hu/rng.hpp"
#include "hu/solver.hpp"
#include "hu/sym_matrix.hpp"

namespace hu {

enum class NoiseKind { none, uniform, adversarial };

/// Finite-precision model for the emulated quantum subroutines. Every
/// perturbation is bounded by `magnitude` (absolute for trace products,
/// l1 for the diagonal vector); magnitude 0 means "use epsilon/4".
struct NoiseModel {
  NoiseKind kind = NoiseKind::uniform;
  double magnitude = 0.0;
  std::uint64_t rng_seed = 0;
};

/// Which way an adversarial oracle should push to stall the caller:
/// inflate makes violations look larger, deflate makes the queried trace
/// look smaller.
enum class AdversarialIntent { inflate, deflate };

/// Stateful wrapper around the exact kernel that applies the configured
/// perturbations. One oracle instance serves a whole emulated run so the
/// noise stream advances deterministically across calls.
class NoiseOracle {
 public:
  NoiseOracle(const NoiseModel& model, double default_magnitude);

  /// tr(A rho_H) up to +-magnitude.
  double trace_product(const SymMatrix& h, const SymMatrix& a, AdversarialIntent intent);

  /// Diagonal of rho_H perturbed by at most `magnitude` in l1 norm.
  Eigen::VectorXd gibbs_diagonals(const SymMatrix& h, AdversarialIntent intent);

  double magnitude() const { return magnitude_; }
  NoiseKind kind() const { return model_.kind; }

 private:
  NoiseModel model_;
  double magnitude_;
  Rng rng_;
};

struct QuantumEmuConfig {
  SolverConfig base;
  NoiseModel noise;
  int free_energy_segments = 1;  // J, trace estimations per update
  bool verify_with_exact = true;

  void validate() const;
};

/// Per-iteration bookkeeping on top of the shared ledger: the running free
/// energy lower bound and (when verification is on) the exact free energy.
struct QuantumIterationExtras {
  double f_bound = 0.0;
  double f_exact = 0.0;  // NaN when verification disabled
};

struct QuantumRunResult {
  HUStatus status = HUStatus::iteration_cap_reached;
  SymMatrix hamiltonian{1};
  double f_bound = 0.0;
  IterationLedger ledger;
  std::vector<QuantumIterationExtras> extras;  // one entry per iteration
  std::uint64_t bound_violations = 0;  // iterations where f_bound > f_exact + 1e-9
  NoiseKind noise_kind = NoiseKind::none;
};

struct QuantumUpdateResult {
  SymMatrix hamiltonian{1};
  double f_bound = 0.0;
  double lambda_applied = 0.0;
  double lambda_next = 0.0;
  int overshoots = 0;
};

/// One update step driven entirely by oracle queries: the overshoot loop
/// halves lambda while the estimated tr(delta_h rho_new) stays below
/// magnitude, then the free energy bound is advanced by a right-endpoint
/// Riemann sum over J segments, each debited by the oracle precision.
QuantumUpdateResult quantum_update(const SymMatrix& h, const SymMatrix& delta_h,
                                   double f_bound, const QuantumEmuConfig& config,
                                   double lambda, NoiseOracle& oracle);

/// Emulated quantum solver: identical loop structure to the classical one
/// but with branch thresholds at (3/4) epsilon, all state access through
/// the noisy oracles, and incremental free-energy tracking. A returned
/// solution's exact Gibbs state is epsilon-feasible because
/// (3/4) epsilon + magnitude <= epsilon.
QuantumRunResult quantum_hamiltonian_updates(const CostMatrix& c, double gamma,
                                             const QuantumEmuConfig& config);

void write_quantum_ledger_csv(const QuantumRunResult& result, const std::string& path);

}  // namespace hu
