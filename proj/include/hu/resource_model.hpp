#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hu/solver.hpp"

namespace hu {

struct GateCostInput {
  Eigen::Index n = 0;
  int s = 0;
  int bits = 8;  // logical bits per stored Hamiltonian entry
  double epsilon = 0.0;
  double h_plus_max_norm = 0.0;

  void validate() const;
};

/// Two-qubit gates for one Gibbs-state preparation:
/// (32 b + 32 log2(n) - 18) * (4.5 ln(7.8 / eps) sqrt(n) s ||H+||_max - 1),
/// floored at zero.
double gates_per_gibbs_prep(const GateCostInput& input);

/// Gibbs-state preparations needed for one diagonal estimate:
/// 128 ln(2) eps^-2 n. Out of regime (eps > 1/4) still evaluates; callers
/// should consult samples_regime_ok.
double samples_per_diag_estimate(Eigen::Index n, double epsilon);
bool samples_regime_ok(double epsilon);

/// Exact finite-failure-probability variant 137 eps^-2 (n ln 2 + ln(1/p)),
/// taking ln(1/p) directly (benchmark convention uses ln(1/p) >= 4).
double samples_per_diag_estimate_with_failure(Eigen::Index n, double epsilon,
                                              double ln_inv_p);

struct HPlusEstimate {
  double estimate = 0.0;           // 2 * ||H||_max, the observed ratio
  double conservative_floor = 0.0; // 1 * ||H||_max
};
HPlusEstimate h_plus_max_norm_estimate(double h_max_norm);

struct ResourceRow {
  std::uint64_t iteration = 0;
  double h_max_norm = 0.0;
  double h_plus_max_norm = 0.0;
  double gates_per_prep = 0.0;
  double samples = 0.0;
  double gates = 0.0;  // gates_per_prep * samples
};

struct ResourceReport {
  Eigen::Index n = 0;
  int s = 0;
  int bits = 8;
  double epsilon = 0.0;
  std::uint64_t diag_updates = 0;
  double gates_per_gibbs_prep = 0.0;     // mean over diagonal updates
  double samples_per_diag_estimate = 0.0;
  double gates_per_diag_update = 0.0;    // mean product
  double total_gates = 0.0;
  double total_gates_floor = 0.0;        // with ||H+|| = ||H||_max instead of 2x
  double classical_wall_seconds = 0.0;
  double break_even_seconds = 0.0;       // +inf when no diagonal update occurred
  std::vector<ResourceRow> rows;
};

/// Quantum cost accounting for a completed classical run: only diagonal
/// updates are charged (one diagonal estimate each, at the ||H||_max the
/// ledger recorded); every other quantum subroutine is counted as free.
/// Requires per-iteration wall times and ||H||_max in the ledger.
ResourceReport iteration_resources(const IterationLedger& ledger, Eigen::Index n,
                                   int s, double epsilon, int bits);

void write_resource_report(const ResourceReport& report, const std::string& kv_path,
                           const std::string& rows_csv_path);

struct PowerLawFit {
  double a1 = 0.0;  // prefactor of f(t) = a1 * t^a2
  double a2 = 0.0;  // exponent
  double residual_sum_squares = 0.0;  // in log-log space
  double a2_ci_low = 0.0;             // 95% confidence interval
  double a2_ci_high = 0.0;
};

/// Least squares on (ln t, ln y). Requires >= 3 strictly positive points.
PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points);

enum class ExtrapolationMode { theory_exponents, free_fit };

struct BreakEvenProjection {
  double n = 0.0;
  double classical_seconds = 0.0;
  double total_gates = 0.0;
  double break_even_seconds = 0.0;
};

struct BreakEvenExtrapolation {
  PowerLawFit classical_seconds;  // vs n
  PowerLawFit total_gates;        // vs n
  PowerLawFit break_even;         // vs n (ratio of the two fits)
  std::vector<BreakEvenProjection> projection;
};

/// Fits classical wall time and quantum gate count against n and projects
/// the break-even gate time. Theory mode pins the exponents to the
/// per-iteration scalings (n^3 classical, n^1.5 quantum) and fits only the
/// prefactors; free mode fits both parameters.
BreakEvenExtrapolation break_even_extrapolation(const std::vector<ResourceReport>& reports,
                                                ExtrapolationMode mode,
                                                const std::vector<double>& projection_ns);

void write_projection_csv(const BreakEvenExtrapolation& extrapolation,
                          const std::string& path);

}  // namespace hu
