#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hu/instances.hpp"
#include "hu/rng.hpp"
#include "hu/sym_matrix.hpp"

namespace hu {

/// Result of mapping an approximately diagonal-feasible state to one whose
/// diagonal is exactly uniform.
struct CorrectionReport {
  SymMatrix rho_sharp{1};
  std::vector<Eigen::Index> large_deviation_set;  // rows reset outright
  double trace_distance = 0.0;                    // ||rho_sharp - rho||_tr
  double xi = 0.0;                                // epsilon^(1/3)
};

/// Exact-diagonal correction. With xi = epsilon^(1/3) and d_i = rho_ii - 1/n,
/// rows with |d_i| > xi/n are reset (off-diagonals zeroed, diagonal 1/n);
/// the remaining diagonal deviations are cancelled and the whole matrix is
/// mixed with (xi/n) * I and renormalized, which keeps it psd.
/// Requires sum_i |d_i| <= epsilon; rejects otherwise with the measured
/// violation.
CorrectionReport correct_solution(const SymMatrix& rho, double epsilon);

struct RoundingReport {
  std::uint64_t trials = 0;
  Eigen::VectorXd best_x;
  double best_value = 0.0;
  double mean_value = 0.0;
  double batch_max_mean = 0.0;  // mean of per-batch maxima
  std::uint64_t batch_size = 0;
  std::uint64_t rng_seed = 0;
  std::vector<double> values;  // objective of every trial, in trial order
};

/// Randomized rounding: x_i = sgn((sqrt(rho) g)_i) for a standard Gaussian
/// vector g, with sgn(0) mapped to +1. Trial t draws from substream
/// (seed, stream_id, t), so reports are deterministic and independent of
/// any parallel schedule. Batch size defaults to 1000 and scales down to
/// trials/100 when fewer than 1e5 trials are requested.
RoundingReport randomized_round(const SymMatrix& rho, const CostMatrix& c,
                                std::uint64_t trials, std::uint64_t rng_seed,
                                std::uint64_t stream_id = Rng::kRoundingStream);

/// Mean over consecutive batches of the per-batch maximum. Requires the
/// value count to be divisible by the batch size.
double batch_max_statistic(const std::vector<double>& values, std::size_t batch_size);

struct NuMetric {
  double nu = 0.0;
  std::string x_opt_provenance;
};

/// Objective gap per dimension between a reference rounding and an
/// epsilon-run rounding: (x_opt^T C x_opt - x_eps^T C x_eps) / n. May be
/// negative when the epsilon run happens to win. Entries must be +-1.
NuMetric nu_metric(const Eigen::VectorXd& x_eps, const Eigen::VectorXd& x_opt,
                   const CostMatrix& c, std::string x_opt_provenance = {});

void write_rounding_report_csv(const RoundingReport& report, const std::string& path);
void write_rounding_summary(const RoundingReport& report, const std::string& path);

}  // namespace hu
