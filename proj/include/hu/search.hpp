#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hu/solver.hpp"

namespace hu {

struct ProbeSummary {
  double gamma = 0.0;
  HUStatus status = HUStatus::iteration_cap_reached;
  std::uint64_t iterations = 0;
  std::uint64_t matrix_exponentials = 0;
  double wall_seconds = 0.0;
};

/// Outcome of a bisection over the objective threshold. gamma_lo is the
/// largest threshold certified reachable (an epsilon-feasible witness is
/// kept in rho_star); gamma_hi the smallest threshold refuted by a free
/// energy certificate.
struct SearchResult {
  double gamma_lo = -1.0;
  double gamma_hi = 1.0;
  SymMatrix rho_star{1};
  SymMatrix h_star{1};
  IterationLedger ledger_star;      // ledger of the probe that produced rho_star
  IterationLedger combined_ledger;  // records of every probe, concatenated
  std::vector<ProbeSummary> probes;
  std::uint64_t total_iterations = 0;
  std::uint64_t total_matrix_exponentials = 0;
  bool aborted = false;  // a probe hit the iteration cap
};

/// Bisection over gamma in [-1, 1]. The first probe runs at gamma = -1
/// (always feasible for zero-diagonal cost matrices) to seed rho_star, then
/// midpoints are probed until the bracket width reaches `gap`. Every probe
/// starts from a fresh H = 0.
SearchResult binary_search(const CostMatrix& c, const SolverConfig& config, double gap);

/// What a feasibility probe must deliver to drive the bisection. Lets the
/// same bracket logic run over other solver backends (the emulated quantum
/// one in particular).
struct ProbeOutcome {
  HUStatus status = HUStatus::iteration_cap_reached;
  SymMatrix hamiltonian{1};
  SymMatrix rho{1};
  IterationLedger ledger;
};

SearchResult bisect_over_gamma(double gap,
                               const std::function<ProbeOutcome(double)>& probe);

void write_search_trace_csv(const SearchResult& result, const std::string& path);

}  // namespace hu
