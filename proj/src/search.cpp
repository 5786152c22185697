#include "hu/search.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace hu {

SearchResult bisect_over_gamma(double gap,
                               const std::function<ProbeOutcome(double)>& probe) {
  if (!(gap > 0.0)) {
    throw std::invalid_argument("bisect_over_gamma: gap must be positive");
  }

  SearchResult result;
  auto run_probe = [&](double gamma) {
    ProbeOutcome outcome = probe(gamma);
    result.probes.push_back({gamma, outcome.status, outcome.ledger.iterations,
                             outcome.ledger.matrix_exponentials,
                             outcome.ledger.wall_seconds});
    result.total_iterations += outcome.ledger.iterations;
    result.total_matrix_exponentials += outcome.ledger.matrix_exponentials;
    auto& combined = result.combined_ledger;
    combined.records.insert(combined.records.end(), outcome.ledger.records.begin(),
                            outcome.ledger.records.end());
    combined.iterations += outcome.ledger.iterations;
    combined.matrix_exponentials += outcome.ledger.matrix_exponentials;
    combined.total_overshoots += outcome.ledger.total_overshoots;
    combined.wall_seconds += outcome.ledger.wall_seconds;
    return outcome;
  };

  {
    ProbeOutcome first = run_probe(-1.0);
    if (first.status == HUStatus::iteration_cap_reached) {
      result.aborted = true;
      return result;
    }
    if (first.status != HUStatus::feasible) {
      throw std::runtime_error("bisect_over_gamma: probe at gamma = -1 came back infeasible");
    }
    result.rho_star = std::move(first.rho);
    result.h_star = std::move(first.hamiltonian);
    result.ledger_star = std::move(first.ledger);
  }

  while (result.gamma_hi - result.gamma_lo > gap) {
    const double mid = 0.5 * (result.gamma_lo + result.gamma_hi);
    ProbeOutcome outcome = run_probe(mid);
    if (outcome.status == HUStatus::iteration_cap_reached) {
      result.aborted = true;
      break;
    }
    if (outcome.status == HUStatus::feasible) {
      result.gamma_lo = mid;
      result.rho_star = std::move(outcome.rho);
      result.h_star = std::move(outcome.hamiltonian);
      result.ledger_star = std::move(outcome.ledger);
    } else {
      result.gamma_hi = mid;
    }
  }
  return result;
}

SearchResult binary_search(const CostMatrix& c, const SolverConfig& config, double gap) {
  config.validate();
  const SymMatrix c_dense = c.to_dense();
  return bisect_over_gamma(gap, [&](double gamma) {
    HUResult run = hamiltonian_updates_dense(c_dense, gamma, config);
    return ProbeOutcome{run.status, std::move(run.hamiltonian), std::move(run.rho),
                        std::move(run.ledger)};
  });
}

void write_search_trace_csv(const SearchResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_search_trace_csv: cannot open " + path);
  }
  out << "probe,gamma,outcome,iterations,matrix_exponentials,wall_seconds\n";
  char buf[256];
  for (std::size_t k = 0; k < result.probes.size(); ++k) {
    const auto& p = result.probes[k];
    const char* outcome = p.status == HUStatus::feasible
                              ? "feasible"
                              : (p.status == HUStatus::infeasible ? "infeasible"
                                                                  : "cap_reached");
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%s,%" PRIu64 ",%" PRIu64 ",%.9g\n",
                  k, p.gamma, outcome, p.iterations, p.matrix_exponentials,
                  p.wall_seconds);
    out << buf;
  }
}

}  // namespace hu
