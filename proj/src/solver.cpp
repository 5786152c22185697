#include "hu/solver.hpp"

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hu {

void SolverConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon <= 0.5)) {
    throw std::invalid_argument("SolverConfig: epsilon must be in (0, 1/2]");
  }
  if (!(beta >= 0.0 && beta < 1.0)) {
    throw std::invalid_argument("SolverConfig: beta must be in [0, 1)");
  }
  if (!(lambda_c0 > 0.0 && lambda_d0 > 0.0)) {
    throw std::invalid_argument("SolverConfig: initial step lengths must be positive");
  }
  if (!(growth_factor > 1.0)) {
    throw std::invalid_argument("SolverConfig: growth factor must exceed 1");
  }
  if (!(shrink_factor > 0.0 && shrink_factor < 1.0)) {
    throw std::invalid_argument("SolverConfig: shrink factor must be in (0, 1)");
  }
}

std::uint64_t SolverConfig::iteration_cap(Eigen::Index n) const {
  if (max_iterations > 0) return max_iterations;
  const double capped = 10.0 * a_priori_bound_real(n, epsilon, beta);
  if (capped > 9e18) return UINT64_MAX;
  return static_cast<std::uint64_t>(std::ceil(capped));
}

SymMatrix cost_direction(const SymMatrix& c_dense, double gamma) {
  SymMatrix p = c_dense * -1.0;
  p.add_to_diagonal(gamma);
  return p;
}

double diag_violation_l1(const SymMatrix& rho) {
  const double inv_n = 1.0 / static_cast<double>(rho.dim());
  return (rho.diagonal().array() - inv_n).abs().sum();
}

SymMatrix diag_direction_l1(const SymMatrix& rho) {
  const Eigen::Index n = rho.dim();
  const double inv_n = 1.0 / static_cast<double>(n);
  SymMatrix p(n);
  double sign_trace = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = rho(i, i) - inv_n;
    const double sign = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
    p.set(i, i, sign);
    sign_trace += sign;
  }
  p.add_to_diagonal(-sign_trace * inv_n);

  const double check = trace_product(rho, p);
  if (std::abs(check - diag_violation_l1(rho)) > 1e-12) {
    throw std::logic_error("diag_direction_l1: trace identity violated");
  }
  return p;
}

SymMatrix diag_direction_l2(const SymMatrix& rho) {
  const Eigen::Index n = rho.dim();
  const double inv_n = 1.0 / static_cast<double>(n);
  const double scale = (rho.diagonal().array() - inv_n).abs().maxCoeff();
  if (scale <= 0.0) {
    throw std::invalid_argument("diag_direction_l2: state is already diagonal-feasible");
  }
  SymMatrix p(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    p.set(i, i, (rho(i, i) - inv_n) / scale);
  }
  return p;
}

UpdateResult update(const SymMatrix& h, const SymMatrix& delta_h, double lambda,
                    const SolverConfig& config) {
  int overshoots = 0;
  for (;;) {
    SymMatrix h_new = h + lambda * delta_h;
    GibbsState state = gibbs_state(h_new);
    if (trace_product(delta_h, state.rho) >= 0.0) {
      return UpdateResult{std::move(h_new), std::move(state), lambda,
                          config.growth_factor * lambda, overshoots};
    }
    lambda *= config.shrink_factor;
    ++overshoots;
    if (lambda < 1e-300) {
      throw std::runtime_error("update: step length underflow, numerically stuck");
    }
  }
}

double theoretical_step(const SymMatrix& rho, const SymMatrix& delta_h, double beta) {
  const double slope = trace_product(rho, delta_h);
  return 0.5 * (1.0 - beta) * (1.0 - beta) * slope;
}

double a_priori_bound_real(Eigen::Index n, double epsilon, double beta) {
  if (n < 2) throw std::invalid_argument("a_priori_bound: n must be >= 2");
  if (!(epsilon > 0.0 && epsilon <= 0.5)) {
    throw std::invalid_argument("a_priori_bound: epsilon must be in (0, 1/2]");
  }
  if (!(beta >= 0.0 && beta < 1.0)) {
    throw std::invalid_argument("a_priori_bound: beta must be in [0, 1)");
  }
  return 16.0 * std::pow(1.0 - beta, -6.0) / (epsilon * epsilon) *
         std::log(static_cast<double>(n));
}

std::uint64_t a_priori_bound(Eigen::Index n, double epsilon, double beta) {
  const double bound = std::ceil(a_priori_bound_real(n, epsilon, beta));
  if (bound > 9e18) return UINT64_MAX;
  return static_cast<std::uint64_t>(bound);
}

namespace {

struct LoopState {
  SymMatrix h;
  GibbsState gibbs;
  SymMatrix momentum;
  double lambda_c;
  double lambda_d;
};

HUResult run_loop(const SymMatrix& c_dense, double gamma, const SolverConfig& config) {
  config.validate();
  const Eigen::Index n = c_dense.dim();
  const double inv_n = 1.0 / static_cast<double>(n);
  const std::uint64_t cap = config.iteration_cap(n);

  const SymMatrix p_c = cost_direction(c_dense, gamma);

  LoopState st{SymMatrix(n),
               GibbsState{SymMatrix::identity(n) * inv_n,
                          -std::log(static_cast<double>(n))},
               SymMatrix(n), config.lambda_c0, config.lambda_d0};
  SymMatrix prev_delta(n);  // momentum direction for theoretical mode
  IterationLedger ledger;

  HUResult result;
  for (;;) {
    if (st.gibbs.free_energy > 0.0) {
      result.status = HUStatus::infeasible;
      break;
    }

    const double cost_violation = trace_product(p_c, st.gibbs.rho);
    const double diag_violation = diag_violation_l1(st.gibbs.rho);
    const bool cost_branch = cost_violation > config.epsilon;
    const bool diag_branch = !cost_branch && diag_violation > config.epsilon;
    if (!cost_branch && !diag_branch) {
      result.status = HUStatus::feasible;
      break;
    }
    if (ledger.iterations >= cap) {
      result.status = HUStatus::iteration_cap_reached;
      break;
    }

    const auto t0 = std::chrono::steady_clock::now();
    IterationRecord rec;
    rec.iteration = ledger.iterations + 1;
    rec.kind = cost_branch ? UpdateKind::cost : UpdateKind::diag;
    rec.cost_violation = cost_violation;
    rec.diag_violation = diag_violation;
    rec.h_max_norm = max_abs_entry(st.h);

    SymMatrix direction = cost_branch
                              ? cost_violation * p_c
                              : (config.step_mode == StepMode::theoretical ||
                                         config.diag_rule == DiagRule::l1
                                     ? diag_direction_l1(st.gibbs.rho)
                                     : diag_direction_l2(st.gibbs.rho));
    if (config.step_mode == StepMode::theoretical && cost_branch) {
      direction = p_c;  // the violation rescaling is absorbed into the step
    }

    if (config.step_mode == StepMode::adaptive) {
      const double lambda_register = cost_branch ? st.lambda_c : st.lambda_d;
      SymMatrix delta = direction;
      if (config.beta > 0.0) {
        delta += (config.beta / lambda_register) * st.momentum;
      }
      UpdateResult up = update(st.h, delta, lambda_register, config);
      rec.lambda = up.lambda_applied;
      rec.overshoots = up.overshoots;
      st.momentum = up.lambda_applied * delta;
      st.h = std::move(up.hamiltonian);
      st.gibbs = std::move(up.state);
      (cost_branch ? st.lambda_c : st.lambda_d) = up.lambda_next;
      ledger.matrix_exponentials += 1 + static_cast<std::uint64_t>(up.overshoots);
      ledger.total_overshoots += static_cast<std::uint64_t>(up.overshoots);
    } else {
      SymMatrix delta = direction;
      if (config.beta > 0.0) {
        delta += config.beta * prev_delta;
      }
      const double lambda = theoretical_step(st.gibbs.rho, delta, config.beta);
      st.h += lambda * delta;
      st.gibbs = gibbs_state(st.h);
      ledger.matrix_exponentials += 1;
      rec.lambda = lambda;
      // The chosen step length cannot overshoot analytically; count any
      // numerical sign reversal instead of correcting it.
      if (trace_product(delta, st.gibbs.rho) < -1e-12) {
        ledger.theoretical_sign_violations += 1;
      }
      st.momentum = lambda * delta;
      prev_delta = std::move(delta);
    }

    rec.free_energy = st.gibbs.free_energy;
    rec.wall_seconds = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - t0).count();
    ledger.wall_seconds += rec.wall_seconds;
    ledger.iterations += 1;
    ledger.records.push_back(rec);
  }

  result.hamiltonian = std::move(st.h);
  result.rho = std::move(st.gibbs.rho);
  result.free_energy = st.gibbs.free_energy;
  result.ledger = std::move(ledger);
  return result;
}

}  // namespace

HUResult hamiltonian_updates(const CostMatrix& c, double gamma, const SolverConfig& config) {
  return run_loop(c.to_dense(), gamma, config);
}

HUResult hamiltonian_updates_dense(const SymMatrix& c_dense, double gamma,
                                   const SolverConfig& config) {
  return run_loop(c_dense, gamma, config);
}

void write_ledger_csv(const IterationLedger& ledger, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_ledger_csv: cannot open " + path);
  }
  out << "iteration,kind,lambda,overshoots,cost_violation,diag_violation,"
         "free_energy,h_max_norm,wall_seconds\n";
  char buf[512];
  for (const auto& r : ledger.records) {
    std::snprintf(buf, sizeof buf,
                  "%" PRIu64 ",%s,%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.9g\n",
                  r.iteration, r.kind == UpdateKind::cost ? "cost" : "diag",
                  r.lambda, r.overshoots, r.cost_violation, r.diag_violation,
                  r.free_energy, r.h_max_norm, r.wall_seconds);
    out << buf;
  }
}

IterationLedger read_ledger_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("read_ledger_csv: cannot open " + path);
  }
  std::string header;
  if (!std::getline(in, header)) {
    throw std::runtime_error("read_ledger_csv: empty file " + path);
  }
  std::vector<std::string> columns;
  {
    std::istringstream hs(header);
    std::string col;
    while (std::getline(hs, col, ',')) columns.push_back(col);
  }
  auto column_index = [&](const std::string& name) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return static_cast<int>(i);
    }
    return -1;
  };
  const int c_iter = column_index("iteration");
  const int c_kind = column_index("kind");
  const int c_lambda = column_index("lambda");
  const int c_overshoots = column_index("overshoots");
  const int c_cost = column_index("cost_violation");
  const int c_diag = column_index("diag_violation");
  const int c_free = column_index("free_energy");
  const int c_hmax = column_index("h_max_norm");
  const int c_wall = column_index("wall_seconds");
  if (c_iter < 0 || c_kind < 0 || c_lambda < 0 || c_overshoots < 0) {
    throw std::runtime_error("read_ledger_csv: missing core columns in " + path);
  }

  IterationLedger ledger;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    auto get = [&](int idx, double fallback) {
      return (idx >= 0 && idx < static_cast<int>(fields.size()))
                 ? std::stod(fields[static_cast<std::size_t>(idx)])
                 : fallback;
    };
    IterationRecord r;
    r.iteration = static_cast<std::uint64_t>(get(c_iter, 0));
    r.kind = fields[static_cast<std::size_t>(c_kind)] == "cost" ? UpdateKind::cost
                                                                : UpdateKind::diag;
    r.lambda = get(c_lambda, 0.0);
    r.overshoots = static_cast<int>(get(c_overshoots, 0.0));
    r.cost_violation = get(c_cost, 0.0);
    r.diag_violation = get(c_diag, 0.0);
    r.free_energy = get(c_free, 0.0);
    r.h_max_norm = get(c_hmax, std::nan(""));
    r.wall_seconds = get(c_wall, std::nan(""));
    ledger.records.push_back(r);
    ledger.iterations += 1;
    ledger.matrix_exponentials += 1 + static_cast<std::uint64_t>(r.overshoots);
    ledger.total_overshoots += static_cast<std::uint64_t>(r.overshoots);
    if (std::isfinite(r.wall_seconds)) ledger.wall_seconds += r.wall_seconds;
  }
  return ledger;
}

}  // namespace hu
