#include "hu/quantum_emu.hpp"

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace hu {

NoiseOracle::NoiseOracle(const NoiseModel& model, double default_magnitude)
    : model_(model),
      magnitude_(model.magnitude > 0.0 ? model.magnitude : default_magnitude),
      rng_(Rng::stream(model.rng_seed, Rng::kOracleNoiseStream)) {}

double NoiseOracle::trace_product(const SymMatrix& h, const SymMatrix& a,
                                  AdversarialIntent intent) {
  const double exact = hu::trace_product(gibbs_state(h).rho, a);
  switch (model_.kind) {
    case NoiseKind::none:
      return exact;
    case NoiseKind::uniform:
      return exact + rng_.uniform(-magnitude_, magnitude_);
    case NoiseKind::adversarial:
      return exact + (intent == AdversarialIntent::inflate ? magnitude_ : -magnitude_);
  }
  return exact;
}

Eigen::VectorXd NoiseOracle::gibbs_diagonals(const SymMatrix& h, AdversarialIntent intent) {
  const Eigen::Index n = h.dim();
  Eigen::VectorXd diag = gibbs_state(h).rho.diagonal();
  switch (model_.kind) {
    case NoiseKind::none:
      return diag;
    case NoiseKind::uniform: {
      Eigen::VectorXd delta(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        delta(i) = rng_.uniform(-magnitude_, magnitude_);
      }
      const double mass = delta.cwiseAbs().sum();
      if (mass > magnitude_) delta *= magnitude_ / mass;
      return diag + delta;
    }
    case NoiseKind::adversarial: {
      // Spend the whole l1 budget on the worst diagonal deviation.
      const double inv_n = 1.0 / static_cast<double>(n);
      Eigen::Index worst = 0;
      (diag.array() - inv_n).abs().maxCoeff(&worst);
      const double d = diag(worst) - inv_n;
      const double sign = d >= 0.0 ? 1.0 : -1.0;
      diag(worst) += (intent == AdversarialIntent::inflate ? sign : -sign) * magnitude_;
      return diag;
    }
  }
  return diag;
}

void QuantumEmuConfig::validate() const {
  base.validate();
  if (free_energy_segments < 1) {
    throw std::invalid_argument("QuantumEmuConfig: J must be at least 1");
  }
  if (noise.magnitude < 0.0) {
    throw std::invalid_argument("QuantumEmuConfig: noise magnitude must be nonnegative");
  }
}

QuantumUpdateResult quantum_update(const SymMatrix& h, const SymMatrix& delta_h,
                                   double f_bound, const QuantumEmuConfig& config,
                                   double lambda, NoiseOracle& oracle) {
  const double margin = oracle.magnitude();
  int overshoots = 0;
  SymMatrix h_new = h + lambda * delta_h;
  double slope = oracle.trace_product(h_new, delta_h, AdversarialIntent::deflate);
  while (slope < margin) {
    lambda *= config.base.shrink_factor;
    ++overshoots;
    if (lambda < 1e-300) {
      throw std::runtime_error("quantum_update: step length underflow, numerically stuck");
    }
    h_new = h + lambda * delta_h;
    slope = oracle.trace_product(h_new, delta_h, AdversarialIntent::deflate);
  }

  // Free energy gain bounded from below by a right-endpoint Riemann sum of
  // the (non-increasing) derivative, each segment debited by the oracle
  // precision.
  const int segments = config.free_energy_segments;
  for (int j = 1; j <= segments; ++j) {
    const double fraction = static_cast<double>(j) / static_cast<double>(segments);
    const SymMatrix h_j = h + (fraction * lambda) * delta_h;
    const double estimate = oracle.trace_product(h_j, delta_h, AdversarialIntent::deflate);
    f_bound += (lambda / segments) * (estimate - margin);
  }

  return QuantumUpdateResult{std::move(h_new), f_bound, lambda,
                             config.base.growth_factor * lambda, overshoots};
}

QuantumRunResult quantum_hamiltonian_updates(const CostMatrix& c, double gamma,
                                             const QuantumEmuConfig& config) {
  config.validate();
  if (config.base.step_mode != StepMode::adaptive) {
    throw std::invalid_argument("quantum_hamiltonian_updates: only adaptive step mode is emulated");
  }
  const SymMatrix c_dense = c.to_dense();
  const Eigen::Index n = c_dense.dim();
  const double inv_n = 1.0 / static_cast<double>(n);
  const double epsilon = config.base.epsilon;
  const double threshold = 0.75 * epsilon;
  const std::uint64_t cap = config.base.iteration_cap(n);

  NoiseOracle oracle(config.noise, epsilon / 4.0);
  const SymMatrix p_c = cost_direction(c_dense, gamma);

  QuantumRunResult result;
  result.noise_kind = oracle.kind();

  SymMatrix h(n);
  SymMatrix momentum(n);
  double f_bound = -std::log(static_cast<double>(n));
  double lambda_c = config.base.lambda_c0;
  double lambda_d = config.base.lambda_d0;

  for (;;) {
    if (f_bound > 0.0) {
      result.status = HUStatus::infeasible;
      break;
    }

    const auto t0 = std::chrono::steady_clock::now();
    const double cost_estimate =
        oracle.trace_product(h, p_c, AdversarialIntent::inflate);

    IterationRecord rec;
    rec.iteration = result.ledger.iterations + 1;
    rec.cost_violation = cost_estimate;
    rec.h_max_norm = max_abs_entry(h);

    SymMatrix delta(n);
    double lambda_register = 0.0;
    bool is_cost = false;
    if (cost_estimate > threshold) {
      is_cost = true;
      rec.kind = UpdateKind::cost;
      rec.diag_violation = std::nan("");
      lambda_register = lambda_c;
      delta = cost_estimate * p_c;
      if (config.base.beta > 0.0) {
        delta += (config.base.beta / lambda_c) * momentum;
      }
    } else {
      const Eigen::VectorXd diag =
          oracle.gibbs_diagonals(h, AdversarialIntent::inflate);
      const double diag_estimate = (diag.array() - inv_n).abs().sum();
      rec.diag_violation = diag_estimate;
      if (diag_estimate > threshold) {
        rec.kind = UpdateKind::diag;
        lambda_register = lambda_d;
        const double scale = (diag.array() - inv_n).abs().maxCoeff();
        for (Eigen::Index i = 0; i < n; ++i) {
          delta.set(i, i, (diag(i) - inv_n) / scale);
        }
        if (config.base.beta > 0.0) {
          delta += (config.base.beta / lambda_d) * momentum;
        }
      } else {
        result.status = HUStatus::feasible;
        break;
      }
    }
    if (result.ledger.iterations >= cap) {
      result.status = HUStatus::iteration_cap_reached;
      break;
    }

    QuantumUpdateResult up =
        quantum_update(h, delta, f_bound, config, lambda_register, oracle);
    momentum = up.lambda_applied * delta;
    h = std::move(up.hamiltonian);
    f_bound = up.f_bound;
    (is_cost ? lambda_c : lambda_d) = up.lambda_next;

    rec.lambda = up.lambda_applied;
    rec.overshoots = up.overshoots;
    rec.free_energy = f_bound;
    rec.wall_seconds = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - t0).count();

    QuantumIterationExtras extras;
    extras.f_bound = f_bound;
    extras.f_exact = std::nan("");
    if (config.verify_with_exact) {
      extras.f_exact = gibbs_state(h).free_energy;
      if (f_bound > extras.f_exact + 1e-9) {
        result.bound_violations += 1;
      }
    }
    result.extras.push_back(extras);

    result.ledger.wall_seconds += rec.wall_seconds;
    result.ledger.iterations += 1;
    result.ledger.matrix_exponentials += 1 + static_cast<std::uint64_t>(up.overshoots);
    result.ledger.total_overshoots += static_cast<std::uint64_t>(up.overshoots);
    result.ledger.records.push_back(rec);
  }

  result.hamiltonian = std::move(h);
  result.f_bound = f_bound;
  return result;
}

void write_quantum_ledger_csv(const QuantumRunResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_quantum_ledger_csv: cannot open " + path);
  }
  const char* noise = result.noise_kind == NoiseKind::none
                          ? "none"
                          : (result.noise_kind == NoiseKind::uniform ? "uniform"
                                                                     : "adversarial");
  out << "iteration,kind,lambda,overshoots,cost_violation,diag_violation,"
         "free_energy,h_max_norm,wall_seconds,oracle_noise_kind,F_bound,F_exact\n";
  char buf[640];
  for (std::size_t k = 0; k < result.ledger.records.size(); ++k) {
    const auto& r = result.ledger.records[k];
    const auto& e = result.extras[k];
    std::snprintf(buf, sizeof buf,
                  "%" PRIu64 ",%s,%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.9g,%s,%.17g,%.17g\n",
                  r.iteration, r.kind == UpdateKind::cost ? "cost" : "diag",
                  r.lambda, r.overshoots, r.cost_violation, r.diag_violation,
                  r.free_energy, r.h_max_norm, r.wall_seconds, noise, e.f_bound,
                  e.f_exact);
    out << buf;
  }
}

}  // namespace hu
