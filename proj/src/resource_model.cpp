#include "hu/resource_model.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace hu {

void GateCostInput::validate() const {
  if (n < 2) throw std::invalid_argument("GateCostInput: n must be >= 2");
  if (s < 1) throw std::invalid_argument("GateCostInput: s must be positive");
  if (bits < 1) throw std::invalid_argument("GateCostInput: bits must be >= 1");
  if (!(epsilon > 0.0)) throw std::invalid_argument("GateCostInput: epsilon must be positive");
  if (h_plus_max_norm < 0.0) {
    throw std::invalid_argument("GateCostInput: h_plus_max_norm must be nonnegative");
  }
}

double gates_per_gibbs_prep(const GateCostInput& input) {
  input.validate();
  const double prefactor = 32.0 * input.bits +
                           32.0 * std::log2(static_cast<double>(input.n)) - 18.0;
  const double simulation = 4.5 * std::log(7.8 / input.epsilon) *
                                std::sqrt(static_cast<double>(input.n)) *
                                static_cast<double>(input.s) * input.h_plus_max_norm -
                            1.0;
  return std::max(0.0, prefactor * simulation);
}

bool samples_regime_ok(double epsilon) { return epsilon <= 0.25; }

double samples_per_diag_estimate(Eigen::Index n, double epsilon) {
  if (n < 1) throw std::invalid_argument("samples_per_diag_estimate: n must be >= 1");
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("samples_per_diag_estimate: epsilon must be positive");
  }
  return 128.0 * std::log(2.0) / (epsilon * epsilon) * static_cast<double>(n);
}

double samples_per_diag_estimate_with_failure(Eigen::Index n, double epsilon,
                                              double ln_inv_p) {
  if (n < 1 || !(epsilon > 0.0) || ln_inv_p < 0.0) {
    throw std::invalid_argument("samples_per_diag_estimate_with_failure: bad arguments");
  }
  return 137.0 / (epsilon * epsilon) *
         (static_cast<double>(n) * std::log(2.0) + ln_inv_p);
}

HPlusEstimate h_plus_max_norm_estimate(double h_max_norm) {
  if (h_max_norm < 0.0) {
    throw std::invalid_argument("h_plus_max_norm_estimate: norm must be nonnegative");
  }
  return HPlusEstimate{2.0 * h_max_norm, h_max_norm};
}

ResourceReport iteration_resources(const IterationLedger& ledger, Eigen::Index n,
                                   int s, double epsilon, int bits) {
  ResourceReport report;
  report.n = n;
  report.s = s;
  report.bits = bits;
  report.epsilon = epsilon;
  report.samples_per_diag_estimate = samples_per_diag_estimate(n, epsilon);

  double wall = 0.0;
  double prep_sum = 0.0;
  for (const auto& rec : ledger.records) {
    if (!std::isfinite(rec.wall_seconds)) {
      throw std::invalid_argument("iteration_resources: ledger lacks wall-time data");
    }
    wall += rec.wall_seconds;
    if (rec.kind != UpdateKind::diag) continue;
    if (!std::isfinite(rec.h_max_norm)) {
      throw std::invalid_argument("iteration_resources: ledger lacks h_max_norm data");
    }
    const HPlusEstimate h_plus = h_plus_max_norm_estimate(rec.h_max_norm);

    ResourceRow row;
    row.iteration = rec.iteration;
    row.h_max_norm = rec.h_max_norm;
    row.h_plus_max_norm = h_plus.estimate;
    row.gates_per_prep =
        gates_per_gibbs_prep({n, s, bits, epsilon, h_plus.estimate});
    row.samples = report.samples_per_diag_estimate;
    row.gates = row.gates_per_prep * row.samples;
    report.rows.push_back(row);

    prep_sum += row.gates_per_prep;
    report.total_gates += row.gates;
    report.total_gates_floor +=
        gates_per_gibbs_prep({n, s, bits, epsilon, h_plus.conservative_floor}) *
        report.samples_per_diag_estimate;
  }
  report.diag_updates = report.rows.size();
  report.classical_wall_seconds = wall;
  if (report.diag_updates > 0) {
    report.gates_per_gibbs_prep = prep_sum / static_cast<double>(report.diag_updates);
    report.gates_per_diag_update =
        report.total_gates / static_cast<double>(report.diag_updates);
  }
  report.break_even_seconds =
      report.total_gates > 0.0 ? wall / report.total_gates
                               : std::numeric_limits<double>::infinity();
  return report;
}

void write_resource_report(const ResourceReport& report, const std::string& kv_path,
                           const std::string& rows_csv_path) {
  {
    std::ofstream out(kv_path);
    if (!out) throw std::runtime_error("write_resource_report: cannot open " + kv_path);
    char buf[64];
    auto emit = [&](const char* key, double v) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << key << " = " << buf << "\n";
    };
    out << "n = " << report.n << "\n";
    out << "s = " << report.s << "\n";
    out << "bits = " << report.bits << "\n";
    emit("epsilon", report.epsilon);
    out << "diag_updates = " << report.diag_updates << "\n";
    emit("gates_per_gibbs_prep", report.gates_per_gibbs_prep);
    emit("samples_per_diag_estimate", report.samples_per_diag_estimate);
    emit("gates_per_diag_update", report.gates_per_diag_update);
    emit("total_gates", report.total_gates);
    emit("total_gates_floor", report.total_gates_floor);
    emit("classical_wall_seconds", report.classical_wall_seconds);
    emit("break_even_seconds", report.break_even_seconds);
    out << "samples_in_regime = " << (samples_regime_ok(report.epsilon) ? "true" : "false")
        << "\n";
  }
  {
    std::ofstream out(rows_csv_path);
    if (!out) throw std::runtime_error("write_resource_report: cannot open " + rows_csv_path);
    out << "iteration,h_max_norm,h_plus_max_norm,gates_per_prep,samples,gates\n";
    char buf[256];
    for (const auto& row : report.rows) {
      std::snprintf(buf, sizeof buf, "%" PRIu64 ",%.17g,%.17g,%.17g,%.17g,%.17g\n",
                    row.iteration, row.h_max_norm, row.h_plus_max_norm,
                    row.gates_per_prep, row.samples, row.gates);
      out << buf;
    }
  }
}

namespace {

// Two-sided 97.5% Student-t quantiles for small degrees of freedom; the
// normal quantile is accurate enough beyond the table.
double t_quantile_975(int dof) {
  static const double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447,
                                 2.365,  2.306, 2.262, 2.228, 2.201, 2.179,
                                 2.160,  2.145, 2.131, 2.120, 2.110, 2.101,
                                 2.093,  2.086, 2.080, 2.074, 2.069, 2.064,
                                 2.060,  2.056, 2.052, 2.048, 2.045, 2.042};
  if (dof < 1) return std::numeric_limits<double>::infinity();
  if (dof <= 30) return table[dof - 1];
  return 1.96;
}

}  // namespace

PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) {
    throw std::invalid_argument("fit_power_law: need at least 3 points");
  }
  const auto m = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [t, y] : points) {
    if (!(t > 0.0) || !(y > 0.0)) {
      throw std::invalid_argument("fit_power_law: coordinates must be positive");
    }
    sx += std::log(t);
    sy += std::log(y);
  }
  const double mean_x = sx / m;
  const double mean_y = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [t, y] : points) {
    const double dx = std::log(t) - mean_x;
    sxx += dx * dx;
    sxy += dx * (std::log(y) - mean_y);
  }
  if (sxx == 0.0) {
    throw std::invalid_argument("fit_power_law: all abscissae are equal");
  }

  PowerLawFit fit;
  fit.a2 = sxy / sxx;
  fit.a1 = std::exp(mean_y - fit.a2 * mean_x);

  for (const auto& [t, y] : points) {
    const double r = std::log(y) - (std::log(fit.a1) + fit.a2 * std::log(t));
    fit.residual_sum_squares += r * r;
  }
  const int dof = static_cast<int>(points.size()) - 2;
  const double sigma2 = dof > 0 ? fit.residual_sum_squares / dof : 0.0;
  const double se = std::sqrt(sigma2 / sxx);
  const double half_width = t_quantile_975(dof) * se;
  fit.a2_ci_low = fit.a2 - half_width;
  fit.a2_ci_high = fit.a2 + half_width;
  return fit;
}

BreakEvenExtrapolation break_even_extrapolation(const std::vector<ResourceReport>& reports,
                                                ExtrapolationMode mode,
                                                const std::vector<double>& projection_ns) {
  if (reports.size() < 3) {
    throw std::invalid_argument("break_even_extrapolation: need at least 3 reports");
  }
  std::vector<std::pair<double, double>> wall_points;
  std::vector<std::pair<double, double>> gate_points;
  for (const auto& r : reports) {
    wall_points.push_back({static_cast<double>(r.n), r.classical_wall_seconds});
    gate_points.push_back({static_cast<double>(r.n), r.total_gates});
  }

  BreakEvenExtrapolation result;
  if (mode == ExtrapolationMode::free_fit) {
    result.classical_seconds = fit_power_law(wall_points);
    result.total_gates = fit_power_law(gate_points);
  } else {
    // Exponents pinned by the per-iteration cost model: dense classical
    // iterations cost n^3, quantum diagonal estimation n^1.5.
    auto prefactor_fit = [](const std::vector<std::pair<double, double>>& pts,
                            double exponent) {
      double sum = 0.0;
      for (const auto& [t, y] : pts) {
        if (!(t > 0.0) || !(y > 0.0)) {
          throw std::invalid_argument("break_even_extrapolation: coordinates must be positive");
        }
        sum += std::log(y) - exponent * std::log(t);
      }
      PowerLawFit fit;
      fit.a2 = exponent;
      fit.a1 = std::exp(sum / static_cast<double>(pts.size()));
      for (const auto& [t, y] : pts) {
        const double r = std::log(y) - (std::log(fit.a1) + exponent * std::log(t));
        fit.residual_sum_squares += r * r;
      }
      fit.a2_ci_low = exponent;
      fit.a2_ci_high = exponent;
      return fit;
    };
    result.classical_seconds = prefactor_fit(wall_points, 3.0);
    result.total_gates = prefactor_fit(gate_points, 1.5);
  }

  result.break_even.a1 = result.classical_seconds.a1 / result.total_gates.a1;
  result.break_even.a2 = result.classical_seconds.a2 - result.total_gates.a2;
  result.break_even.a2_ci_low =
      result.classical_seconds.a2_ci_low - result.total_gates.a2_ci_high;
  result.break_even.a2_ci_high =
      result.classical_seconds.a2_ci_high - result.total_gates.a2_ci_low;

  for (double n : projection_ns) {
    BreakEvenProjection p;
    p.n = n;
    p.classical_seconds =
        result.classical_seconds.a1 * std::pow(n, result.classical_seconds.a2);
    p.total_gates = result.total_gates.a1 * std::pow(n, result.total_gates.a2);
    p.break_even_seconds = p.classical_seconds / p.total_gates;
    result.projection.push_back(p);
  }
  return result;
}

void write_projection_csv(const BreakEvenExtrapolation& extrapolation,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_projection_csv: cannot open " + path);
  out << "n,classical_seconds_fit,total_gates_fit,break_even_seconds\n";
  char buf[200];
  for (const auto& p : extrapolation.projection) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", p.n,
                  p.classical_seconds, p.total_gates, p.break_even_seconds);
    out << buf;
  }
}

}  // namespace hu
