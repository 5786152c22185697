#include "hu/rounding.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace hu {

CorrectionReport correct_solution(const SymMatrix& rho, double epsilon) {
  if (epsilon < 0.0) {
    throw std::invalid_argument("correct_solution: epsilon must be nonnegative");
  }
  const Eigen::Index n = rho.dim();
  const double inv_n = 1.0 / static_cast<double>(n);
  const Eigen::VectorXd deviations = rho.diagonal().array() - inv_n;
  const double violation = deviations.cwiseAbs().sum();
  if (violation > epsilon) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "correct_solution: diagonal violation %.6g exceeds epsilon %.6g",
                  violation, epsilon);
    throw std::invalid_argument(msg);
  }

  CorrectionReport report;
  report.xi = std::cbrt(epsilon);
  const double threshold = report.xi * inv_n;

  Eigen::MatrixXd work = rho.mat();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(deviations(i)) > threshold) {
      report.large_deviation_set.push_back(i);
      work.row(i).setZero();
      work.col(i).setZero();
      work(i, i) = inv_n;
    } else {
      work(i, i) += -deviations(i) + report.xi * inv_n;
    }
  }
  for (Eigen::Index i : report.large_deviation_set) {
    work(i, i) += report.xi * inv_n;
  }
  work /= 1.0 + report.xi;
  report.rho_sharp = SymMatrix::symmetrized(work);

  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(report.rho_sharp(i, i) - inv_n) > 1e-12) {
      throw std::logic_error("correct_solution: corrected diagonal is not uniform");
    }
  }
  const auto decomp = eigh(report.rho_sharp);
  if (decomp.eigenvalues(0) < -1e-10) {
    throw std::logic_error("correct_solution: corrected state lost positive semidefiniteness");
  }
  const double trace = report.rho_sharp.mat().trace();
  if (std::abs(trace - 1.0) > 1e-10) {
    throw std::logic_error("correct_solution: corrected state is not normalized");
  }

  report.trace_distance = trace_norm(report.rho_sharp - rho);
  return report;
}

RoundingReport randomized_round(const SymMatrix& rho, const CostMatrix& c,
                                std::uint64_t trials, std::uint64_t rng_seed,
                                std::uint64_t stream_id) {
  if (rho.dim() != c.n) {
    throw std::invalid_argument("randomized_round: dimension mismatch");
  }
  if (trials == 0) {
    throw std::invalid_argument("randomized_round: at least one trial required");
  }
  const Eigen::Index n = rho.dim();
  const SymMatrix root = psd_sqrt(rho);

  RoundingReport report;
  report.trials = trials;
  report.rng_seed = rng_seed;
  report.values.reserve(trials);
  report.best_value = -std::numeric_limits<double>::infinity();

  // Trials are processed in blocks so the projection sqrt(rho) * G is one
  // matrix product per block; column t of G always comes from substream t.
  constexpr std::uint64_t kBlock = 256;
  Eigen::MatrixXd gaussians(n, static_cast<Eigen::Index>(kBlock));
  Eigen::VectorXd x(n);
  for (std::uint64_t start = 0; start < trials; start += kBlock) {
    const auto count = static_cast<Eigen::Index>(std::min(kBlock, trials - start));
    for (Eigen::Index t = 0; t < count; ++t) {
      Rng rng = Rng::substream(rng_seed, stream_id, start + static_cast<std::uint64_t>(t));
      for (Eigen::Index i = 0; i < n; ++i) {
        gaussians(i, t) = rng.gaussian();
      }
    }
    const Eigen::MatrixXd projected = root.mat() * gaussians.leftCols(count);
    for (Eigen::Index t = 0; t < count; ++t) {
      for (Eigen::Index i = 0; i < n; ++i) {
        x(i) = projected(i, t) < 0.0 ? -1.0 : 1.0;
      }
      const double value = c.quadratic_form(x);
      report.values.push_back(value);
      if (value > report.best_value) {
        report.best_value = value;
        report.best_x = x;
      }
    }
  }

  report.mean_value = 0.0;
  for (double v : report.values) report.mean_value += v;
  report.mean_value /= static_cast<double>(trials);

  report.batch_size = trials >= 100000 ? 1000 : std::max<std::uint64_t>(1, trials / 100);
  const std::uint64_t usable = (trials / report.batch_size) * report.batch_size;
  if (usable == 0) {
    report.batch_max_mean = report.best_value;
  } else {
    std::vector<double> head(report.values.begin(),
                             report.values.begin() + static_cast<std::ptrdiff_t>(usable));
    report.batch_max_mean = batch_max_statistic(head, report.batch_size);
  }
  return report;
}

double batch_max_statistic(const std::vector<double>& values, std::size_t batch_size) {
  if (batch_size == 0 || values.size() % batch_size != 0) {
    throw std::invalid_argument("batch_max_statistic: value count not divisible by batch size");
  }
  const std::size_t batches = values.size() / batch_size;
  double sum = 0.0;
  for (std::size_t b = 0; b < batches; ++b) {
    double best = values[b * batch_size];
    for (std::size_t k = 1; k < batch_size; ++k) {
      best = std::max(best, values[b * batch_size + k]);
    }
    sum += best;
  }
  return sum / static_cast<double>(batches);
}

NuMetric nu_metric(const Eigen::VectorXd& x_eps, const Eigen::VectorXd& x_opt,
                   const CostMatrix& c, std::string x_opt_provenance) {
  if (x_eps.size() != c.n || x_opt.size() != c.n) {
    throw std::invalid_argument("nu_metric: vector length mismatch");
  }
  for (Eigen::Index i = 0; i < c.n; ++i) {
    if (std::abs(x_eps(i)) != 1.0 || std::abs(x_opt(i)) != 1.0) {
      throw std::invalid_argument("nu_metric: entries must be +-1");
    }
  }
  NuMetric metric;
  metric.nu = (c.quadratic_form(x_opt) - c.quadratic_form(x_eps)) /
              static_cast<double>(c.n);
  metric.x_opt_provenance = std::move(x_opt_provenance);
  return metric;
}

void write_rounding_report_csv(const RoundingReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_rounding_report_csv: cannot open " + path);
  }
  out << "trial,value\n";
  char buf[64];
  for (std::size_t t = 0; t < report.values.size(); ++t) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", t, report.values[t]);
    out << buf;
  }
}

void write_rounding_summary(const RoundingReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_rounding_summary: cannot open " + path);
  }
  char buf[96];
  out << "trials = " << report.trials << "\n";
  std::snprintf(buf, sizeof buf, "%.17g", report.mean_value);
  out << "mean = " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.17g", report.best_value);
  out << "best = " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.17g", report.batch_max_mean);
  out << "batch_max_mean = " << buf << "\n";
  out << "batch_size = " << report.batch_size << "\n";
  out << "seed = " << report.rng_seed << "\n";
}

}  // namespace hu
