#include "hu/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace hu {

Quartiles quartiles(std::vector<double> values) {
  if (values.empty()) {
    throw std::invalid_argument("quartiles: empty sample");
  }
  std::sort(values.begin(), values.end());
  auto at = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
  };
  return Quartiles{at(0.25), at(0.5), at(0.75)};
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

SolverConfig bench_config(double epsilon, double beta, DiagRule rule) {
  SolverConfig config;
  config.epsilon = epsilon;
  config.beta = beta;
  config.diag_rule = rule;
  return config;
}

namespace {
constexpr double kReferenceBeta = 0.45;
}

ReferenceRun reference_run(const CostMatrix& c, double epsilon_ref, double gap_ref) {
  SearchResult search =
      binary_search(c, bench_config(epsilon_ref, kReferenceBeta), gap_ref);
  if (search.aborted) {
    throw std::runtime_error("reference_run: reference search hit the iteration cap");
  }
  return ReferenceRun{search.gamma_lo, std::move(search.rho_star), std::move(search.h_star)};
}

std::vector<ComparisonRow> run_comparison_protocol(Eigen::Index n, int s, double epsilon,
                                                   double beta, int instances,
                                                   std::uint64_t seed0, int threads) {
  std::vector<ComparisonRow> rows(static_cast<std::size_t>(instances));
  parallel_for(instances, threads, [&](int k) {
    ComparisonRow row;
    row.seed = seed0 + static_cast<std::uint64_t>(k);
    const CostMatrix c = generate_instance({n, s, row.seed, true});
    row.gamma_ref = reference_run(c, epsilon / 10.0, epsilon / 10.0).gamma_ref;

    const SolverConfig config = bench_config(epsilon, beta);
    {
      HUResult run = hamiltonian_updates(c, row.gamma_ref, config);
      row.feasible_ok = run.status == HUStatus::feasible;
      row.feasible_iterations = run.ledger.iterations;
      row.feasible_matrix_exponentials = run.ledger.matrix_exponentials;
    }
    {
      HUResult run = hamiltonian_updates(c, row.gamma_ref + 0.02, config);
      row.infeasible_certified = run.status == HUStatus::infeasible;
      row.infeasible_iterations = run.ledger.iterations;
      row.infeasible_matrix_exponentials = run.ledger.matrix_exponentials;
    }
    {
      SearchResult search = binary_search(c, config, epsilon);
      row.search_iterations = search.total_iterations;
      row.search_matrix_exponentials = search.total_matrix_exponentials;
    }
    rows[static_cast<std::size_t>(k)] = std::move(row);
  });
  return rows;
}

std::vector<LadderRow> run_ladder_protocol(Eigen::Index n, int s, double epsilon,
                                           double beta_final, int instances,
                                           std::uint64_t seed0, int threads,
                                           const std::vector<double>& gamma_refs) {
  if (!gamma_refs.empty() && gamma_refs.size() != static_cast<std::size_t>(instances)) {
    throw std::invalid_argument("run_ladder_protocol: gamma_refs size mismatch");
  }
  std::vector<LadderRow> rows(static_cast<std::size_t>(instances));
  parallel_for(instances, threads, [&](int k) {
    LadderRow row;
    row.seed = seed0 + static_cast<std::uint64_t>(k);
    const CostMatrix c = generate_instance({n, s, row.seed, true});
    row.gamma_ref = gamma_refs.empty()
                        ? reference_run(c, epsilon / 10.0, epsilon / 10.0).gamma_ref
                        : gamma_refs[static_cast<std::size_t>(k)];

    row.l1_iterations =
        hamiltonian_updates(c, row.gamma_ref, bench_config(epsilon, 0.0, DiagRule::l1))
            .ledger.iterations;
    row.l2_iterations =
        hamiltonian_updates(c, row.gamma_ref, bench_config(epsilon, 0.0, DiagRule::l2))
            .ledger.iterations;
    row.momentum_iterations =
        hamiltonian_updates(c, row.gamma_ref,
                            bench_config(epsilon, beta_final, DiagRule::l2))
            .ledger.iterations;
    rows[static_cast<std::size_t>(k)] = std::move(row);
  });
  return rows;
}

double original_fixed_step_prediction(Eigen::Index n, double epsilon) {
  return 64.0 / (epsilon * epsilon) * std::log(static_cast<double>(n));
}

std::vector<EpsSweepRow> run_eps_sweep_protocol(const EpsSweepOptions& options) {
  if (options.epsilons.empty()) {
    throw std::invalid_argument("run_eps_sweep_protocol: no epsilon values");
  }
  const int total = options.instances * static_cast<int>(options.epsilons.size());
  std::vector<EpsSweepRow> rows(static_cast<std::size_t>(total));

  // One reference per instance, shared across the epsilon values.
  std::vector<double> reference_means(static_cast<std::size_t>(options.instances));
  parallel_for(options.instances, options.threads, [&](int k) {
    const std::uint64_t seed = options.seed0 + static_cast<std::uint64_t>(k);
    const CostMatrix c = generate_instance({options.n, options.s, seed, true});
    const ReferenceRun ref = reference_run(c, options.epsilon_ref, options.epsilon_ref);
    const RoundingReport report = randomized_round(
        ref.rho_ref, c, options.trials, seed, Rng::kReferenceRoundingStream);
    reference_means[static_cast<std::size_t>(k)] = report.mean_value;
  });

  parallel_for(total, options.threads, [&](int idx) {
    const int k = idx / static_cast<int>(options.epsilons.size());
    const auto e = static_cast<std::size_t>(idx % static_cast<int>(options.epsilons.size()));
    EpsSweepRow row;
    row.seed = options.seed0 + static_cast<std::uint64_t>(k);
    row.epsilon = options.epsilons[e];
    const CostMatrix c = generate_instance({options.n, options.s, row.seed, true});

    SearchResult search = binary_search(c, bench_config(row.epsilon, options.beta), row.epsilon);
    if (search.aborted) {
      throw std::runtime_error("run_eps_sweep_protocol: search hit the iteration cap");
    }
    row.search_iterations = search.total_iterations;
    row.search_matrix_exponentials = search.total_matrix_exponentials;
    row.gamma_lo = search.gamma_lo;
    row.diag_violation = diag_violation_l1(search.rho_star);

    const CorrectionReport correction = correct_solution(search.rho_star, row.epsilon);
    row.correction_trace_distance = correction.trace_distance;

    const RoundingReport rounding =
        randomized_round(search.rho_star, c, options.trials, row.seed, Rng::kRoundingStream);
    row.round_mean = rounding.mean_value;
    row.round_best = rounding.best_value;
    row.round_batch_max_mean = rounding.batch_max_mean;
    row.reference_round_mean = reference_means[static_cast<std::size_t>(k)];
    row.nu_mean = (row.reference_round_mean - row.round_mean) / static_cast<double>(options.n);

    rows[static_cast<std::size_t>(idx)] = std::move(row);
  });
  return rows;
}

std::vector<BetaSweepRow> run_beta_sweep_protocol(Eigen::Index n, int s, double epsilon,
                                                  const std::vector<double>& betas,
                                                  int instances, std::uint64_t seed0,
                                                  int threads) {
  std::vector<double> gamma_refs(static_cast<std::size_t>(instances));
  parallel_for(instances, threads, [&](int k) {
    const CostMatrix c =
        generate_instance({n, s, seed0 + static_cast<std::uint64_t>(k), true});
    gamma_refs[static_cast<std::size_t>(k)] =
        reference_run(c, epsilon / 10.0, epsilon / 10.0).gamma_ref;
  });

  std::vector<BetaSweepRow> rows;
  for (DiagRule rule : {DiagRule::l1, DiagRule::l2}) {
    for (double beta : betas) {
      std::vector<double> iterations(static_cast<std::size_t>(instances));
      parallel_for(instances, threads, [&](int k) {
        const CostMatrix c =
            generate_instance({n, s, seed0 + static_cast<std::uint64_t>(k), true});
        iterations[static_cast<std::size_t>(k)] = static_cast<double>(
            hamiltonian_updates(c, gamma_refs[static_cast<std::size_t>(k)],
                                bench_config(epsilon, beta, rule))
                .ledger.iterations);
      });
      rows.push_back({beta, rule, quartiles(iterations)});
    }
  }
  return rows;
}

std::vector<ResourceReport> run_resource_protocol(const std::vector<Eigen::Index>& ns,
                                                  int s, double epsilon, double beta,
                                                  std::uint64_t seed0, int bits,
                                                  int threads) {
  std::vector<ResourceReport> reports(ns.size());
  parallel_for(static_cast<int>(ns.size()), threads, [&](int k) {
    const Eigen::Index n = ns[static_cast<std::size_t>(k)];
    const CostMatrix c =
        generate_instance({n, s, seed0 + static_cast<std::uint64_t>(k), true});
    SearchResult search = binary_search(c, bench_config(epsilon, beta), epsilon);
    if (search.aborted) {
      throw std::runtime_error("run_resource_protocol: search hit the iteration cap");
    }
    // Charge the whole search: every probe's diagonal updates contribute
    // gate counts and every iteration contributes wall time.
    reports[static_cast<std::size_t>(k)] =
        iteration_resources(search.combined_ledger, n, s, epsilon, bits);
  });
  return reports;
}

namespace {

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start < text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    values.push_back(std::stod(text.substr(start, comma - start)));
    start = comma + 1;
  }
  return values;
}

}  // namespace

CampaignSpec parse_campaign_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("parse_campaign_file: cannot open " + path);
  }
  CampaignSpec spec;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("parse_campaign_file: line " + std::to_string(line_no) +
                               " is not key = value");
    }
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    auto trim = [](std::string& s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
    };
    trim(key);
    trim(value);
    try {
      if (key == "kind") spec.kind = value;
      else if (key == "n") spec.n = std::stoll(value);
      else if (key == "s") spec.s = std::stoi(value);
      else if (key == "epsilon") spec.epsilon = std::stod(value);
      else if (key == "beta") spec.beta = std::stod(value);
      else if (key == "instances") spec.instances = std::stoi(value);
      else if (key == "seed0") spec.seed0 = std::stoull(value);
      else if (key == "epsilons") spec.epsilons = parse_double_list(value);
      else if (key == "betas") spec.betas = parse_double_list(value);
      else if (key == "ns") {
        for (double v : parse_double_list(value)) {
          spec.ns.push_back(static_cast<Eigen::Index>(v));
        }
      } else if (key == "trials") spec.trials = std::stoull(value);
      else if (key == "epsilon_ref") spec.epsilon_ref = std::stod(value);
      else if (key == "bits") spec.bits = std::stoi(value);
      else if (key == "threads") spec.threads = std::stoi(value);
      else {
        throw std::runtime_error("unknown key '" + key + "'");
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("parse_campaign_file: line " + std::to_string(line_no) +
                               ": " + e.what());
    }
  }
  if (spec.kind.empty()) {
    throw std::runtime_error("parse_campaign_file: missing kind");
  }
  return spec;
}

namespace {

void write_comparison_outputs(const std::vector<ComparisonRow>& rows,
                              Eigen::Index n, double epsilon,
                              const std::string& out_dir,
                              std::vector<std::string>& written) {
  {
    std::ofstream out(out_dir + "/comparison.csv");
    out << "seed,gamma_ref,feasible_iterations,feasible_matrix_exponentials,feasible_ok,"
           "infeasible_iterations,infeasible_matrix_exponentials,infeasible_certified,"
           "search_iterations,search_matrix_exponentials\n";
    for (const auto& r : rows) {
      char buf[320];
      std::snprintf(buf, sizeof buf,
                    "%" PRIu64 ",%.17g,%" PRIu64 ",%" PRIu64 ",%d,%" PRIu64 ",%" PRIu64
                    ",%d,%" PRIu64 ",%" PRIu64 "\n",
                    r.seed, r.gamma_ref, r.feasible_iterations,
                    r.feasible_matrix_exponentials, r.feasible_ok ? 1 : 0,
                    r.infeasible_iterations, r.infeasible_matrix_exponentials,
                    r.infeasible_certified ? 1 : 0, r.search_iterations,
                    r.search_matrix_exponentials);
      out << buf;
    }
    written.push_back("comparison.csv");
  }
  {
    auto collect = [&](auto getter) {
      std::vector<double> v;
      for (const auto& r : rows) v.push_back(static_cast<double>(getter(r)));
      return quartiles(v);
    };
    const Quartiles fi = collect([](const ComparisonRow& r) { return r.feasible_iterations; });
    const Quartiles fe = collect([](const ComparisonRow& r) { return r.feasible_matrix_exponentials; });
    const Quartiles ii = collect([](const ComparisonRow& r) { return r.infeasible_iterations; });
    const Quartiles ie = collect([](const ComparisonRow& r) { return r.infeasible_matrix_exponentials; });
    const Quartiles si = collect([](const ComparisonRow& r) { return r.search_iterations; });
    const Quartiles se = collect([](const ComparisonRow& r) { return r.search_matrix_exponentials; });
    std::ofstream out(out_dir + "/comparison_summary.kv");
    auto emit = [&](const char* key, const Quartiles& q) {
      out << key << "_q1 = " << q.q1 << "\n"
          << key << "_median = " << q.median << "\n"
          << key << "_q3 = " << q.q3 << "\n";
    };
    emit("feasible_iterations", fi);
    emit("feasible_matrix_exponentials", fe);
    emit("infeasible_iterations", ii);
    emit("infeasible_matrix_exponentials", ie);
    emit("search_iterations", si);
    emit("search_matrix_exponentials", se);
    out << "original_fixed_step_prediction = "
        << original_fixed_step_prediction(n, epsilon) << "\n";
    written.push_back("comparison_summary.kv");
  }
}

}  // namespace

std::vector<std::string> run_campaign(const CampaignSpec& spec, const std::string& out_dir) {
  std::vector<std::string> written;
  if (spec.kind == "comparison" || spec.kind == "smoke") {
    const int instances = spec.kind == "smoke" ? std::min(spec.instances, 2) : spec.instances;
    const auto rows = run_comparison_protocol(spec.n, spec.s, spec.epsilon, spec.beta,
                                              instances, spec.seed0, spec.threads);
    write_comparison_outputs(rows, spec.n, spec.epsilon, out_dir, written);
  } else if (spec.kind == "ladder") {
    const auto rows = run_ladder_protocol(spec.n, spec.s, spec.epsilon, spec.beta,
                                          spec.instances, spec.seed0, spec.threads);
    std::ofstream out(out_dir + "/ladder.csv");
    out << "seed,gamma_ref,l1_iterations,l2_iterations,momentum_iterations\n";
    for (const auto& r : rows) {
      char buf[200];
      std::snprintf(buf, sizeof buf, "%" PRIu64 ",%.17g,%" PRIu64 ",%" PRIu64 ",%" PRIu64 "\n",
                    r.seed, r.gamma_ref, r.l1_iterations, r.l2_iterations,
                    r.momentum_iterations);
      out << buf;
    }
    written.push_back("ladder.csv");
  } else if (spec.kind == "eps_sweep") {
    EpsSweepOptions options;
    options.n = spec.n;
    options.s = spec.s;
    options.epsilons = spec.epsilons;
    options.instances = spec.instances;
    options.seed0 = spec.seed0;
    options.beta = spec.beta;
    options.trials = spec.trials;
    options.epsilon_ref = spec.epsilon_ref;
    options.threads = spec.threads;
    const auto rows = run_eps_sweep_protocol(options);
    {
      std::ofstream out(out_dir + "/eps_sweep.csv");
      out << "seed,epsilon,search_iterations,search_matrix_exponentials,gamma_lo,"
             "diag_violation,correction_trace_distance,round_mean,round_best,"
             "round_batch_max_mean,reference_round_mean,nu_mean\n";
      for (const auto& r : rows) {
        char buf[400];
        std::snprintf(buf, sizeof buf,
                      "%" PRIu64 ",%.17g,%" PRIu64 ",%" PRIu64 ",%.17g,%.17g,%.17g,"
                      "%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      r.seed, r.epsilon, r.search_iterations,
                      r.search_matrix_exponentials, r.gamma_lo, r.diag_violation,
                      r.correction_trace_distance, r.round_mean, r.round_best,
                      r.round_batch_max_mean, r.reference_round_mean, r.nu_mean);
        out << buf;
      }
      written.push_back("eps_sweep.csv");
    }
    {
      // Aggregate per epsilon and fit the iteration and nu power laws.
      std::vector<std::pair<double, double>> iter_points;
      std::vector<std::pair<double, double>> nu_points;
      for (double eps : spec.epsilons) {
        std::vector<double> iters;
        std::vector<double> nus;
        for (const auto& r : rows) {
          if (r.epsilon == eps) {
            iters.push_back(static_cast<double>(r.search_iterations));
            nus.push_back(r.nu_mean);
          }
        }
        iter_points.push_back({eps, quartiles(iters).median});
        const double nu_med = quartiles(nus).median;
        if (nu_med > 0.0) nu_points.push_back({eps, nu_med});
      }
      std::ofstream out(out_dir + "/eps_sweep_fits.kv");
      const PowerLawFit iter_fit = fit_power_law(iter_points);
      out << "iterations_prefactor = " << iter_fit.a1 << "\n";
      out << "iterations_exponent = " << iter_fit.a2 << "\n";
      out << "iterations_exponent_ci_low = " << iter_fit.a2_ci_low << "\n";
      out << "iterations_exponent_ci_high = " << iter_fit.a2_ci_high << "\n";
      if (nu_points.size() >= 3) {
        const PowerLawFit nu_fit = fit_power_law(nu_points);
        out << "nu_prefactor = " << nu_fit.a1 << "\n";
        out << "nu_exponent = " << nu_fit.a2 << "\n";
        out << "nu_exponent_ci_low = " << nu_fit.a2_ci_low << "\n";
        out << "nu_exponent_ci_high = " << nu_fit.a2_ci_high << "\n";
      }
      written.push_back("eps_sweep_fits.kv");
    }
  } else if (spec.kind == "beta_sweep") {
    const auto rows = run_beta_sweep_protocol(spec.n, spec.s, spec.epsilon, spec.betas,
                                              spec.instances, spec.seed0, spec.threads);
    std::ofstream out(out_dir + "/beta_sweep.csv");
    out << "beta,diag_rule,iterations_q1,iterations_median,iterations_q3\n";
    for (const auto& r : rows) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g,%.17g,%.17g\n", r.beta,
                    r.rule == DiagRule::l1 ? "l1" : "l2", r.iterations.q1,
                    r.iterations.median, r.iterations.q3);
      out << buf;
    }
    written.push_back("beta_sweep.csv");
  } else if (spec.kind == "resources") {
    const auto reports = run_resource_protocol(spec.ns, spec.s, spec.epsilon, spec.beta,
                                               spec.seed0, spec.bits, spec.threads);
    for (const auto& report : reports) {
      const std::string base = out_dir + "/resources_n" + std::to_string(report.n);
      write_resource_report(report, base + ".kv", base + "_rows.csv");
      written.push_back("resources_n" + std::to_string(report.n) + ".kv");
      written.push_back("resources_n" + std::to_string(report.n) + "_rows.csv");
    }
    if (reports.size() >= 3) {
      std::vector<double> projection_ns;
      for (const auto& r : reports) projection_ns.push_back(static_cast<double>(r.n));
      projection_ns.push_back(1e5);
      for (ExtrapolationMode mode :
           {ExtrapolationMode::theory_exponents, ExtrapolationMode::free_fit}) {
        const auto extrapolation = break_even_extrapolation(reports, mode, projection_ns);
        const std::string name = mode == ExtrapolationMode::theory_exponents
                                     ? "projection_theory.csv"
                                     : "projection_free.csv";
        write_projection_csv(extrapolation, out_dir + "/" + name);
        written.push_back(name);
      }
    }
  } else {
    throw std::invalid_argument("run_campaign: unknown kind '" + spec.kind + "'");
  }
  return written;
}

}  // namespace hu
