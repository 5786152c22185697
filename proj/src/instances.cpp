#include "hu/instances.hpp"

#include <algorithm>
#include <bit>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "hu/rng.hpp"

namespace hu {

SymMatrix CostMatrix::to_dense() const {
  SymMatrix d(n);
  for (const auto& e : entries) {
    d.set(e.row, e.col, e.value);
  }
  return d;
}

double CostMatrix::quadratic_form(const Eigen::VectorXd& x) const {
  if (x.size() != n) {
    throw std::invalid_argument("quadratic_form: vector length mismatch");
  }
  double sum = 0.0;
  for (const auto& e : entries) {
    const double term = e.value * x(e.row) * x(e.col);
    sum += (e.row == e.col) ? term : 2.0 * term;
  }
  return sum;
}

std::vector<int> CostMatrix::column_counts() const {
  std::vector<int> counts(static_cast<std::size_t>(n), 0);
  for (const auto& e : entries) {
    counts[static_cast<std::size_t>(e.col)]++;
    if (e.row != e.col) counts[static_cast<std::size_t>(e.row)]++;
  }
  return counts;
}

double CostMatrix::computed_operator_norm() const {
  return operator_norm(to_dense());
}

void CostMatrix::normalize() {
  const double norm = computed_operator_norm();
  if (norm == 0.0) {
    throw std::invalid_argument("normalize: zero matrix cannot be normalized");
  }
  if (std::abs(norm - 1.0) < 1e-12) return;
  for (auto& e : entries) e.value /= norm;
}

namespace {

// One round of a randomized bipartite perfect matching (Kuhn's algorithm
// with shuffled adjacency) on the positions not yet used by `pattern`.
// Rows and columns index [0, half); pattern[i] holds the columns already
// assigned to row i. Succeeds for every round k < half by Hall's theorem,
// since the free graph is (half - k)-regular.
std::vector<Eigen::Index> matching_round(
    Eigen::Index half, const std::vector<std::set<Eigen::Index>>& pattern,
    Rng& rng) {
  std::vector<std::vector<Eigen::Index>> adjacency(
      static_cast<std::size_t>(half));
  for (Eigen::Index i = 0; i < half; ++i) {
    auto& free_cols = adjacency[static_cast<std::size_t>(i)];
    const auto& used = pattern[static_cast<std::size_t>(i)];
    free_cols.reserve(static_cast<std::size_t>(half) - used.size());
    for (Eigen::Index j = 0; j < half; ++j) {
      if (!used.contains(j)) free_cols.push_back(j);
    }
    rng.shuffle(free_cols.begin(), free_cols.end());
  }

  std::vector<Eigen::Index> col_to_row(static_cast<std::size_t>(half), -1);
  std::vector<char> visited(static_cast<std::size_t>(half), 0);

  // Depth-first augmenting path from `row`.
  auto augment = [&](auto&& self, Eigen::Index row) -> bool {
    for (Eigen::Index col : adjacency[static_cast<std::size_t>(row)]) {
      if (visited[static_cast<std::size_t>(col)]) continue;
      visited[static_cast<std::size_t>(col)] = 1;
      if (col_to_row[static_cast<std::size_t>(col)] < 0 ||
          self(self, col_to_row[static_cast<std::size_t>(col)])) {
        col_to_row[static_cast<std::size_t>(col)] = row;
        return true;
      }
    }
    return false;
  };

  std::vector<Eigen::Index> row_order(static_cast<std::size_t>(half));
  for (Eigen::Index i = 0; i < half; ++i) row_order[static_cast<std::size_t>(i)] = i;
  rng.shuffle(row_order.begin(), row_order.end());

  for (Eigen::Index row : row_order) {
    std::fill(visited.begin(), visited.end(), 0);
    if (!augment(augment, row)) {
      throw std::runtime_error("matching_round: no augmenting path (unreachable)");
    }
  }

  std::vector<Eigen::Index> row_to_col(static_cast<std::size_t>(half), -1);
  for (Eigen::Index col = 0; col < half; ++col) {
    row_to_col[static_cast<std::size_t>(col_to_row[static_cast<std::size_t>(col)])] = col;
  }
  return row_to_col;
}

CostMatrix generate_block_instance(const InstanceSeedSpec& spec, Rng& rng,
                                   double* prenorm) {
  const Eigen::Index half = spec.n / 2;

  // s superposed perfect matchings give a pattern with exactly s nonzeros
  // in every row and column of B.
  std::vector<std::set<Eigen::Index>> pattern(static_cast<std::size_t>(half));
  for (int round = 0; round < spec.s; ++round) {
    const auto row_to_col = matching_round(half, pattern, rng);
    for (Eigen::Index i = 0; i < half; ++i) {
      pattern[static_cast<std::size_t>(i)].insert(row_to_col[static_cast<std::size_t>(i)]);
    }
  }

  // Values are drawn in canonical (column-major, row-ascending) order so
  // the draw sequence does not depend on how the pattern was found.
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(half, half);
  for (Eigen::Index j = 0; j < half; ++j) {
    for (Eigen::Index i = 0; i < half; ++i) {
      if (pattern[static_cast<std::size_t>(i)].contains(j)) {
        b(i, j) = rng.gaussian();
      }
    }
  }

  const double sigma = Eigen::BDCSVD<Eigen::MatrixXd>(b).singularValues()(0);
  if (sigma <= 0.0) {
    throw std::runtime_error("generate_instance: degenerate block norm");
  }
  if (prenorm != nullptr) *prenorm = sigma;

  CostMatrix c;
  c.n = spec.n;
  c.sparsity = spec.s;
  c.block_form = true;
  c.entries.reserve(static_cast<std::size_t>(half) * static_cast<std::size_t>(spec.s));
  for (Eigen::Index j = 0; j < half; ++j) {
    for (Eigen::Index i = 0; i < half; ++i) {
      if (b(i, j) != 0.0) {
        c.entries.push_back({i, half + j, b(i, j) / sigma});
      }
    }
  }
  std::sort(c.entries.begin(), c.entries.end(), [](const auto& a, const auto& b2) {
    return a.row != b2.row ? a.row < b2.row : a.col < b2.col;
  });
  return c;
}

CostMatrix generate_plain_instance(const InstanceSeedSpec& spec, Rng& rng,
                                   double* prenorm) {
  std::set<std::pair<Eigen::Index, Eigen::Index>> positions;
  for (Eigen::Index j = 0; j < spec.n; ++j) {
    for (int k = 0; k < spec.s; ++k) {
      Eigen::Index i;
      do {
        i = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(spec.n)));
      } while (i == j);
      positions.insert({std::min(i, j), std::max(i, j)});
    }
  }
  CostMatrix c;
  c.n = spec.n;
  c.block_form = false;
  for (const auto& [i, j] : positions) {
    c.entries.push_back({i, j, rng.gaussian()});
  }
  if (prenorm != nullptr) *prenorm = c.computed_operator_norm();
  c.normalize();
  int max_count = 0;
  for (int count : c.column_counts()) max_count = std::max(max_count, count);
  c.sparsity = max_count;
  return c;
}

}  // namespace

CostMatrix generate_instance(const InstanceSeedSpec& spec, InstanceMetadata* meta) {
  if (spec.n < 2) {
    throw std::invalid_argument("generate_instance: n must be at least 2");
  }
  if (spec.s < 1) {
    throw std::invalid_argument("generate_instance: s must be positive");
  }
  if (spec.block_form && spec.n % 2 != 0) {
    throw std::invalid_argument("generate_instance: block form requires even n");
  }
  if (spec.block_form && spec.s > spec.n / 2) {
    throw std::invalid_argument("generate_instance: block form requires s <= n/2");
  }
  if (!spec.block_form && spec.s > spec.n - 1) {
    throw std::invalid_argument("generate_instance: s exceeds column capacity");
  }

  Rng rng = Rng::stream(spec.rng_seed, Rng::kInstanceStream);
  double prenorm = 1.0;
  CostMatrix c = spec.block_form ? generate_block_instance(spec, rng, &prenorm)
                                 : generate_plain_instance(spec, rng, &prenorm);
  if (meta != nullptr) {
    meta->n = spec.n;
    meta->s = c.sparsity;
    meta->seed = spec.rng_seed;
    meta->block_form = spec.block_form;
    meta->prenormalization_norm = prenorm;
    meta->sparsity_convention =
        spec.block_form ? "s-regular-bipartite" : "per-column-independent";
  }
  return c;
}

void store_matrix(const CostMatrix& c, const std::string& path) {
  if (c.n < 1) {
    throw std::invalid_argument("store_matrix: empty matrix");
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("store_matrix: cannot open " + path);
  }
  out << "%%sym-coord " << c.n << " " << c.entries.size() << "\n";
  char buf[64];
  for (const auto& e : c.entries) {
    std::snprintf(buf, sizeof buf, "%" PRIdMAX " %" PRIdMAX " %.17g\n",
                  static_cast<std::intmax_t>(e.row + 1),
                  static_cast<std::intmax_t>(e.col + 1), e.value);
    out << buf;
  }
  if (!out) {
    throw std::runtime_error("store_matrix: write failed for " + path);
  }
}

CostMatrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_matrix: cannot open " + path);
  }
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string magic;
  Eigen::Index n = 0;
  std::size_t nnz = 0;
  if (!(hs >> magic >> n >> nnz) || magic != "%%sym-coord") {
    throw std::runtime_error("load_matrix: bad header in " + path);
  }
  if (n < 1) {
    throw std::runtime_error("load_matrix: empty matrix in " + path);
  }

  CostMatrix c;
  c.n = n;
  c.entries.reserve(nnz);
  std::set<std::pair<Eigen::Index, Eigen::Index>> seen;
  std::string line;
  for (std::size_t k = 0; k < nnz; ++k) {
    if (!std::getline(in, line)) {
      throw std::runtime_error("load_matrix: truncated file " + path);
    }
    std::istringstream ls(line);
    Eigen::Index i = 0, j = 0;
    double v = 0.0;
    std::string extra;
    if (!(ls >> i >> j >> v) || (ls >> extra)) {
      throw std::runtime_error("load_matrix: malformed line '" + line + "'");
    }
    if (i < 1 || j < 1 || i > n || j > n) {
      throw std::runtime_error("load_matrix: index out of range in '" + line + "'");
    }
    if (i > j) {
      throw std::runtime_error(
          "load_matrix: lower-triangle entry breaks the symmetric format: '" + line + "'");
    }
    if (!std::isfinite(v)) {
      throw std::runtime_error("load_matrix: non-finite value in '" + line + "'");
    }
    if (!seen.insert({i, j}).second) {
      throw std::runtime_error("load_matrix: duplicate entry in '" + line + "'");
    }
    c.entries.push_back({i - 1, j - 1, v});
  }

  // Infer structure not carried by the coordinate format itself.
  const Eigen::Index half = n / 2;
  c.block_form = n % 2 == 0 && !c.entries.empty();
  for (const auto& e : c.entries) {
    if (!(e.row < half && e.col >= half)) {
      c.block_form = false;
      break;
    }
  }
  int max_count = 0;
  for (int count : c.column_counts()) max_count = std::max(max_count, count);
  c.sparsity = max_count;
  return c;
}

void store_instance_metadata(const InstanceMetadata& meta, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("store_instance_metadata: cannot open " + path);
  }
  out << "n = " << meta.n << "\n";
  out << "s = " << meta.s << "\n";
  out << "seed = " << meta.seed << "\n";
  out << "block_form = " << (meta.block_form ? "true" : "false") << "\n";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", meta.prenormalization_norm);
  out << "norm = " << buf << "\n";
  out << "sparsity_convention = " << meta.sparsity_convention << "\n";
}

InstanceMetadata load_instance_metadata(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_instance_metadata: cannot open " + path);
  }
  InstanceMetadata meta;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    auto trim = [](std::string& s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t") + 1);
    };
    trim(key);
    trim(value);
    if (key == "n") meta.n = std::stoll(value);
    else if (key == "s") meta.s = std::stoi(value);
    else if (key == "seed") meta.seed = std::stoull(value);
    else if (key == "block_form") meta.block_form = value == "true";
    else if (key == "norm") meta.prenormalization_norm = std::stod(value);
    else if (key == "sparsity_convention") meta.sparsity_convention = value;
  }
  return meta;
}

void validate(const CostMatrix& c, bool check_norm) {
  if (c.n < 1) throw std::invalid_argument("CostMatrix: n must be >= 1");
  const Eigen::Index half = c.n / 2;
  for (const auto& e : c.entries) {
    if (e.row > e.col || e.row < 0 || e.col >= c.n) {
      throw std::invalid_argument("CostMatrix: entry outside the stored triangle");
    }
    if (!std::isfinite(e.value)) {
      throw std::invalid_argument("CostMatrix: non-finite entry");
    }
    if (c.block_form && !(e.row < half && e.col >= half)) {
      throw std::invalid_argument("CostMatrix: entry outside off-diagonal blocks");
    }
  }
  for (int count : c.column_counts()) {
    if (count > c.sparsity) {
      throw std::invalid_argument("CostMatrix: column nonzero count exceeds sparsity bound");
    }
  }
  if (check_norm) {
    const double norm = c.computed_operator_norm();
    if (std::abs(norm - 1.0) > 1e-9) {
      throw std::invalid_argument("CostMatrix: operator norm deviates from 1");
    }
  }
}

BruteForceResult brute_force_qubo(const CostMatrix& c) {
  if (c.n > 24) {
    throw std::invalid_argument("brute_force_qubo: refusing n > 24");
  }
  const Eigen::Index n = c.n;
  const Eigen::MatrixXd dense = c.to_dense().mat();

  // Gray-code walk over sign vectors with x(0) fixed to +1 (global sign
  // flip leaves the objective unchanged). Each step flips one coordinate
  // and updates the gradient vector g = C x in O(n).
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd g = dense * x;
  double value = x.dot(g);

  Eigen::VectorXd best_x = x;
  double best_value = value;

  const std::uint64_t steps = (n > 1) ? (1ULL << (n - 1)) : 1;
  for (std::uint64_t t = 1; t < steps; ++t) {
    const int k = 1 + std::countr_zero(t);  // coordinate in [1, n)
    const double old_xk = x(k);
    value += -4.0 * old_xk * (g(k) - dense(k, k) * old_xk);
    x(k) = -old_xk;
    g += dense.col(k) * (x(k) - old_xk);
    if (value > best_value) {
      best_value = value;
      best_x = x;
    }
  }
  return BruteForceResult{best_x, best_value};
}

}  // namespace hu
