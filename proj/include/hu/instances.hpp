#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hu/sym_matrix.hpp"

namespace hu {

/// Sparse symmetric cost matrix, normalized to unit operator norm.
/// Entries are stored once per unordered pair (row <= col); symmetry is
/// implied. Block-form matrices have all entries in the off-diagonal
/// blocks of a 2x2 block partition and a zero diagonal.
struct CostMatrix {
  struct Entry {
    Eigen::Index row = 0;  // row <= col
    Eigen::Index col = 0;
    double value = 0.0;
  };

  Eigen::Index n = 0;
  int sparsity = 0;  // bound on nonzeros per column (both triangles counted)
  bool block_form = false;
  std::vector<Entry> entries;

  SymMatrix to_dense() const;

  /// x^T C x for a full vector x (O(nnz)).
  double quadratic_form(const Eigen::VectorXd& x) const;

  /// Nonzero count of each column, mirrored entries included.
  std::vector<int> column_counts() const;

  /// Rescales all entries so the operator norm is 1. No-op when the norm
  /// is already 1 within 1e-12, which makes normalization idempotent.
  void normalize();

  double computed_operator_norm() const;
};

struct InstanceSeedSpec {
  Eigen::Index n = 0;
  int s = 0;
  std::uint64_t rng_seed = 0;
  bool block_form = true;
};

/// Deterministic random instance from a seed spec.
///
/// Block form: C = [[0, B], [B^T, 0]] where B is (n/2)x(n/2) with exactly
/// s nonzeros per column and per row (an s-regular bipartite pattern, so
/// every column of C also has exactly s nonzeros), values i.i.d. standard
/// normal, then scaled so ||C|| = 1.
///
/// Non-block form: s positions per column drawn independently on the
/// off-diagonal; the recorded sparsity bound is the measured maximum
/// column count, which may exceed s.
///
/// When meta is non-null it receives the generation record, including the
/// operator norm that was divided out.
struct InstanceMetadata;
CostMatrix generate_instance(const InstanceSeedSpec& spec, InstanceMetadata* meta = nullptr);

/// Sidecar describing how an instance was produced.
struct InstanceMetadata {
  Eigen::Index n = 0;
  int s = 0;
  std::uint64_t seed = 0;
  bool block_form = true;
  double prenormalization_norm = 1.0;
  std::string sparsity_convention = "s-regular-bipartite";
};

/// Coordinate text format: header `%%sym-coord n nnz`, then one
/// `i j value` triple per line (1-based, i <= j, round-trip-safe decimals).
void store_matrix(const CostMatrix& c, const std::string& path);
CostMatrix load_matrix(const std::string& path);

void store_instance_metadata(const InstanceMetadata& meta, const std::string& path);
InstanceMetadata load_instance_metadata(const std::string& path);

/// Throws std::invalid_argument describing the first violated invariant.
/// The operator-norm check costs a dense eigendecomposition; disable it
/// when validating in a hot loop.
void validate(const CostMatrix& c, bool check_norm = true);

struct BruteForceResult {
  Eigen::VectorXd x;   // entries in {-1, +1}, x(0) fixed to +1
  double value = 0.0;  // max of x^T C x
};

/// Exhaustive QUBO maximization over sign vectors; refuses n > 24.
BruteForceResult brute_force_qubo(const CostMatrix& c);

}  // namespace hu
