#pragma once

#include <Eigen/Dense>

namespace hu {

/// Dense real symmetric matrix. Storage enforces exact (bitwise) symmetry:
/// every mutation writes both triangles, and all arithmetic is entrywise so
/// symmetry survives floating-point evaluation exactly.
class SymMatrix {
 public:
  explicit SymMatrix(Eigen::Index n) : m_(Eigen::MatrixXd::Zero(n, n)) {}

  static SymMatrix identity(Eigen::Index n) {
    SymMatrix s(n);
    s.m_.setIdentity();
    return s;
  }

  /// Adopts a matrix that is already exactly symmetric; throws otherwise.
  static SymMatrix from_symmetric(Eigen::MatrixXd m);

  /// Adopts (m + m^T)/2, which is exactly symmetric by construction.
  static SymMatrix symmetrized(const Eigen::MatrixXd& m) {
    return SymMatrix(Eigen::MatrixXd(0.5 * (m + m.transpose())), Exact{});
  }

  /// Mirrors the lower triangle (including diagonal) onto the upper one.
  static SymMatrix from_lower(const Eigen::MatrixXd& m) {
    Eigen::MatrixXd full = m.selfadjointView<Eigen::Lower>();
    return SymMatrix(std::move(full), Exact{});
  }

  Eigen::Index dim() const { return m_.rows(); }

  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  /// Writes both (i, j) and (j, i).
  void set(Eigen::Index i, Eigen::Index j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }

  const Eigen::MatrixXd& mat() const { return m_; }
  Eigen::VectorXd diagonal() const { return m_.diagonal(); }

  SymMatrix& operator+=(const SymMatrix& o) {
    m_ += o.m_;
    return *this;
  }
  SymMatrix& operator-=(const SymMatrix& o) {
    m_ -= o.m_;
    return *this;
  }
  SymMatrix& operator*=(double t) {
    m_ *= t;
    return *this;
  }
  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(double t, SymMatrix a) { return a *= t; }
  friend SymMatrix operator*(SymMatrix a, double t) { return a *= t; }

  void add_to_diagonal(double c) { m_.diagonal().array() += c; }

 private:
  struct Exact {};
  SymMatrix(Eigen::MatrixXd m, Exact) : m_(std::move(m)) {}
  Eigen::MatrixXd m_;
};

struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // columns, orthonormal
};

/// Full eigendecomposition of a symmetric matrix. Rejects non-finite input;
/// reports solver convergence failures as std::runtime_error.
EigenDecomposition eigh(const SymMatrix& a);

struct GibbsState {
  SymMatrix rho;       // exp(-H) / tr(exp(-H)), psd, unit trace
  double free_energy;  // -ln tr(exp(-H))
};

/// Gibbs state and free energy of a Hamiltonian. The exponential is taken
/// after subtracting the minimum eigenvalue so that large ||H|| cannot
/// underflow the trace; the shift is restored in the reported free energy.
GibbsState gibbs_state(const SymMatrix& hamiltonian);

/// Symmetric psd square root via functional calculus. Eigenvalues slightly
/// below zero (numerical noise) are clamped; genuinely negative spectra are
/// rejected.
SymMatrix psd_sqrt(const SymMatrix& rho);

/// tr(A B) = sum_ij A_ij B_ij for symmetric arguments.
double trace_product(const SymMatrix& a, const SymMatrix& b);

/// Schatten-1 norm: sum of absolute eigenvalues.
double trace_norm(const SymMatrix& a);

/// Schatten-infinity norm: largest absolute eigenvalue.
double operator_norm(const SymMatrix& a);

/// Largest absolute entry (the max norm).
double max_abs_entry(const SymMatrix& a);

}  // namespace hu
