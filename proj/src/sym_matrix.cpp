#include "hu/sym_matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace hu {

SymMatrix SymMatrix::from_symmetric(Eigen::MatrixXd m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("from_symmetric: matrix is not square");
  }
  if (m != m.transpose()) {
    throw std::invalid_argument("from_symmetric: matrix is not exactly symmetric");
  }
  return SymMatrix(std::move(m), Exact{});
}

EigenDecomposition eigh(const SymMatrix& a) {
  if (!a.mat().allFinite()) {
    throw std::invalid_argument("eigh: matrix has non-finite entries");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.mat());
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigh: eigendecomposition failed to converge");
  }
  return EigenDecomposition{solver.eigenvalues(), solver.eigenvectors()};
}

GibbsState gibbs_state(const SymMatrix& hamiltonian) {
  const auto decomp = eigh(hamiltonian);
  const Eigen::Index n = hamiltonian.dim();
  const double shift = decomp.eigenvalues(0);  // smallest eigenvalue

  Eigen::VectorXd weights = (-(decomp.eigenvalues.array() - shift)).exp();
  const double z = weights.sum();

  // rho = V diag(w/z) V^T, realised as a Gram matrix so the result is psd
  // and exactly symmetric after mirroring one triangle.
  Eigen::MatrixXd scaled =
      decomp.eigenvectors * (weights / z).cwiseSqrt().asDiagonal();
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(n, n);
  rho.selfadjointView<Eigen::Lower>().rankUpdate(scaled);

  return GibbsState{SymMatrix::from_lower(rho), shift - std::log(z)};
}

SymMatrix psd_sqrt(const SymMatrix& rho) {
  auto decomp = eigh(rho);
  const double norm = decomp.eigenvalues.cwiseAbs().maxCoeff();
  const double reject_below = -1e-8 * std::max(norm, 1e-300);
  if (decomp.eigenvalues(0) < reject_below) {
    throw std::invalid_argument("psd_sqrt: input is not positive semidefinite");
  }
  Eigen::VectorXd clamped = decomp.eigenvalues.cwiseMax(0.0);
  Eigen::MatrixXd scaled =
      decomp.eigenvectors * clamped.array().pow(0.25).matrix().asDiagonal();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(rho.dim(), rho.dim());
  s.selfadjointView<Eigen::Lower>().rankUpdate(scaled);
  return SymMatrix::from_lower(s);
}

double trace_product(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("trace_product: dimension mismatch");
  }
  return (a.mat().array() * b.mat().array()).sum();
}

double trace_norm(const SymMatrix& a) {
  return eigh(a).eigenvalues.cwiseAbs().sum();
}

double operator_norm(const SymMatrix& a) {
  return eigh(a).eigenvalues.cwiseAbs().maxCoeff();
}

double max_abs_entry(const SymMatrix& a) {
  return a.mat().cwiseAbs().maxCoeff();
}

}  // namespace hu
