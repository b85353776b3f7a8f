// Copyright 2026 The sgrec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

#include "sgrec/errors.hpp"

namespace sgrec {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

/// Largest qubit count for which dense 2^N x 2^N operators are materialized.
inline constexpr int kMaxDenseQubits = 12;

inline std::size_t dimension_for(int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxDenseQubits) {
    throw DimensionError("qubit count " + std::to_string(n_qubits) +
                         " outside dense range [1, " + std::to_string(kMaxDenseQubits) + "]");
  }
  return std::size_t{1} << n_qubits;
}

/// Density matrix of an N-qubit register. Site 0 is the most significant bit
/// of the basis-state index.
class DensityState {
 public:
  DensityState() = default;

  /// |index><index| for a computational basis state.
  static DensityState basis(int n_qubits, std::size_t index) {
    const auto dim = dimension_for(n_qubits);
    if (index >= dim) throw DimensionError("basis index out of range");
    DensityState s;
    s.n_qubits_ = n_qubits;
    s.rho_ = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    s.rho_(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = 1.0;
    return s;
  }

  /// |psi><psi| after normalizing psi.
  static DensityState pure(const StateVector& psi) {
    const int n = qubits_for(psi.size());
    const double norm = psi.norm();
    if (!(norm > 0.0)) throw InvalidArgument("cannot build a density state from a zero vector");
    const StateVector v = psi / norm;
    DensityState s;
    s.n_qubits_ = n;
    s.rho_ = v * v.adjoint();
    return s;
  }

  /// Wraps an explicit matrix; the caller is responsible for its validity.
  static DensityState from_matrix(ComplexMatrix rho) {
    if (rho.rows() != rho.cols()) throw DimensionError("density matrix must be square");
    DensityState s;
    s.n_qubits_ = qubits_for(rho.rows());
    s.rho_ = std::move(rho);
    return s;
  }

  int n_qubits() const noexcept { return n_qubits_; }
  Eigen::Index dim() const noexcept { return rho_.rows(); }
  const ComplexMatrix& matrix() const noexcept { return rho_; }
  ComplexMatrix& matrix() noexcept { return rho_; }

  Complex trace() const { return rho_.trace(); }
  double purity() const { return (rho_ * rho_).trace().real(); }
  double hermiticity_error() const { return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff(); }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  /// Hermitian, unit trace and positive semidefinite, each to `tol`.
  bool is_valid(double tol = 1e-10) const {
    return rho_.size() > 0 && hermiticity_error() < tol && std::abs(trace() - 1.0) < tol &&
           min_eigenvalue() > -tol;
  }

 private:
  static int qubits_for(Eigen::Index dim) {
    int n = 0;
    while ((Eigen::Index{1} << n) < dim) ++n;
    if ((Eigen::Index{1} << n) != dim || n < 1) {
      throw DimensionError("dimension " + std::to_string(dim) + " is not a power of two");
    }
    dimension_for(n);
    return n;
  }

  int n_qubits_ = 0;
  ComplexMatrix rho_;
};

}  // namespace sgrec
