// Copyright 2026 The steerlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "steerlab/errors.hpp"

namespace steerlab {

using cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::Vector3d;

/// Dense complex Hermitian matrix.
///
/// The stored matrix is always exactly Hermitian: the constructor replaces
/// its argument M by (M + M^*)/2.  Instances are immutable values.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  explicit HermitianOperator(const MatrixXcd& m);

  static HermitianOperator identity(int dim);
  static HermitianOperator zero(int dim);
  /// |psi><psi| for a (not necessarily normalized) vector.
  static HermitianOperator projector(const Eigen::VectorXcd& psi);

  int dim() const { return static_cast<int>(m_.rows()); }
  const MatrixXcd& matrix() const { return m_; }
  cplx operator()(int r, int c) const { return m_(r, c); }

  double trace() const { return m_.trace().real(); }
  /// Re Tr(this * other); exact real inner product on Hermitian matrices.
  double inner(const HermitianOperator& other) const;
  double norm() const { return m_.norm(); }

  HermitianOperator operator+(const HermitianOperator& o) const;
  HermitianOperator operator-(const HermitianOperator& o) const;
  HermitianOperator operator*(double s) const;
  HermitianOperator operator-() const { return *this * -1.0; }
  HermitianOperator& operator+=(const HermitianOperator& o);

  /// U * this * U^*.
  HermitianOperator conjugated(const MatrixXcd& u) const;
  HermitianOperator transposed() const;

 private:
  MatrixXcd m_;
};

inline HermitianOperator operator*(double s, const HermitianOperator& h) { return h * s; }

/// Real Bloch parametrization M = alpha * 1 + v . sigma of a 2x2 Hermitian matrix.
struct BlochVector {
  double alpha = 0.0;
  Vector3d v = Vector3d::Zero();
};

// Pauli matrices.
const MatrixXcd& pauli_x();
const MatrixXcd& pauli_y();
const MatrixXcd& pauli_z();

/// Kronecker product a (x) b.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> kron(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Partial trace over the first tensor factor of an operator on C^da (x) C^db.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> trace_out_first(
    const Eigen::MatrixBase<Derived>& op, int da, int db) {
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
      Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(db, db);
  for (int i = 0; i < da; ++i) out += op.block(i * db, i * db, db, db);
  return out;
}

/// Partial trace over the second tensor factor.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> trace_out_second(
    const Eigen::MatrixBase<Derived>& op, int da, int db) {
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(da, da);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < da; ++j) out(i, j) = op.block(i * db, j * db, db, db).trace();
  return out;
}

HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b);

/// Tr_A of an operator on C^dim_a (x) C^dim_b.  Throws InvalidDimension.
HermitianOperator partial_trace_first(const HermitianOperator& op, int dim_a, int dim_b);
/// Tr_B of an operator on C^dim_a (x) C^dim_b.  Throws InvalidDimension.
HermitianOperator partial_trace_second(const HermitianOperator& op, int dim_a, int dim_b);

Eigen::VectorXd eigenvalues(const HermitianOperator& op);
double min_eigenvalue(const HermitianOperator& op);
double max_eigenvalue(const HermitianOperator& op);
bool is_psd(const HermitianOperator& op, double tol);

HermitianOperator bloch_to_operator(const BlochVector& b);
/// Inverse of bloch_to_operator; throws InvalidDimension unless op is 2x2.
BlochVector operator_to_bloch(const HermitianOperator& op);

/// Depolarizing map A -> eta A + (1 - eta) Tr(A) 1/d.
HermitianOperator depolarize(const HermitianOperator& a, double eta);

/// Orthonormal basis of the real vector space of dim x dim Hermitian matrices
/// with respect to Re Tr(AB): diagonal units, symmetric and antisymmetric pairs.
std::vector<HermitianOperator> hermitian_basis(int dim);

/// SU(2) matrix acting on Bloch vectors as the rotation r (det r = +1).
MatrixXcd rotation_unitary(const Eigen::Matrix3d& r);

}  // namespace steerlab
