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

#include "steerlab/hermitian.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <string>

namespace steerlab {

HermitianOperator::HermitianOperator(const MatrixXcd& m) {
  if (m.rows() != m.cols())
    throw InvalidDimension("HermitianOperator: matrix is " + std::to_string(m.rows()) + "x" +
                           std::to_string(m.cols()));
  m_ = 0.5 * (m + m.adjoint());
}

HermitianOperator HermitianOperator::identity(int dim) {
  return HermitianOperator(MatrixXcd::Identity(dim, dim));
}

HermitianOperator HermitianOperator::zero(int dim) { return HermitianOperator(MatrixXcd::Zero(dim, dim)); }

HermitianOperator HermitianOperator::projector(const Eigen::VectorXcd& psi) {
  return HermitianOperator(psi * psi.adjoint());
}

double HermitianOperator::inner(const HermitianOperator& other) const {
  if (other.dim() != dim()) throw InvalidDimension("inner: dimension mismatch");
  // Re Tr(A B) = Re sum_ij A_ij B_ji = Re sum_ij A_ij conj(B_ij) for Hermitian B.
  return (m_.array() * other.m_.conjugate().array()).sum().real();
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& o) const {
  if (o.dim() != dim()) throw InvalidDimension("operator+: dimension mismatch");
  HermitianOperator r;
  r.m_ = m_ + o.m_;
  return r;
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& o) const {
  if (o.dim() != dim()) throw InvalidDimension("operator-: dimension mismatch");
  HermitianOperator r;
  r.m_ = m_ - o.m_;
  return r;
}

HermitianOperator HermitianOperator::operator*(double s) const {
  HermitianOperator r;
  r.m_ = s * m_;
  return r;
}

HermitianOperator& HermitianOperator::operator+=(const HermitianOperator& o) {
  if (m_.size() == 0) {
    m_ = o.m_;
    return *this;
  }
  if (o.dim() != dim()) throw InvalidDimension("operator+=: dimension mismatch");
  m_ += o.m_;
  return *this;
}

HermitianOperator HermitianOperator::conjugated(const MatrixXcd& u) const {
  return HermitianOperator(u * m_ * u.adjoint());
}

HermitianOperator HermitianOperator::transposed() const { return HermitianOperator(m_.transpose()); }

const MatrixXcd& pauli_x() {
  static const MatrixXcd m = (MatrixXcd(2, 2) << 0, 1, 1, 0).finished();
  return m;
}

const MatrixXcd& pauli_y() {
  static const MatrixXcd m = (MatrixXcd(2, 2) << 0, cplx(0, -1), cplx(0, 1), 0).finished();
  return m;
}

const MatrixXcd& pauli_z() {
  static const MatrixXcd m = (MatrixXcd(2, 2) << 1, 0, 0, -1).finished();
  return m;
}

HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b) {
  return HermitianOperator(kron(a.matrix(), b.matrix()));
}

HermitianOperator partial_trace_first(const HermitianOperator& op, int dim_a, int dim_b) {
  if (dim_a < 1 || dim_b < 1 || op.dim() != dim_a * dim_b)
    throw InvalidDimension("partial_trace_first: operator of dim " + std::to_string(op.dim()) +
                           " is not " + std::to_string(dim_a) + "x" + std::to_string(dim_b));
  return HermitianOperator(trace_out_first(op.matrix(), dim_a, dim_b));
}

HermitianOperator partial_trace_second(const HermitianOperator& op, int dim_a, int dim_b) {
  if (dim_a < 1 || dim_b < 1 || op.dim() != dim_a * dim_b)
    throw InvalidDimension("partial_trace_second: operator of dim " + std::to_string(op.dim()) +
                           " is not " + std::to_string(dim_a) + "x" + std::to_string(dim_b));
  return HermitianOperator(trace_out_second(op.matrix(), dim_a, dim_b));
}

Eigen::VectorXd eigenvalues(const HermitianOperator& op) {
  if (op.dim() == 0) return {};
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(op.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double min_eigenvalue(const HermitianOperator& op) {
  if (op.dim() == 2) {
    // Closed form keeps the hot certificate checks cheap.
    const double a = op(0, 0).real(), d = op(1, 1).real();
    const double off = std::abs(op(0, 1));
    return 0.5 * (a + d) - std::sqrt(0.25 * (a - d) * (a - d) + off * off);
  }
  return eigenvalues(op).minCoeff();
}

double max_eigenvalue(const HermitianOperator& op) { return -min_eigenvalue(-op); }

bool is_psd(const HermitianOperator& op, double tol) { return min_eigenvalue(op) >= -tol; }

HermitianOperator bloch_to_operator(const BlochVector& b) {
  MatrixXcd m = b.alpha * MatrixXcd::Identity(2, 2) + b.v.x() * pauli_x() + b.v.y() * pauli_y() +
                b.v.z() * pauli_z();
  return HermitianOperator(m);
}

BlochVector operator_to_bloch(const HermitianOperator& op) {
  if (op.dim() != 2)
    throw InvalidDimension("operator_to_bloch: expected a 2x2 operator, got dim " + std::to_string(op.dim()));
  const MatrixXcd& m = op.matrix();
  BlochVector b;
  b.alpha = 0.5 * (m(0, 0) + m(1, 1)).real();
  b.v = Vector3d(m(0, 1).real(), -m(0, 1).imag(), 0.5 * (m(0, 0) - m(1, 1)).real());
  return b;
}

HermitianOperator depolarize(const HermitianOperator& a, double eta) {
  const int d = a.dim();
  return a * eta + HermitianOperator::identity(d) * ((1.0 - eta) * a.trace() / d);
}

std::vector<HermitianOperator> hermitian_basis(int dim) {
  std::vector<HermitianOperator> basis;
  basis.reserve(static_cast<size_t>(dim) * dim);
  const double s = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < dim; ++j) {
    MatrixXcd e = MatrixXcd::Zero(dim, dim);
    e(j, j) = 1.0;
    basis.emplace_back(e);
  }
  for (int j = 0; j < dim; ++j) {
    for (int k = j + 1; k < dim; ++k) {
      MatrixXcd e = MatrixXcd::Zero(dim, dim);
      e(j, k) = s;
      e(k, j) = s;
      basis.emplace_back(e);
      e(j, k) = cplx(0, s);
      e(k, j) = cplx(0, -s);
      basis.emplace_back(e);
    }
  }
  return basis;
}

MatrixXcd rotation_unitary(const Eigen::Matrix3d& r) {
  Eigen::AngleAxisd aa(r);
  const Vector3d n = aa.axis();
  const double half = 0.5 * aa.angle();
  MatrixXcd u = std::cos(half) * MatrixXcd::Identity(2, 2) -
                cplx(0, std::sin(half)) * (n.x() * pauli_x() + n.y() * pauli_y() + n.z() * pauli_z());
  return u;
}

}  // namespace steerlab
