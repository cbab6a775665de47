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

// Small dense semidefinite programming layer.
//
// Problems are assembled from named PSD matrix variables (real symmetric when
// Scalar = double, complex Hermitian when Scalar = std::complex<double>), real
// scalar variables, Hermitian matrix variables, affine equalities and linear
// matrix inequalities.  They are lowered to the standard conic form
//
//     minimize  <C, X> + c_l . x_l + c_f . x_f
//     s.t.      A(X) + A_l x_l + A_f x_f = b,   X PSD,  x_l >= 0,  x_f free
//
// and solved with an infeasible primal-dual path-following interior point
// method (HKM search direction, Mehrotra predictor-corrector).

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace steerlab::sdp {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

enum class Sense { minimize, maximize };
enum class Status { optimal, infeasible, unbounded, inaccurate };
enum class ScalarDomain { free, nonnegative };
/// expr >= 0 (PSD) or expr <= 0 (NSD).
enum class LmiSense { psd, nsd };

const char* to_string(Status s);

struct BlockRef {
  int id = -1;
};
struct ScalarRef {
  int id = -1;
};

/// Unconstrained Hermitian (or symmetric) matrix variable, stored as real
/// coordinates in an orthonormal basis.
template <typename Scalar>
struct MatrixVar {
  int dim = 0;
  std::vector<ScalarRef> coords;
  std::vector<Matrix<Scalar>> basis;
};

/// Affine matrix-valued expression: constant + sum_b c_b X_b + sum_s s H_s.
template <typename Scalar>
class MatrixExpr {
 public:
  explicit MatrixExpr(int dim) : dim_(dim), constant_(Matrix<Scalar>::Zero(dim, dim)) {}

  MatrixExpr& add(BlockRef b, double coef) {
    blocks_.emplace_back(b.id, coef);
    return *this;
  }
  MatrixExpr& add(ScalarRef s, const Matrix<Scalar>& coef) {
    scalars_.emplace_back(s.id, coef);
    return *this;
  }
  MatrixExpr& add(const MatrixVar<Scalar>& v, double coef) {
    for (size_t j = 0; j < v.coords.size(); ++j) scalars_.emplace_back(v.coords[j].id, coef * v.basis[j]);
    return *this;
  }
  MatrixExpr& add_constant(const Matrix<Scalar>& c) {
    constant_ += c;
    return *this;
  }

  int dim() const { return dim_; }
  const Matrix<Scalar>& constant() const { return constant_; }
  const std::vector<std::pair<int, double>>& blocks() const { return blocks_; }
  const std::vector<std::pair<int, Matrix<Scalar>>>& scalars() const { return scalars_; }

 private:
  int dim_;
  Matrix<Scalar> constant_;
  std::vector<std::pair<int, double>> blocks_;
  std::vector<std::pair<int, Matrix<Scalar>>> scalars_;
};

/// Affine real-valued expression: constant + sum_b Re Tr(G_b X_b) + sum_s c_s s.
template <typename Scalar>
class ScalarExpr {
 public:
  ScalarExpr& add(BlockRef b, const Matrix<Scalar>& coef) {
    blocks_.emplace_back(b.id, coef);
    return *this;
  }
  ScalarExpr& add(ScalarRef s, double coef) {
    scalars_.emplace_back(s.id, coef);
    return *this;
  }
  /// Re Tr(G F) for a matrix variable F.
  ScalarExpr& add(const MatrixVar<Scalar>& v, const Matrix<Scalar>& g) {
    for (size_t j = 0; j < v.coords.size(); ++j)
      scalars_.emplace_back(v.coords[j].id, std::real((g * v.basis[j]).trace()));
    return *this;
  }
  ScalarExpr& add_constant(double c) {
    constant_ += c;
    return *this;
  }

  double constant() const { return constant_; }
  const std::vector<std::pair<int, Matrix<Scalar>>>& blocks() const { return blocks_; }
  const std::vector<std::pair<int, double>>& scalars() const { return scalars_; }

 private:
  double constant_ = 0.0;
  std::vector<std::pair<int, Matrix<Scalar>>> blocks_;
  std::vector<std::pair<int, double>> scalars_;
};

struct Options {
  double feas_tol = 1e-8;
  double gap_tol = 1e-8;
  int max_iter = 100;
};

template <typename Scalar>
struct Solution {
  Status status = Status::inaccurate;
  double objective_value = 0.0;  ///< primal objective in the problem's own sense
  double dual_value = 0.0;       ///< dual objective in the problem's own sense
  double gap = 0.0;              ///< relative duality gap
  double primal_residual = 0.0;  ///< ||b - A x|| / (1 + ||b||)
  double dual_residual = 0.0;
  int iterations = 0;

  std::vector<Matrix<Scalar>> blocks;  ///< PSD block values, by BlockRef id
  std::vector<double> scalars;         ///< scalar values, by ScalarRef id
  /// Hermitian multiplier per equality (1x1 for scalar equalities).  For a
  /// minimization, grad(objective) - sum_i A_i^*(Y_i) lies in the dual cone;
  /// for a maximization its negation does.
  std::vector<Matrix<Scalar>> equality_duals;
  /// PSD multiplier of each LMI (conjugate to its slack).
  std::vector<Matrix<Scalar>> lmi_duals;
  /// Dual slack of each PSD block variable.
  std::vector<Matrix<Scalar>> block_duals;

  Matrix<Scalar> value(const MatrixVar<Scalar>& v) const {
    Matrix<Scalar> out = Matrix<Scalar>::Zero(v.dim, v.dim);
    for (size_t j = 0; j < v.coords.size(); ++j) out += scalars[v.coords[j].id] * v.basis[j];
    return out;
  }
};

template <typename Scalar>
class Problem {
 public:
  BlockRef add_psd_block(std::string name, int dim);
  ScalarRef add_scalar(std::string name, ScalarDomain domain = ScalarDomain::free);
  MatrixVar<Scalar> add_matrix_variable(const std::string& name, int dim);

  /// expr == 0; returns the equality index.
  int add_equality(MatrixExpr<Scalar> expr);
  int add_equality(ScalarExpr<Scalar> expr);
  /// expr >= 0 or expr <= 0 in the semidefinite order; returns the LMI index.
  int add_lmi(MatrixExpr<Scalar> expr, LmiSense sense);
  void set_objective(ScalarExpr<Scalar> expr, Sense sense);

  struct Block {
    std::string name;
    int dim;
  };
  struct Variable {
    std::string name;
    ScalarDomain domain;
  };
  struct Equality {
    bool matrix_valued;
    MatrixExpr<Scalar> matrix;
    ScalarExpr<Scalar> scalar;
  };
  struct Lmi {
    MatrixExpr<Scalar> expr;
    LmiSense sense;
  };

  const std::vector<Block>& blocks() const { return blocks_; }
  const std::vector<Variable>& scalars() const { return scalars_; }
  const std::vector<Equality>& equalities() const { return equalities_; }
  const std::vector<Lmi>& lmis() const { return lmis_; }
  const ScalarExpr<Scalar>& objective() const { return objective_; }
  Sense sense() const { return sense_; }

  /// Evaluate the affine parts at a point (used by residual checks that do
  /// not trust the solver).
  Matrix<Scalar> evaluate(const MatrixExpr<Scalar>& e, const Solution<Scalar>& s) const;
  double evaluate(const ScalarExpr<Scalar>& e, const Solution<Scalar>& s) const;

 private:
  void check_expr(const MatrixExpr<Scalar>& e) const;
  void check_expr(const ScalarExpr<Scalar>& e) const;

  std::vector<Block> blocks_;
  std::vector<Variable> scalars_;
  std::vector<Equality> equalities_;
  std::vector<Lmi> lmis_;
  ScalarExpr<Scalar> objective_;
  Sense sense_ = Sense::minimize;
};

template <typename Scalar>
Solution<Scalar> solve(const Problem<Scalar>& problem, const Options& options = {});

/// Largest violation of the problem's equalities, LMIs and variable domains
/// at the returned primal point, computed from the problem data alone.
template <typename Scalar>
double primal_violation(const Problem<Scalar>& problem, const Solution<Scalar>& s);

using RealProblem = Problem<double>;
using ComplexProblem = Problem<std::complex<double>>;

}  // namespace steerlab::sdp
