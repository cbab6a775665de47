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

#include "doctest.h"
#include "support.hpp"

using namespace steerlab;
using steerlab::testing::Gen;

namespace {

template <typename Scalar>
sdp::Matrix<Scalar> random_symmetric(Gen& g, int d) {
  sdp::Matrix<Scalar> m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if constexpr (std::is_same_v<Scalar, double>)
        m(i, j) = g.normal();
      else
        m(i, j) = Scalar(g.normal(), g.normal());
    }
  return (m + m.adjoint()) / 2.0;
}

// min <C, X> subject to Tr X = 1, X PSD; the optimum is lambda_min(C).
template <typename Scalar>
void check_min_eigenvalue_program(std::uint64_t seed) {
  Gen g(seed);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = g.integer(2, 6);
    const sdp::Matrix<Scalar> c = random_symmetric<Scalar>(g, d);
    sdp::Problem<Scalar> p;
    const auto x = p.add_psd_block("X", d);
    sdp::ScalarExpr<Scalar> tr;
    tr.add(x, sdp::Matrix<Scalar>::Identity(d, d)).add_constant(-1.0);
    p.add_equality(tr);
    sdp::ScalarExpr<Scalar> obj;
    obj.add(x, c);
    p.set_objective(obj, sdp::Sense::minimize);
    const auto sol = sdp::solve(p);
    REQUIRE(sol.status == sdp::Status::optimal);
    Eigen::SelfAdjointEigenSolver<sdp::Matrix<Scalar>> es(c);
    CHECK(sol.objective_value == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-7));
    CHECK(sol.dual_value == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-7));
    CHECK(sdp::primal_violation(p, sol) < 1e-7);
  }
}

}  // namespace

TEST_SUITE("sdp") {
  TEST_CASE("scalar linear program") {
    // min x + 2y  s.t.  x + y = 1, x, y >= 0  ->  1 at (1, 0).
    sdp::RealProblem p;
    const auto x = p.add_scalar("x", sdp::ScalarDomain::nonnegative);
    const auto y = p.add_scalar("y", sdp::ScalarDomain::nonnegative);
    sdp::ScalarExpr<double> c;
    c.add(x, 1.0).add(y, 1.0).add_constant(-1.0);
    p.add_equality(c);
    sdp::ScalarExpr<double> obj;
    obj.add(x, 1.0).add(y, 2.0);
    p.set_objective(obj, sdp::Sense::minimize);
    const auto sol = sdp::solve(p);
    REQUIRE(sol.status == sdp::Status::optimal);
    CHECK(sol.objective_value == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(sol.scalars[x.id] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(sol.scalars[y.id]) < 1e-6);
  }

  TEST_CASE("real minimum eigenvalue program") { check_min_eigenvalue_program<double>(31); }
  TEST_CASE("complex minimum eigenvalue program") { check_min_eigenvalue_program<cplx>(32); }

  TEST_CASE("LMI: largest t with A - t 1 PSD") {
    Gen g(33);
    for (int trial = 0; trial < 10; ++trial) {
      const int d = g.integer(2, 5);
      const MatrixXcd a = random_symmetric<cplx>(g, d);
      sdp::ComplexProblem p;
      const auto t = p.add_scalar("t");
      sdp::MatrixExpr<cplx> e(d);
      e.add_constant(a).add(t, -MatrixXcd::Identity(d, d));
      p.add_lmi(e, sdp::LmiSense::psd);
      sdp::ScalarExpr<cplx> obj;
      obj.add(t, 1.0);
      p.set_objective(obj, sdp::Sense::maximize);
      const auto sol = sdp::solve(p);
      REQUIRE(sol.status == sdp::Status::optimal);
      Eigen::SelfAdjointEigenSolver<MatrixXcd> es(a);
      CHECK(sol.objective_value == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-7));
    }
  }

  TEST_CASE("Hermitian matrix variable with a matrix equality") {
    // F free Hermitian, F - B == 0, minimize Tr F  ->  Tr B.
    Gen g(34);
    const MatrixXcd b = random_symmetric<cplx>(g, 3);
    sdp::ComplexProblem p;
    const auto f = p.add_matrix_variable("F", 3);
    sdp::MatrixExpr<cplx> e(3);
    e.add(f, 1.0).add_constant(-b);
    p.add_equality(e);
    sdp::ScalarExpr<cplx> obj;
    obj.add(f, MatrixXcd::Identity(3, 3));
    p.set_objective(obj, sdp::Sense::minimize);
    const auto sol = sdp::solve(p);
    REQUIRE(sol.status == sdp::Status::optimal);
    CHECK((sol.value(f) - b).norm() < 1e-7);
    CHECK(sol.objective_value == doctest::Approx(b.trace().real()).epsilon(1e-7));
  }

  TEST_CASE("infeasible program is reported") {
    sdp::RealProblem p;
    const auto x = p.add_psd_block("X", 2);
    sdp::ScalarExpr<double> tr;
    tr.add(x, Eigen::MatrixXd::Identity(2, 2)).add_constant(1.0);  // Tr X = -1
    p.add_equality(tr);
    sdp::ScalarExpr<double> obj;
    obj.add(x, Eigen::MatrixXd::Identity(2, 2));
    p.set_objective(obj, sdp::Sense::minimize);
    const auto sol = sdp::solve(p);
    CHECK(sol.status == sdp::Status::infeasible);
  }

  TEST_CASE("unbounded program is reported") {
    // min -x with x >= 0 and no other constraint.
    sdp::RealProblem p;
    const auto x = p.add_scalar("x", sdp::ScalarDomain::nonnegative);
    const auto y = p.add_scalar("y", sdp::ScalarDomain::nonnegative);
    sdp::ScalarExpr<double> c;
    c.add(x, 1.0).add(y, -1.0);
    p.add_equality(c);
    sdp::ScalarExpr<double> obj;
    obj.add(x, -1.0);
    p.set_objective(obj, sdp::Sense::minimize);
    const auto sol = sdp::solve(p);
    CHECK(sol.status == sdp::Status::unbounded);
  }
}
