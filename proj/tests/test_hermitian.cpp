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

TEST_SUITE("hermitian") {
  TEST_CASE("constructor symmetrizes its argument") {
    MatrixXcd m(2, 2);
    m << 1.0, cplx(2.0, 1.0), cplx(0.0, 3.0), 4.0;
    const HermitianOperator h(m);
    CHECK(h(0, 1) == std::conj(h(1, 0)));
    CHECK(h(0, 1) == cplx(1.0, -1.0));
    CHECK(h(0, 0).imag() == 0.0);
  }

  TEST_CASE("partial traces agree with index loops") {
    Gen g(11);
    for (int trial = 0; trial < 20; ++trial) {
      const int da = g.integer(1, 4), db = g.integer(1, 4);
      const HermitianOperator op = g.hermitian(da * db);
      MatrixXcd ta = MatrixXcd::Zero(db, db), tb = MatrixXcd::Zero(da, da);
      for (int i = 0; i < db; ++i)
        for (int j = 0; j < db; ++j)
          for (int a = 0; a < da; ++a) ta(i, j) += op(a * db + i, a * db + j);
      for (int a = 0; a < da; ++a)
        for (int b = 0; b < da; ++b)
          for (int i = 0; i < db; ++i) tb(a, b) += op(a * db + i, b * db + i);
      CHECK((partial_trace_first(op, da, db).matrix() - ta).norm() < 1e-12);
      CHECK((partial_trace_second(op, da, db).matrix() - tb).norm() < 1e-12);
    }
  }

  TEST_CASE("partial trace rejects mismatched dimensions") {
    CHECK_THROWS_AS(partial_trace_first(HermitianOperator::identity(6), 4, 2), InvalidDimension);
    CHECK_THROWS_AS(partial_trace_second(HermitianOperator::identity(5), 2, 2), InvalidDimension);
  }

  TEST_CASE("tensor product of operators traces back to its factors") {
    Gen g(12);
    for (int trial = 0; trial < 10; ++trial) {
      const HermitianOperator a = g.density(2, 2), b = g.density(3, 3);
      const HermitianOperator ab = tensor(a, b);
      CHECK((partial_trace_first(ab, 2, 3).matrix() - b.matrix()).norm() < 1e-12);
      CHECK((partial_trace_second(ab, 2, 3).matrix() - a.matrix()).norm() < 1e-12);
    }
  }

  TEST_CASE("Bloch parametrization round trip") {
    Gen g(13);
    for (int trial = 0; trial < 50; ++trial) {
      const BlochVector b{g.normal(), Vector3d(g.normal(), g.normal(), g.normal())};
      const HermitianOperator op = bloch_to_operator(b);
      CHECK(std::abs(op.trace() - 2.0 * b.alpha) < 1e-12);
      const BlochVector back = operator_to_bloch(op);
      CHECK(std::abs(back.alpha - b.alpha) < 1e-12);
      CHECK((back.v - b.v).norm() < 1e-12);
    }
    CHECK_THROWS_AS(operator_to_bloch(HermitianOperator::identity(3)), InvalidDimension);
  }

  TEST_CASE("rotation unitaries act on Bloch vectors as the rotation") {
    Gen g(14);
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::Matrix3d r = g.rotation();
      const Vector3d v = g.unit_vector();
      const MatrixXcd u = rotation_unitary(r);
      CHECK((u * u.adjoint() - MatrixXcd::Identity(2, 2)).norm() < 1e-12);
      const HermitianOperator image = bloch_to_operator({0.0, v}).conjugated(u);
      CHECK((operator_to_bloch(image).v - r * v).norm() < 1e-12);
    }
  }

  TEST_CASE("depolarizing maps compose multiplicatively and preserve trace") {
    Gen g(15);
    for (int trial = 0; trial < 100; ++trial) {
      const int d = g.integer(2, 5);
      const HermitianOperator a = g.hermitian(d);
      const double e1 = g.uniform(), e2 = g.uniform();
      const HermitianOperator twice = depolarize(depolarize(a, e1), e2);
      CHECK((twice.matrix() - depolarize(a, e1 * e2).matrix()).norm() < 1e-8);
      CHECK(std::abs(depolarize(a, e1).trace() - a.trace()) < 1e-12);
    }
  }

  TEST_CASE("depolarizing commutes with unitary conjugation") {
    Gen g(16);
    for (int trial = 0; trial < 20; ++trial) {
      const int d = g.integer(2, 4);
      const HermitianOperator a = g.hermitian(d);
      const MatrixXcd u = g.unitary(d);
      const double eta = g.uniform();
      CHECK((depolarize(a.conjugated(u), eta).matrix() - depolarize(a, eta).conjugated(u).matrix()).norm() < 1e-10);
    }
  }

  TEST_CASE("Hermitian basis is orthonormal and spans") {
    for (int d = 1; d <= 4; ++d) {
      const auto basis = hermitian_basis(d);
      REQUIRE(static_cast<int>(basis.size()) == d * d);
      for (int i = 0; i < d * d; ++i)
        for (int j = 0; j < d * d; ++j) CHECK(std::abs(basis[i].inner(basis[j]) - (i == j ? 1.0 : 0.0)) < 1e-12);
    }
  }

  TEST_CASE("eigenvalue helpers") {
    MatrixXcd m = MatrixXcd::Zero(3, 3);
    m.diagonal() << -1.0, 0.5, 2.0;
    const HermitianOperator h(m);
    CHECK(min_eigenvalue(h) == doctest::Approx(-1.0));
    CHECK(max_eigenvalue(h) == doctest::Approx(2.0));
    CHECK_FALSE(is_psd(h, 1e-9));
    CHECK(is_psd(HermitianOperator::identity(3), 0.0));
  }
}
