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

// Random generators and reference computations shared by the test programs.

#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "steerlab/commands.hpp"

namespace steerlab::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::uint64_t seed() { return rng_(); }

  MatrixXcd complex_matrix(int r, int c) {
    MatrixXcd m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = cplx(normal(), normal());
    return m;
  }

  HermitianOperator hermitian(int d) { return HermitianOperator(complex_matrix(d, d)); }

  HermitianOperator density(int d, int rank) {
    const MatrixXcd g = complex_matrix(d, rank);
    const MatrixXcd rho = g * g.adjoint();
    return HermitianOperator(rho / rho.trace().real());
  }

  Vector3d unit_vector() {
    Vector3d v(normal(), normal(), normal());
    return v.normalized();
  }

  Vector3d planar_unit_vector() {
    const double t = uniform(0.0, 2.0 * std::numbers::pi);
    return {std::sin(t), 0.0, std::cos(t)};
  }

  Eigen::Matrix3d rotation() {
    Eigen::Quaterniond q(normal(), normal(), normal(), normal());
    q.normalize();
    return q.toRotationMatrix();
  }

  MatrixXcd unitary(int d) {
    Eigen::HouseholderQR<MatrixXcd> qr(complex_matrix(d, d));
    return qr.householderQ() * MatrixXcd::Identity(d, d);
  }

  BipartiteState state(int da, int db, int rank) { return BipartiteState(da, db, density(da * db, rank)); }

  MeasurementSet povms(int d, int n, int k) {
    std::vector<Povm> p;
    for (int x = 0; x < n; ++x) p.push_back(random_povm(d, k, seed()));
    return MeasurementSet(std::move(p));
  }

  /// Assemblage of a random pure state under random POVMs.
  Assemblage assemblage(int d, int n, int k) { return assemblage_from(state(d, d, 1), povms(d, n, k)); }

  /// Dichotomic qubit measurements with random unit axes and random biases;
  /// planar ones lie in the x-z plane.
  MeasurementSet dichotomic(int n, bool planar) {
    std::vector<Povm> p;
    for (int x = 0; x < n; ++x) {
      const Vector3d u = planar ? planar_unit_vector() : unit_vector();
      const double m = uniform(0.05, 0.5);
      const double alpha = uniform(m, 1.0 - m);
      const HermitianOperator e0 = bloch_to_operator({alpha, m * u});
      p.push_back(Povm{2, {e0, HermitianOperator::identity(2) - e0}});
    }
    return MeasurementSet(std::move(p));
  }

 private:
  std::mt19937_64 rng_;
};

/// Tr_A((M (x) 1) rho) by explicit index loops.
inline MatrixXcd reference_conditional(const BipartiteState& s, const HermitianOperator& m) {
  const int da = s.dim_a, db = s.dim_b;
  MatrixXcd out = MatrixXcd::Zero(db, db);
  for (int i = 0; i < db; ++i)
    for (int j = 0; j < db; ++j)
      for (int a = 0; a < da; ++a)
        for (int b = 0; b < da; ++b) out(i, j) += m(a, b) * s.rho(b * db + i, a * db + j);
  return out;
}

inline double max_abs_diff(const Assemblage& a, const Assemblage& b) {
  double worst = 0.0;
  for (int x = 0; x < a.n(); ++x)
    for (int o = 0; o < a.k(); ++o) worst = std::max(worst, (a(x, o).matrix() - b(x, o).matrix()).cwiseAbs().maxCoeff());
  return worst;
}

}  // namespace steerlab::testing
