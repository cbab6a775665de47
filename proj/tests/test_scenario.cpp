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

#include <set>

#include "doctest.h"
#include "steerlab/point_sets.hpp"
#include "support.hpp"

using namespace steerlab;
using steerlab::testing::Gen;

TEST_SUITE("scenario") {
  TEST_CASE("assemblage matches the index-loop conditional states") {
    Gen g(21);
    for (int trial = 0; trial < 10; ++trial) {
      const int da = g.integer(2, 3), db = g.integer(2, 3);
      const BipartiteState s = g.state(da, db, g.integer(1, da * db));
      const MeasurementSet ms = g.povms(da, g.integer(1, 3), g.integer(2, 4));
      const Assemblage a = assemblage_from(s, ms);
      for (int x = 0; x < ms.n(); ++x)
        for (int o = 0; o < ms.k(); ++o)
          CHECK((a(x, o).matrix() - steerlab::testing::reference_conditional(s, ms.element(x, o))).norm() < 1e-12);
    }
  }

  TEST_CASE("assemblages are positive and no-signaling with Bob's marginal") {
    Gen g(22);
    for (int trial = 0; trial < 10; ++trial) {
      const BipartiteState s = g.state(3, 2, 3);
      const Assemblage a = assemblage_from(s, g.povms(3, 3, 3));
      CHECK(a.positivity_violation() < 1e-12);
      CHECK(a.signaling() < 1e-12);
      CHECK((a.marginal(0).matrix() - s.marginal_b().matrix()).norm() < 1e-12);
    }
  }

  TEST_CASE("depolarizing measurements equals depolarizing the assemblage for the maximally entangled state") {
    Gen g(23);
    for (int d = 2; d <= 4; ++d) {
      const MeasurementSet ms = g.povms(d, 2, 3);
      const double eta = g.uniform();
      const BipartiteState phi = make_max_entangled(d);
      CHECK(steerlab::testing::max_abs_diff(assemblage_from(phi, depolarize_measurements(ms, eta)),
                                            depolarize(assemblage_from(phi, ms), eta)) < 1e-12);
    }
  }

  TEST_CASE("random POVMs are valid and reproducible") {
    for (int d = 2; d <= 4; ++d)
      for (int k = 2; k <= d * d; k += 3) {
        const Povm p = random_povm(d, k, 99);
        CHECK(p.is_valid());
        CHECK(p.outcomes() == k);
        const Povm q = random_povm(d, k, 99);
        for (int a = 0; a < k; ++a) CHECK(p.elements[a].matrix() == q.elements[a].matrix());
      }
  }

  TEST_CASE("MUBs are orthonormal and mutually unbiased") {
    for (int d = 2; d <= 6; ++d) {
      const int count = d == 6 ? 3 : d + 1;
      const auto bases = mub_basis_matrices(d, count);
      REQUIRE(static_cast<int>(bases.size()) == count);
      for (int i = 0; i < count; ++i) {
        CHECK((bases[i].adjoint() * bases[i] - MatrixXcd::Identity(d, d)).norm() < 1e-10);
        for (int j = i + 1; j < count; ++j) {
          const MatrixXcd overlap = bases[i].adjoint() * bases[j];
          for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) CHECK(std::norm(overlap(r, c)) == doctest::Approx(1.0 / d).epsilon(1e-10));
        }
      }
      CHECK(mub_bases(d, count).check().empty());
    }
    CHECK_THROWS_AS(mub_bases(6, 4), UnsupportedScenario);
    CHECK_THROWS_AS(mub_bases(3, 5), UnsupportedScenario);
  }

  TEST_CASE("qubit families") {
    for (int n = 2; n <= 8; ++n) {
      CHECK(equally_spaced_planar(n).check().empty());
      CHECK(thomson_set(n).check().empty());
      CHECK(fibonacci_set(n).check().empty());
      for (int x = 0; x < n; ++x) {
        const Vector3d v = operator_to_bloch(equally_spaced_planar(n).element(x, 0)).v * 2.0;
        CHECK(std::abs(v.y()) < 1e-12);
        CHECK(v.norm() == doctest::Approx(1.0));
      }
    }
    CHECK(trine_povm().is_valid());
    CHECK(sic_tetrahedron_povm().is_valid());
    CHECK(trine_povm().outcomes() == 3);
    CHECK(sic_tetrahedron_povm().outcomes() == 4);
  }

  TEST_CASE("equally spaced planar axes are pi/N apart") {
    const int n = 5;
    const MeasurementSet ms = equally_spaced_planar(n);
    for (int x = 0; x + 1 < n; ++x) {
      const Vector3d u = operator_to_bloch(ms.element(x, 0)).v.normalized();
      const Vector3d w = operator_to_bloch(ms.element(x + 1, 0)).v.normalized();
      CHECK(std::acos(std::clamp(u.dot(w), -1.0, 1.0)) == doctest::Approx(std::numbers::pi / n));
    }
  }

  TEST_CASE("Thomson axes minimize the Coulomb energy of antipodal pairs") {
    // Known optimum: N = 3 is the orthogonal triple.
    const auto axes = thomson_axes(3);
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) CHECK(std::abs(axes[i].dot(axes[j])) < 1e-6);
    Gen g(24);
    std::vector<Vector3d> random(6);
    for (auto& v : random) v = g.unit_vector();
    CHECK(thomson_energy(thomson_axes(6)) <= thomson_energy(random) + 1e-12);
  }

  TEST_CASE("strategy tables enumerate every response function once") {
    const StrategyTable t = deterministic_strategies(3, 3);
    CHECK(t.size() == 27);
    std::set<std::vector<int>> seen;
    for (int l = 0; l < t.size(); ++l) {
      std::vector<int> out{t.outcome(0, l), t.outcome(1, l), t.outcome(2, l)};
      CHECK(t.index_of(out) == l);
      seen.insert(out);
    }
    CHECK(seen.size() == 27u);
    CHECK_THROWS_AS(deterministic_strategies(13, 2), ScenarioTooLarge);
  }

  TEST_CASE("invalid inputs are rejected") {
    CHECK_THROWS_AS(make_werner_qubit(1.5), InvalidParameter);
    CHECK_THROWS_AS(make_isotropic(3, -0.1), InvalidParameter);
    CHECK_THROWS_AS(BipartiteState(2, 2, HermitianOperator::identity(4)), InvalidParameter);
    CHECK_THROWS_AS(BipartiteState(2, 3, HermitianOperator::identity(4) * 0.25), InvalidDimension);
    CHECK_THROWS_AS(assemblage_from(make_werner_qubit(1.0), mub_bases(3, 2)), InvalidDimension);
    CHECK_THROWS_AS(projective_from_bloch(Vector3d(0.5, 0.0, 0.0)), InvalidParameter);
    Povm bad{2, {HermitianOperator::identity(2), HermitianOperator::identity(2)}};
    CHECK_FALSE(MeasurementSet({bad}).check().empty());
  }
}
