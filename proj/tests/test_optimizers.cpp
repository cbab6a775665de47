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

#include <cstdlib>
#include <set>

#include "doctest.h"
#include "support.hpp"

using namespace steerlab;
using steerlab::testing::Gen;

TEST_SUITE("optimizers") {
  TEST_CASE("Nelder-Mead finds the Rosenbrock minimum") {
    auto rosen = [](const std::vector<double>& x) {
      return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    const SimplexResult r = nelder_mead(rosen, {-1.2, 1.0}, 0.5, 5000, 1e-10, 1e-14);
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-4));
    for (size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1] + 1e-15);
  }

  TEST_CASE("derived seeds are deterministic and distinct") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 100; ++i) {
      CHECK(derive_seed(7, i) == derive_seed(7, i));
      seen.insert(derive_seed(7, i));
    }
    CHECK(seen.size() == 100u);
    CHECK(derive_seed(7, 0) != derive_seed(8, 0));
  }

  TEST_CASE("worker count honors STEERLAB_THREADS") {
    setenv("STEERLAB_THREADS", "3", 1);
    CHECK(worker_threads(0) == 3);
    CHECK(worker_threads(5) == 5);
    unsetenv("STEERLAB_THREADS");
    CHECK(worker_threads(0) >= 1);
  }

  TEST_CASE("seesaw traces are monotone") {
    Gen g(51);
    const BipartiteState w = make_werner_qubit(1.0);
    SeesawConfig cfg;
    for (int trial = 0; trial < 10; ++trial) {
      const int n = g.integer(2, 3);
      const OptimizationRun run = seesaw_from(w, g.povms(2, n, 2), cfg);
      for (size_t i = 1; i < run.trace.size(); ++i) CHECK(run.trace[i] <= run.trace[i - 1] + 1e-7);
      CHECK(run.best_set.check().empty());
    }
  }

  TEST_CASE("seesaw recovers the two-measurement optimum") {
    SeesawConfig cfg;
    cfg.restarts = 5;
    const OptimizationRun run = seesaw(make_werner_qubit(1.0), 2, 2, cfg);
    CHECK(run.best_value == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-4));
    CHECK(run.restart_values.size() == 5u);
    const double exact = white_noise_robustness(assemblage_from(make_werner_qubit(1.0), run.best_set)).eta;
    CHECK(std::abs(exact - run.best_value) < 1e-6);
  }

  TEST_CASE("multi-start result does not depend on the thread count") {
    SeesawConfig a, b;
    a.restarts = b.restarts = 6;
    a.threads = 1;
    b.threads = 4;
    const BipartiteState w = make_werner_qubit(1.0);
    const OptimizationRun ra = seesaw(w, 3, 2, a), rb = seesaw(w, 3, 2, b);
    CHECK(ra.best_value == rb.best_value);
    CHECK(ra.restart_values == rb.restart_values);
  }

  TEST_CASE("search family parametrizations") {
    CHECK(family_parameter_count(SearchFamily::planar, 4) == 3);
    CHECK(family_parameter_count(SearchFamily::projective, 4) == 5);
    CHECK(family_parameter_count(SearchFamily::trine, 3) == 6);
    CHECK(family_parameter_count(SearchFamily::sic, 2) == 3);
    Gen g(52);
    for (SearchFamily f : {SearchFamily::planar, SearchFamily::projective, SearchFamily::trine, SearchFamily::sic}) {
      std::vector<double> p(family_parameter_count(f, 3));
      for (auto& v : p) v = g.uniform(-3.0, 3.0);
      const MeasurementSet ms = family_member(f, 3, p);
      CHECK(ms.n() == 3);
      CHECK(ms.check().empty());
    }
    CHECK_THROWS_AS(family_member(SearchFamily::planar, 3, {0.1}), InvalidParameter);
  }

  TEST_CASE("planar search finds equally spaced axes") {
    SearchConfig cfg;
    cfg.family = SearchFamily::planar;
    cfg.restarts = 4;
    const OptimizationRun run = parametric_search(make_werner_qubit(1.0), cfg, 3);
    CHECK(run.best_value == doctest::Approx(2.0 / 3.0).epsilon(1e-4));
  }

  TEST_CASE("best four-measurement set: three coplanar equally spaced axes and one normal axis") {
    SeesawConfig cfg;
    cfg.restarts = 20;
    const OptimizationRun run = seesaw(make_werner_qubit(1.0), 4, 2, cfg);
    REQUIRE(run.best_value == doctest::Approx(0.5547).epsilon(1e-3));
    std::vector<Vector3d> axes;
    for (int x = 0; x < 4; ++x) axes.push_back(operator_to_bloch(run.best_set.element(x, 0)).v.normalized());
    int normal = -1;
    for (int i = 0; i < 4; ++i) {
      bool orthogonal = true;
      for (int j = 0; j < 4; ++j)
        if (j != i && std::abs(axes[i].dot(axes[j])) > 1e-2) orthogonal = false;
      if (orthogonal) normal = i;
    }
    REQUIRE(normal >= 0);
    std::vector<Vector3d> plane;
    for (int i = 0; i < 4; ++i)
      if (i != normal) plane.push_back(axes[i]);
    CHECK(std::abs(plane[0].cross(plane[1]).dot(plane[2])) < 1e-2);
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) CHECK(std::abs(std::abs(plane[i].dot(plane[j])) - 0.5) < 1e-2);
  }
}
