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

// Heuristic upper bounds on the critical visibility of a state: the seesaw
// iteration and simplex search over constrained measurement families.

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "steerlab/robustness.hpp"

namespace steerlab {

struct SeesawConfig {
  int restarts = 20;
  double convergence_delta = 1e-7;
  int max_rounds = 200;
  /// white_noise or generalized.
  Quantity quantity = Quantity::white_noise;
  std::uint64_t seed = 1;
  sdp::Options solver{};
  /// 0 picks STEERLAB_THREADS or the hardware concurrency.
  int threads = 0;
};

enum class SearchFamily { planar, projective, trine, sic };
const char* to_string(SearchFamily f);
SearchFamily search_family_from_string(const std::string& s);

struct SearchConfig {
  SearchFamily family = SearchFamily::projective;
  int restarts = 20;
  int max_evals = 3000;
  double xtol = 1e-7;
  double ftol = 1e-10;
  std::uint64_t seed = 1;
  sdp::Options solver{};
  int threads = 0;
};

struct OptimizationRun {
  /// Critical visibility of best_set (white-noise, re-scored for the
  /// generalized seesaw).
  double best_value = 1.0;
  MeasurementSet best_set;
  /// Per-round values of the winning restart: eta for white-noise runs,
  /// 1/(1+R) for generalized seesaw runs, best-so-far for searches.
  std::vector<double> trace;
  /// Final value of every restart, in restart order.
  std::vector<double> restart_values;
  std::vector<double> best_params;
  int restarts_used = 0;
  int evaluations = 0;
  bool converged = false;
  /// False when some solve ended inaccurate.
  bool accurate = true;
};

/// Random POVM M_a = L^{-1/2} G_a G_a^* L^{-1/2}, L = sum_a G_a G_a^*, with
/// complex Gaussian G_a.  Bit-identical for a given seed.
Povm random_povm(int d, int k, std::uint64_t seed);

/// Single seesaw run from a given measurement set.
OptimizationRun seesaw_from(const BipartiteState& state, const MeasurementSet& start, const SeesawConfig& cfg);

/// Multi-start seesaw from random POVMs.  Requires k <= d^2.
OptimizationRun seesaw(const BipartiteState& state, int n, int k, const SeesawConfig& cfg);

/// Number of parameters of the family for n measurements.
int family_parameter_count(SearchFamily f, int n);
/// The measurement set for a parameter vector (angles in radians).
MeasurementSet family_member(SearchFamily f, int n, const std::vector<double>& params);

OptimizationRun parametric_search(const BipartiteState& state, const SearchConfig& cfg, int n);

/// Best of `restarts` independent runs, run on up to `threads` workers; run i
/// receives a seed derived from (seed, i) only, so the result does not depend
/// on the thread count.
OptimizationRun multi_start(const std::function<OptimizationRun(std::uint64_t)>& op, int restarts,
                            std::uint64_t seed, int threads = 0);

/// Seed of restart i.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t i);

int worker_threads(int requested);

struct SimplexResult {
  std::vector<double> x;
  double fx = 0.0;
  int evaluations = 0;
  bool converged = false;
  std::vector<double> history;  // best value after each iteration
};

/// Nelder-Mead minimization.
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                          double step, int max_evals, double xtol, double ftol);

}  // namespace steerlab
