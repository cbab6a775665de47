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

#include "steerlab/optimizers.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <thread>

namespace steerlab {

const char* to_string(SearchFamily f) {
  switch (f) {
    case SearchFamily::planar:
      return "planar";
    case SearchFamily::projective:
      return "projective";
    case SearchFamily::trine:
      return "trine";
    case SearchFamily::sic:
      return "sic";
  }
  return "projective";
}

SearchFamily search_family_from_string(const std::string& s) {
  for (auto f : {SearchFamily::planar, SearchFamily::projective, SearchFamily::trine, SearchFamily::sic})
    if (s == to_string(f)) return f;
  throw InvalidParameter("unknown search family '" + s + "'");
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t i) {
  // splitmix64 of the pair.
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ull + i + 0x632BE59BD9B4E019ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

int worker_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("STEERLAB_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Povm random_povm(int d, int k, std::uint64_t seed) {
  if (d < 1 || k < 1) throw InvalidParameter("random_povm: d and k must be positive");
  if (k == 1) return Povm{d, {HermitianOperator::identity(d)}};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<MatrixXcd> g(k);
  MatrixXcd l = MatrixXcd::Zero(d, d);
  for (auto& m : g) {
    MatrixXcd a(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a(i, j) = cplx(gauss(rng), gauss(rng));
    m = a * a.adjoint();
    l += m;
  }
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(l);
  const MatrixXcd w = es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                      es.eigenvectors().adjoint();
  Povm p{d, {}};
  for (const auto& m : g) p.elements.emplace_back(w * m * w);
  return p;
}

namespace {

struct Scored {
  double visibility;          // trace value
  double eta;                 // white-noise visibility
  SteeringFunctional functional;
  bool accurate;
};

Scored score(const BipartiteState& state, const MeasurementSet& ms, const SeesawConfig& cfg) {
  RobustnessOptions opt;
  opt.solver = cfg.solver;
  const Assemblage a = assemblage_from(state, ms);
  if (cfg.quantity == Quantity::generalized) {
    auto r = generalized_robustness(a, opt);
    return {1.0 / (1.0 + r.value), -1.0, std::move(*r.functional_certificate), r.accurate()};
  }
  opt.eta_max = 100.0;
  auto r = white_noise_robustness(a, opt);
  return {r.eta, r.eta, r.functional_certificate->depolarized(r.eta), r.accurate()};
}

}  // namespace

OptimizationRun seesaw_from(const BipartiteState& state, const MeasurementSet& start, const SeesawConfig& cfg) {
  if (cfg.convergence_delta <= 0) throw InvalidParameter("seesaw: convergence_delta must be positive");
  if (cfg.quantity == Quantity::white_noise_t) throw InvalidParameter("seesaw: quantity must be white_noise or generalized");
  OptimizationRun run;
  run.restarts_used = 1;
  MeasurementSet cur = start;
  Scored s = score(state, cur, cfg);
  run.accurate = s.accurate;
  run.trace.push_back(s.visibility);
  run.evaluations = 1;
  for (int round = 0; round < cfg.max_rounds; ++round) {
    bool acc = true;
    MeasurementSet next =
        best_measurements_for_functional(state, s.functional, cur.n(), cur.k(), cfg.solver, &acc);
    Scored sn = score(state, next, cfg);
    ++run.evaluations;
    run.accurate = run.accurate && acc && sn.accurate;
    if (sn.visibility > s.visibility) {
      // No improvement beyond solver slack: the previous set is a fixed point.
      run.converged = sn.visibility - s.visibility < 1e-6;
      break;
    }
    const double delta = s.visibility - sn.visibility;
    cur = std::move(next);
    s = std::move(sn);
    run.trace.push_back(s.visibility);
    if (delta < cfg.convergence_delta) {
      run.converged = true;
      break;
    }
  }
  for (auto& v : run.trace) v = std::min(v, 1.0);
  run.best_set = cur;
  run.best_value = cfg.quantity == Quantity::generalized ? white_noise_robustness(assemblage_from(state, cur)).eta
                                                         : std::min(s.eta, 1.0);
  run.restart_values.push_back(run.best_value);
  return run;
}

OptimizationRun seesaw(const BipartiteState& state, int n, int k, const SeesawConfig& cfg) {
  if (cfg.restarts < 1) throw InvalidParameter("seesaw: restarts must be at least 1");
  if (n < 1 || k < 1) throw InvalidParameter("seesaw: n and k must be positive");
  if (k > state.dim_a * state.dim_a) throw InvalidParameter("seesaw: k exceeds d^2, extremal POVMs have at most d^2 outcomes");
  return multi_start(
      [&](std::uint64_t seed) {
        std::vector<Povm> povms;
        for (int x = 0; x < n; ++x) povms.push_back(random_povm(state.dim_a, k, derive_seed(seed, x)));
        return seesaw_from(state, MeasurementSet(std::move(povms)), cfg);
      },
      cfg.restarts, cfg.seed, cfg.threads);
}

int family_parameter_count(SearchFamily f, int n) {
  switch (f) {
    case SearchFamily::planar:
      return n - 1;
    case SearchFamily::projective:
      return n < 2 ? 0 : 2 * n - 3;
    case SearchFamily::trine:
    case SearchFamily::sic:
      return 3 * (n - 1);
  }
  return 0;
}

namespace {

Eigen::Matrix3d euler_zyz(double a, double b, double c) {
  using Eigen::AngleAxisd;
  return (AngleAxisd(a, Vector3d::UnitZ()) * AngleAxisd(b, Vector3d::UnitY()) * AngleAxisd(c, Vector3d::UnitZ()))
      .toRotationMatrix();
}

Vector3d spherical(double th, double ph) {
  return Vector3d(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
}

}  // namespace

MeasurementSet family_member(SearchFamily f, int n, const std::vector<double>& p) {
  if (n < 1) throw InvalidParameter("family_member: n must be positive");
  if (static_cast<int>(p.size()) != family_parameter_count(f, n))
    throw InvalidParameter("family_member: wrong number of parameters");
  switch (f) {
    case SearchFamily::planar: {
      std::vector<Vector3d> axes{Vector3d::UnitZ()};
      for (int j = 1; j < n; ++j) axes.emplace_back(std::sin(p[j - 1]), 0.0, std::cos(p[j - 1]));
      return projective_set(axes, FamilyTag::planar);
    }
    case SearchFamily::projective: {
      // First axis on z, second in the x-z plane, the rest free.
      std::vector<Vector3d> axes{Vector3d::UnitZ()};
      if (n >= 2) axes.emplace_back(std::sin(p[0]), 0.0, std::cos(p[0]));
      for (int j = 2; j < n; ++j) axes.push_back(spherical(p[2 * j - 3], p[2 * j - 2]));
      return projective_set(axes, FamilyTag::projective);
    }
    case SearchFamily::trine:
    case SearchFamily::sic: {
      std::vector<Povm> povms;
      for (int j = 0; j < n; ++j) {
        const Eigen::Matrix3d r =
            j == 0 ? Eigen::Matrix3d::Identity() : euler_zyz(p[3 * j - 3], p[3 * j - 2], p[3 * j - 1]);
        povms.push_back(f == SearchFamily::trine ? trine_povm(r) : sic_tetrahedron_povm(r));
      }
      return MeasurementSet(std::move(povms), f == SearchFamily::trine ? FamilyTag::trine : FamilyTag::sic);
    }
  }
  throw InvalidParameter("family_member: unknown family");
}

OptimizationRun parametric_search(const BipartiteState& state, const SearchConfig& cfg, int n) {
  if (state.dim_a != 2) throw UnsupportedScenario("parametric_search: families are qubit measurement families");
  if (cfg.restarts < 1) throw InvalidParameter("parametric_search: restarts must be at least 1");
  const int np = family_parameter_count(cfg.family, n);
  RobustnessOptions ropt;
  ropt.solver = cfg.solver;
  return multi_start(
      [&](std::uint64_t seed) {
        OptimizationRun run;
        run.restarts_used = 1;
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
        std::vector<double> x0(np);
        for (auto& v : x0) v = angle(rng);
        bool accurate = true;
        auto objective = [&](const std::vector<double>& p) {
          const auto r = white_noise_robustness(assemblage_from(state, family_member(cfg.family, n, p)), ropt);
          accurate = accurate && r.accurate();
          return r.eta;
        };
        SimplexResult sr;
        if (np == 0) {
          sr.x = {};
          sr.fx = objective(sr.x);
          sr.evaluations = 1;
          sr.converged = true;
          sr.history = {sr.fx};
        } else {
          sr = nelder_mead(objective, x0, 0.4, cfg.max_evals, cfg.xtol, cfg.ftol);
        }
        for (auto& v : sr.x) v = std::remainder(v, 2.0 * std::numbers::pi);
        run.best_value = sr.fx;
        run.best_params = sr.x;
        run.best_set = family_member(cfg.family, n, sr.x);
        run.trace = std::move(sr.history);
        run.evaluations = sr.evaluations;
        run.converged = sr.converged;
        run.accurate = accurate;
        run.restart_values.push_back(sr.fx);
        return run;
      },
      cfg.restarts, cfg.seed, cfg.threads);
}

OptimizationRun multi_start(const std::function<OptimizationRun(std::uint64_t)>& op, int restarts,
                            std::uint64_t seed, int threads) {
  if (restarts < 1) throw InvalidParameter("multi_start: restarts must be at least 1");
  std::vector<OptimizationRun> runs(restarts);
  std::vector<std::exception_ptr> errors(restarts);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < restarts; i = next++) {
      try {
        runs[i] = op(derive_seed(seed, static_cast<std::uint64_t>(i)));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int nt = std::min(worker_threads(threads), restarts);
  if (nt <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  int best = 0;
  for (int i = 1; i < restarts; ++i)
    if (runs[i].best_value < runs[best].best_value) best = i;
  OptimizationRun out = runs[best];
  out.restart_values.clear();
  out.evaluations = 0;
  out.accurate = true;
  for (const auto& r : runs) {
    out.restart_values.push_back(r.best_value);
    out.evaluations += r.evaluations;
    out.accurate = out.accurate && r.accurate;
  }
  out.restarts_used = restarts;
  return out;
}

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                          double step, int max_evals, double xtol, double ftol) {
  const int n = static_cast<int>(x0.size());
  using Vec = Eigen::VectorXd;
  std::vector<Vec> pts(n + 1, Eigen::Map<Vec>(x0.data(), n));
  for (int i = 0; i < n; ++i) pts[i + 1][i] += step;
  SimplexResult res;
  auto eval = [&](const Vec& v) {
    ++res.evaluations;
    return f(std::vector<double>(v.data(), v.data() + n));
  };
  std::vector<double> fv(n + 1);
  for (int i = 0; i <= n; ++i) fv[i] = eval(pts[i]);
  std::vector<int> order(n + 1);

  while (true) {
    for (int i = 0; i <= n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    const int lo = order[0], hi = order[n], nh = order[n - 1];
    res.history.push_back(fv[lo]);

    double fspread = 0.0, xspread = 0.0;
    for (int i = 0; i <= n; ++i) {
      fspread = std::max(fspread, std::abs(fv[i] - fv[lo]));
      xspread = std::max(xspread, (pts[i] - pts[lo]).cwiseAbs().maxCoeff());
    }
    if (fspread <= ftol && xspread <= xtol) {
      res.converged = true;
      break;
    }
    if (res.evaluations >= max_evals) break;

    Vec centroid = Vec::Zero(n);
    for (int i = 0; i <= n; ++i)
      if (i != hi) centroid += pts[i];
    centroid /= n;

    const Vec xr = centroid + (centroid - pts[hi]);
    const double fr = eval(xr);
    if (fr < fv[lo]) {
      const Vec xe = centroid + 2.0 * (centroid - pts[hi]);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[hi] = xe;
        fv[hi] = fe;
      } else {
        pts[hi] = xr;
        fv[hi] = fr;
      }
      continue;
    }
    if (fr < fv[nh]) {
      pts[hi] = xr;
      fv[hi] = fr;
      continue;
    }
    const bool outside = fr < fv[hi];
    const Vec xc = outside ? Vec(centroid + 0.5 * (xr - centroid)) : Vec(centroid + 0.5 * (pts[hi] - centroid));
    const double fc = eval(xc);
    if (fc < (outside ? fr : fv[hi])) {
      pts[hi] = xc;
      fv[hi] = fc;
      continue;
    }
    for (int i = 0; i <= n; ++i) {
      if (i == lo) continue;
      pts[i] = pts[lo] + 0.5 * (pts[i] - pts[lo]);
      fv[i] = eval(pts[i]);
    }
  }
  const int lo = static_cast<int>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  res.x.assign(pts[lo].data(), pts[lo].data() + n);
  res.fx = fv[lo];
  return res;
}

}  // namespace steerlab
