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

#include "steerlab/robustness.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace steerlab {

using CProblem = sdp::ComplexProblem;
using CMatrix = sdp::Matrix<cplx>;

Assemblage LhsModel::reconstruct(int k, int dim) const {
  Assemblage out(strategies.n(), k, dim);
  std::vector<std::vector<MatrixXcd>> acc(strategies.n(), std::vector<MatrixXcd>(k, MatrixXcd::Zero(dim, dim)));
  for (int l = 0; l < strategies.size(); ++l)
    for (int x = 0; x < strategies.n(); ++x) acc[x][response(x, l)] += sigma[l].matrix();
  for (int x = 0; x < strategies.n(); ++x)
    for (int a = 0; a < k; ++a) out.at(x, a) = HermitianOperator(acc[x][a]);
  return out;
}

LhsModel make_lhs_model(StrategyTable table, std::vector<HermitianOperator> sigma) {
  LhsModel m;
  for (int x = 0; x < table.n(); ++x) {
    std::vector<int> id(table.radix(x));
    for (int j = 0; j < table.radix(x); ++j) id[j] = j;
    m.labels.push_back(std::move(id));
  }
  m.strategies = std::move(table);
  m.sigma = std::move(sigma);
  return m;
}

double SteeringFunctional::value_on(const Assemblage& a) const {
  if (a.n() != n() || a.k() != k()) throw InvalidDimension("SteeringFunctional::value_on: shape mismatch");
  double v = 0.0;
  for (int x = 0; x < n(); ++x)
    for (int o = 0; o < k(); ++o) v += coefficients[x][o].inner(a(x, o));
  return v;
}

SteeringFunctional SteeringFunctional::depolarized(double eta) const {
  SteeringFunctional out = *this;
  for (auto& row : out.coefficients)
    for (auto& f : row) f = depolarize(f, eta);
  return out;
}

const char* to_string(Quantity q) {
  switch (q) {
    case Quantity::white_noise:
      return "white_noise";
    case Quantity::white_noise_t:
      return "white_noise_t";
    case Quantity::generalized:
      return "generalized";
  }
  return "white_noise";
}

Quantity quantity_from_string(const std::string& s) {
  for (auto q : {Quantity::white_noise, Quantity::white_noise_t, Quantity::generalized})
    if (s == to_string(q)) return q;
  throw InvalidParameter("unknown robustness quantity '" + s + "'");
}

namespace {

// Outcomes whose assemblage member is exactly zero force every strategy that
// uses them to carry sigma_lambda = 0, so they are dropped from the programs.
struct Reduced {
  std::vector<std::vector<int>> labels;
  StrategyTable table;
};

Reduced reduce(const Assemblage& a, std::int64_t cap) {
  if (a.signaling() > 1e-7) throw InvalidParameter("assemblage is signaling; robustness programs need a common marginal");
  Reduced r;
  std::vector<int> radix;
  for (int x = 0; x < a.n(); ++x) {
    std::vector<int> keep;
    for (int o = 0; o < a.k(); ++o)
      if (a(x, o).matrix().cwiseAbs().maxCoeff() > 1e-14) keep.push_back(o);
    if (keep.empty()) throw InvalidParameter("assemblage has a measurement with only zero members");
    radix.push_back(static_cast<int>(keep.size()));
    r.labels.push_back(std::move(keep));
  }
  r.table = StrategyTable(radix, cap);
  return r;
}

MatrixXcd noise(const HermitianOperator& s) {
  const int d = s.dim();
  return (s.trace() / d) * MatrixXcd::Identity(d, d);
}

// Expands per-(x, digit) multipliers to a full N x k functional.  Pruned
// outcomes copy the coefficient of the first kept outcome, which keeps every
// strategy sum equal to one of the kept strategy sums.
SteeringFunctional expand_functional(const Assemblage& a, const Reduced& r,
                                     const std::vector<std::vector<MatrixXcd>>& f) {
  SteeringFunctional out;
  for (int x = 0; x < a.n(); ++x) {
    std::vector<HermitianOperator> row(a.k());
    for (int o = 0; o < a.k(); ++o) row[o] = HermitianOperator(f[x][0]);
    for (size_t j = 0; j < r.labels[x].size(); ++j) row[r.labels[x][j]] = HermitianOperator(f[x][j]);
    out.coefficients.push_back(std::move(row));
  }
  return out;
}

// max over strategies of the table of lambda_max(sum_x F_{label|x}).
double reduced_violation(const SteeringFunctional& f, const Reduced& r) {
  const int n = r.table.n();
  const int d = f.coefficients[0][0].dim();
  double worst = -std::numeric_limits<double>::infinity();
  std::vector<MatrixXcd> partial(n + 1, MatrixXcd::Zero(d, d));
  std::function<void(int)> rec = [&](int x) {
    if (x == n) {
      worst = std::max(worst, max_eigenvalue(HermitianOperator(partial[n])));
      return;
    }
    for (int j : r.labels[x]) {
      partial[x + 1] = partial[x] + f.coefficients[x][j].matrix();
      rec(x + 1);
    }
  };
  rec(0);
  return worst;
}

// Shifts every coefficient by -(eps/N) 1 so that all strategy sums become
// negative semidefinite.  The normalization sum Tr(F (sigma - Tr(sigma)1/d))
// is unchanged; the value drops by eps * Tr(rho_B).
void make_valid(SteeringFunctional& f, const Reduced& r) {
  const double eps = reduced_violation(f, r);
  if (eps <= 0.0) return;
  const int d = f.coefficients[0][0].dim();
  const double c = eps / f.n();
  for (auto& row : f.coefficients)
    for (auto& g : row) g = g - HermitianOperator::identity(d) * c;
}

void check_status(const sdp::Solution<cplx>& sol, const char* what) {
  if (sol.status == sdp::Status::infeasible || sol.status == sdp::Status::unbounded)
    throw Error(std::string(what) + ": solver reported " + sdp::to_string(sol.status));
}

}  // namespace

RobustnessResult white_noise_robustness(const Assemblage& a, const RobustnessOptions& opt) {
  const Reduced r = reduce(a, opt.cap);
  const int d = a.dim_b();
  CProblem p;
  std::vector<sdp::BlockRef> blocks;
  for (int l = 0; l < r.table.size(); ++l) blocks.push_back(p.add_psd_block("sigma", d));
  // s = 1 - eta = s_min + s', s' >= 0.
  const double s_min = 1.0 - std::max(1.0, opt.eta_max);
  const auto s = p.add_scalar("s", sdp::ScalarDomain::nonnegative);
  std::vector<std::vector<int>> eq_of(a.n());
  for (int x = 0; x < a.n(); ++x) {
    const int kx = r.table.radix(x);
    eq_of[x].assign(kx, -1);
    for (int j = 0; j < kx; ++j) {
      // The last outcome of every later input follows from input 0's rows.
      if (x > 0 && j == kx - 1) continue;
      const HermitianOperator& sig = a(x, r.labels[x][j]);
      sdp::MatrixExpr<cplx> e(d);
      for (int l = 0; l < r.table.size(); ++l)
        if (r.table.outcome(x, l) == j) e.add(blocks[l], 1.0);
      e.add(s, CMatrix(sig.matrix() - noise(sig)));
      e.add_constant(s_min * (sig.matrix() - noise(sig)) - sig.matrix());
      eq_of[x][j] = p.add_equality(std::move(e));
    }
  }
  sdp::ScalarExpr<cplx> obj;
  obj.add(s, 1.0).add_constant(s_min);
  p.set_objective(obj, sdp::Sense::minimize);
  const auto sol = sdp::solve(p, opt.solver);
  check_status(sol, "white_noise_robustness");

  RobustnessResult res;
  res.quantity = Quantity::white_noise;
  res.status = sol.status;
  res.iterations = sol.iterations;
  res.solver_gap = sol.gap;
  const double s_val = std::clamp(s_min + sol.scalars[s.id], s_min, 1.0);
  res.value = res.eta = 1.0 - s_val;

  LhsModel m;
  m.strategies = r.table;
  m.labels = r.labels;
  for (const auto& b : sol.blocks) m.sigma.emplace_back(b);
  res.lhs_certificate = std::move(m);

  std::vector<std::vector<MatrixXcd>> f(a.n());
  for (int x = 0; x < a.n(); ++x)
    for (int j = 0; j < r.table.radix(x); ++j)
      f[x].push_back(eq_of[x][j] >= 0 ? MatrixXcd(sol.equality_duals[eq_of[x][j]]) : MatrixXcd::Zero(d, d));
  SteeringFunctional fn = expand_functional(a, r, f);
  make_valid(fn, r);
  res.functional_value = fn.value_on(a);
  res.functional_certificate = std::move(fn);
  return res;
}

RobustnessResult white_noise_robustness_t(const Assemblage& a, const RobustnessOptions& opt) {
  const Reduced r = reduce(a, opt.cap);
  const int d = a.dim_b();
  CProblem p;
  std::vector<sdp::BlockRef> blocks;
  for (int l = 0; l < r.table.size(); ++l) blocks.push_back(p.add_psd_block("sigma", d));
  const auto t = p.add_scalar("t", sdp::ScalarDomain::nonnegative);
  std::vector<std::vector<int>> eq_of(a.n());
  for (int x = 0; x < a.n(); ++x) {
    const int kx = r.table.radix(x);
    eq_of[x].assign(kx, -1);
    for (int j = 0; j < kx; ++j) {
      if (x > 0 && j == kx - 1) continue;
      const HermitianOperator& sig = a(x, r.labels[x][j]);
      sdp::MatrixExpr<cplx> e(d);
      for (int l = 0; l < r.table.size(); ++l)
        if (r.table.outcome(x, l) == j) e.add(blocks[l], 1.0);
      e.add(t, CMatrix(-noise(sig)));
      e.add_constant(-sig.matrix());
      eq_of[x][j] = p.add_equality(std::move(e));
    }
  }
  sdp::ScalarExpr<cplx> obj;
  obj.add(t, 1.0);
  p.set_objective(obj, sdp::Sense::minimize);
  const auto sol = sdp::solve(p, opt.solver);
  check_status(sol, "white_noise_robustness_t");

  RobustnessResult res;
  res.quantity = Quantity::white_noise_t;
  res.status = sol.status;
  res.iterations = sol.iterations;
  res.solver_gap = sol.gap;
  const double tv = std::max(0.0, sol.scalars[t.id]);
  res.value = tv;
  res.eta = 1.0 / (1.0 + tv);

  LhsModel m;
  m.strategies = r.table;
  m.labels = r.labels;
  for (const auto& b : sol.blocks) m.sigma.push_back(HermitianOperator(b) * (1.0 / (1.0 + tv)));
  res.lhs_certificate = std::move(m);

  std::vector<std::vector<MatrixXcd>> f(a.n());
  for (int x = 0; x < a.n(); ++x)
    for (int j = 0; j < r.table.radix(x); ++j)
      f[x].push_back(eq_of[x][j] >= 0 ? MatrixXcd(sol.equality_duals[eq_of[x][j]]) : MatrixXcd::Zero(d, d));
  SteeringFunctional fn = expand_functional(a, r, f);
  make_valid(fn, r);
  res.functional_value = fn.value_on(a);
  res.functional_certificate = std::move(fn);
  return res;
}

RobustnessResult generalized_robustness(const Assemblage& a, const RobustnessOptions& opt) {
  const Reduced r = reduce(a, opt.cap);
  const int d = a.dim_b();
  CProblem p;
  std::vector<sdp::BlockRef> blocks;
  for (int l = 0; l < r.table.size(); ++l) blocks.push_back(p.add_psd_block("sigma", d));
  std::vector<std::vector<int>> eq_of(a.n());
  for (int x = 0; x < a.n(); ++x) {
    for (int j = 0; j < r.table.radix(x); ++j) {
      const auto slack = p.add_psd_block("excess", d);
      sdp::MatrixExpr<cplx> e(d);
      for (int l = 0; l < r.table.size(); ++l)
        if (r.table.outcome(x, l) == j) e.add(blocks[l], 1.0);
      e.add(slack, -1.0);
      e.add_constant(-a(x, r.labels[x][j]).matrix());
      eq_of[x].push_back(p.add_equality(std::move(e)));
    }
  }
  sdp::ScalarExpr<cplx> obj;
  for (const auto& b : blocks) obj.add(b, CMatrix::Identity(d, d));
  obj.add_constant(-1.0);
  p.set_objective(obj, sdp::Sense::minimize);
  const auto sol = sdp::solve(p, opt.solver);
  check_status(sol, "generalized_robustness");

  RobustnessResult res;
  res.quantity = Quantity::generalized;
  res.status = sol.status;
  res.iterations = sol.iterations;
  res.solver_gap = sol.gap;
  res.value = std::max(0.0, sol.objective_value);
  res.eta = 1.0 / (1.0 + res.value);

  LhsModel m;
  m.strategies = r.table;
  m.labels = r.labels;
  for (int l = 0; l < r.table.size(); ++l) m.sigma.emplace_back(sol.blocks[l]);
  res.lhs_certificate = std::move(m);

  // Multipliers Y satisfy Y >= 0 and sum_x D Y <= 1; Y - 1/N is a functional
  // in the common sign convention, with value R on the assemblage.
  std::vector<std::vector<MatrixXcd>> f(a.n());
  const double shift = 1.0 / a.n();
  for (int x = 0; x < a.n(); ++x)
    for (int j = 0; j < r.table.radix(x); ++j)
      f[x].push_back(MatrixXcd(sol.equality_duals[eq_of[x][j]]) - shift * MatrixXcd::Identity(d, d));
  SteeringFunctional fn = expand_functional(a, r, f);
  make_valid(fn, r);
  res.functional_value = fn.value_on(a);
  res.functional_certificate = std::move(fn);
  return res;
}

std::pair<SteeringFunctional, double> steering_functional(const Assemblage& a, const RobustnessOptions& opt) {
  auto r = white_noise_robustness(a, opt);
  return {std::move(*r.functional_certificate), r.functional_value};
}

std::pair<SteeringFunctional, double> steering_functional_explicit(const Assemblage& a,
                                                                   const RobustnessOptions& opt) {
  const Reduced r = reduce(a, opt.cap);
  const int d = a.dim_b();
  CProblem p;
  // F_{last|x} = 0 for x > 0 fixes the gauge F_{a|x} -> F_{a|x} + G_x,
  // sum_x G_x = 0, which leaves the program invariant.
  std::vector<std::vector<std::optional<sdp::MatrixVar<cplx>>>> f(a.n());
  for (int x = 0; x < a.n(); ++x) {
    const int kx = r.table.radix(x);
    for (int j = 0; j < kx; ++j) {
      if (x > 0 && j == kx - 1)
        f[x].emplace_back();
      else
        f[x].emplace_back(p.add_matrix_variable("F", d));
    }
  }
  for (int l = 0; l < r.table.size(); ++l) {
    sdp::MatrixExpr<cplx> e(d);
    bool any = false;
    for (int x = 0; x < a.n(); ++x)
      if (const auto& v = f[x][r.table.outcome(x, l)]) {
        e.add(*v, 1.0);
        any = true;
      }
    if (any) p.add_lmi(std::move(e), sdp::LmiSense::nsd);
  }
  // 1 - sum Tr(F (sigma - Tr(sigma) 1/d)) - w = 0, w >= 0.
  const auto w = p.add_scalar("w", sdp::ScalarDomain::nonnegative);
  sdp::ScalarExpr<cplx> norm, obj;
  norm.add_constant(1.0).add(w, -1.0);
  for (int x = 0; x < a.n(); ++x)
    for (int j = 0; j < r.table.radix(x); ++j)
      if (const auto& v = f[x][j]) {
        const HermitianOperator& sig = a(x, r.labels[x][j]);
        norm.add(*v, CMatrix(-(sig.matrix() - noise(sig))));
        obj.add(*v, CMatrix(sig.matrix()));
      }
  p.add_equality(std::move(norm));
  p.set_objective(obj, sdp::Sense::maximize);
  const auto sol = sdp::solve(p, opt.solver);
  check_status(sol, "steering_functional_explicit");

  std::vector<std::vector<MatrixXcd>> fm(a.n());
  for (int x = 0; x < a.n(); ++x)
    for (const auto& v : f[x]) fm[x].push_back(v ? MatrixXcd(sol.value(*v)) : MatrixXcd::Zero(d, d));
  SteeringFunctional fn = expand_functional(a, r, fm);
  make_valid(fn, r);
  const double value = fn.value_on(a);
  return {std::move(fn), value};
}

MeasurementSet best_measurements_for_functional(const BipartiteState& state, const SteeringFunctional& f, int n,
                                                int k, const sdp::Options& opt, bool* accurate) {
  if (f.n() != n || f.k() != k) throw InvalidDimension("best_measurements_for_functional: functional shape mismatch");
  if (f.coefficients[0][0].dim() != state.dim_b)
    throw InvalidDimension("best_measurements_for_functional: functional acts on the wrong dimension");
  const int da = state.dim_a, db = state.dim_b;
  if (accurate) *accurate = true;
  std::vector<Povm> povms;
  for (int x = 0; x < n; ++x) {
    CProblem p;
    std::vector<sdp::BlockRef> m;
    sdp::MatrixExpr<cplx> sum(da);
    sdp::ScalarExpr<cplx> obj;
    for (int a = 0; a < k; ++a) {
      m.push_back(p.add_psd_block("M", da));
      sum.add(m.back(), 1.0);
      // Tr((M (x) F) rho) = Tr(M G), G = Tr_B((1 (x) F) rho).
      const MatrixXcd g = trace_out_second(kron(MatrixXcd::Identity(da, da), f.coefficients[x][a].matrix()) *
                                               state.rho.matrix(), da, db);
      obj.add(m.back(), CMatrix(0.5 * (g + g.adjoint())));
    }
    sum.add_constant(-CMatrix::Identity(da, da));
    p.add_equality(std::move(sum));
    p.set_objective(obj, sdp::Sense::maximize);
    const auto sol = sdp::solve(p, opt);
    check_status(sol, "best_measurements_for_functional");
    if (accurate && sol.status != sdp::Status::optimal) *accurate = false;

    // Renormalize so the elements sum to the identity exactly.
    MatrixXcd total = MatrixXcd::Zero(da, da);
    for (const auto& b : sol.blocks) total += b;
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (total + total.adjoint()));
    const MatrixXcd w = es.eigenvectors() * es.eigenvalues().cwiseMax(1e-300).cwiseInverse().cwiseSqrt().asDiagonal() *
                        es.eigenvectors().adjoint();
    Povm povm{da, {}};
    for (const auto& b : sol.blocks) {
      // Clip tiny negative eigenvalues left by the solver.
      Eigen::SelfAdjointEigenSolver<MatrixXcd> eb(w * b * w.adjoint());
      const MatrixXcd clipped =
          eb.eigenvectors() * eb.eigenvalues().cwiseMax(0.0).asDiagonal() * eb.eigenvectors().adjoint();
      povm.elements.emplace_back(clipped);
    }
    povms.push_back(std::move(povm));
  }
  return MeasurementSet(std::move(povms), FamilyTag::general);
}

double lhs_reconstruction_residual(const LhsModel& m, const Assemblage& target) {
  if (m.strategies.n() != target.n()) return std::numeric_limits<double>::infinity();
  if (static_cast<int>(m.sigma.size()) != m.strategies.size()) return std::numeric_limits<double>::infinity();
  const Assemblage rec = m.reconstruct(target.k(), target.dim_b());
  double worst = 0.0;
  for (int x = 0; x < target.n(); ++x)
    for (int a = 0; a < target.k(); ++a)
      worst = std::max(worst, (rec(x, a).matrix() - target(x, a).matrix()).cwiseAbs().maxCoeff());
  return worst;
}

double lhs_positivity_violation(const LhsModel& m) {
  double worst = 0.0;
  for (const auto& s : m.sigma) worst = std::max(worst, -min_eigenvalue(s));
  return worst;
}

double functional_lhs_violation(const SteeringFunctional& f) {
  Reduced r;
  std::vector<int> radix;
  for (int x = 0; x < f.n(); ++x) {
    std::vector<int> all(f.k());
    for (int a = 0; a < f.k(); ++a) all[a] = a;
    r.labels.push_back(std::move(all));
    radix.push_back(f.k());
  }
  r.table = StrategyTable(radix, std::int64_t{1} << 24);
  return reduced_violation(f, r);
}

CertificateReport verify_certificates(const RobustnessResult& r, const Assemblage& a) {
  CertificateReport rep;
  std::ostringstream msg;
  if (r.lhs_certificate) {
    const LhsModel& m = *r.lhs_certificate;
    rep.positivity_violation = lhs_positivity_violation(m);
    if (rep.positivity_violation > kPsdTol) msg << "sigma_lambda not PSD (" << rep.positivity_violation << "); ";
    if (r.quantity == Quantity::generalized) {
      // The model must dominate the assemblage and carry total weight 1 + R.
      const Assemblage rec = m.reconstruct(a.k(), a.dim_b());
      double worst = 0.0, weight = 0.0;
      for (int x = 0; x < a.n(); ++x)
        for (int o = 0; o < a.k(); ++o) worst = std::max(worst, -min_eigenvalue(rec(x, o) - a(x, o)));
      for (const auto& s : m.sigma) weight += s.trace();
      rep.reconstruction_residual = std::max(worst, std::abs(weight - (1.0 + r.value)));
    } else {
      rep.reconstruction_residual = lhs_reconstruction_residual(m, depolarize(a, r.eta));
    }
    if (rep.reconstruction_residual > kReconstructionTol)
      msg << "LHS reconstruction residual " << rep.reconstruction_residual << "; ";
  }
  if (r.functional_certificate) {
    rep.functional_violation = functional_lhs_violation(*r.functional_certificate);
    if (rep.functional_violation > kPsdTol) msg << "functional violated by an LHS strategy (" << rep.functional_violation << "); ";
    const double v = r.functional_certificate->value_on(a);
    const double expected = r.quantity == Quantity::white_noise ? 1.0 - r.value : r.value;
    rep.duality_mismatch = std::abs(v - expected);
    if (rep.duality_mismatch > 1e-6) msg << "functional value " << v << " differs from " << expected << "; ";
  }
  rep.message = msg.str();
  rep.ok = rep.message.empty();
  return rep;
}

}  // namespace steerlab
