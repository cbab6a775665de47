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

#include "steerlab/scenario.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "steerlab/point_sets.hpp"

namespace steerlab {

double Povm::violation() const {
  if (elements.empty()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  MatrixXcd sum = MatrixXcd::Zero(dim, dim);
  for (const auto& e : elements) {
    if (e.dim() != dim) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, -min_eigenvalue(e));
    sum += e.matrix();
  }
  return std::max(worst, (sum - MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff());
}

const char* to_string(FamilyTag t) {
  switch (t) {
    case FamilyTag::planar:
      return "planar";
    case FamilyTag::projective:
      return "projective";
    case FamilyTag::trine:
      return "trine";
    case FamilyTag::sic:
      return "sic";
    case FamilyTag::mub:
      return "mub";
    case FamilyTag::thomson:
      return "thomson";
    case FamilyTag::fibonacci:
      return "fibonacci";
    case FamilyTag::general:
      return "general";
    case FamilyTag::quasi:
      return "quasi";
  }
  return "general";
}

FamilyTag family_from_string(const std::string& s) {
  for (auto t : {FamilyTag::planar, FamilyTag::projective, FamilyTag::trine, FamilyTag::sic, FamilyTag::mub,
                 FamilyTag::thomson, FamilyTag::fibonacci, FamilyTag::general, FamilyTag::quasi})
    if (s == to_string(t)) return t;
  throw InvalidParameter("unknown measurement family '" + s + "'");
}

MeasurementSet::MeasurementSet(std::vector<Povm> povms, FamilyTag tag) : povms_(std::move(povms)), tag_(tag) {
  if (povms_.empty()) throw InvalidParameter("MeasurementSet: no measurements");
  dim_ = povms_.front().dim;
  for (const auto& p : povms_) {
    if (p.dim != dim_) throw InvalidDimension("MeasurementSet: POVMs act on different dimensions");
    for (const auto& e : p.elements)
      if (e.dim() != dim_) throw InvalidDimension("MeasurementSet: element dimension mismatch");
    k_ = std::max(k_, p.outcomes());
  }
  for (auto& p : povms_)
    while (p.outcomes() < k_) p.elements.push_back(HermitianOperator::zero(dim_));
}

std::string MeasurementSet::check(double tol) const {
  std::ostringstream err;
  for (int x = 0; x < n(); ++x) {
    if (tag_ != FamilyTag::quasi) {
      const double v = povms_[x].violation();
      if (v > tol) err << "measurement " << x << " is not a POVM (violation " << v << "); ";
    } else {
      MatrixXcd sum = MatrixXcd::Zero(dim_, dim_);
      for (const auto& e : povms_[x].elements) sum += e.matrix();
      if ((sum - MatrixXcd::Identity(dim_, dim_)).cwiseAbs().maxCoeff() > tol)
        err << "quasi-measurement " << x << " does not sum to the identity; ";
    }
    const bool projective_like = tag_ == FamilyTag::projective || tag_ == FamilyTag::planar ||
                                 tag_ == FamilyTag::mub || tag_ == FamilyTag::thomson ||
                                 tag_ == FamilyTag::fibonacci;
    if (projective_like) {
      for (int a = 0; a < k_; ++a) {
        const MatrixXcd& m = element(x, a).matrix();
        if ((m * m - m).cwiseAbs().maxCoeff() > 1e-7) err << "element (" << x << "," << a << ") is not a projector; ";
      }
    }
    if (tag_ == FamilyTag::planar) {
      if (dim_ != 2) {
        err << "planar sets are qubit sets; ";
      } else {
        for (int a = 0; a < k_; ++a)
          if (std::abs(operator_to_bloch(element(x, a)).v.y()) > 1e-7)
            err << "element (" << x << "," << a << ") leaves the x-z plane; ";
      }
    }
  }
  return err.str();
}

MeasurementSet MeasurementSet::with_tag(FamilyTag t) const {
  MeasurementSet m = *this;
  m.tag_ = t;
  return m;
}

MeasurementSet MeasurementSet::conjugated(const MatrixXcd& u) const {
  std::vector<Povm> out = povms_;
  for (auto& p : out)
    for (auto& e : p.elements) e = e.conjugated(u);
  FamilyTag t = tag_ == FamilyTag::planar ? FamilyTag::projective : tag_;
  return MeasurementSet(std::move(out), t);
}

BipartiteState::BipartiteState(int da, int db, HermitianOperator r) : dim_a(da), dim_b(db), rho(std::move(r)) {
  if (da < 1 || db < 1 || rho.dim() != da * db)
    throw InvalidDimension("BipartiteState: rho has dim " + std::to_string(rho.dim()) + ", expected " +
                           std::to_string(da) + "x" + std::to_string(db));
  if (std::abs(rho.trace() - 1.0) > kValidityTol) throw InvalidParameter("BipartiteState: trace is not 1");
  if (!is_psd(rho, kValidityTol)) throw InvalidParameter("BipartiteState: rho is not positive semidefinite");
}

Assemblage::Assemblage(int n, int k, int dim_b) : n_(n), k_(k), dim_(dim_b) {
  members_.assign(static_cast<size_t>(n) * k, HermitianOperator::zero(dim_b));
}

Assemblage::Assemblage(const std::vector<std::vector<HermitianOperator>>& members) {
  if (members.empty() || members.front().empty()) throw InvalidParameter("Assemblage: empty member grid");
  n_ = static_cast<int>(members.size());
  k_ = static_cast<int>(members.front().size());
  dim_ = members.front().front().dim();
  for (const auto& row : members) {
    if (static_cast<int>(row.size()) != k_) throw InvalidDimension("Assemblage: ragged member grid");
    for (const auto& m : row) {
      if (m.dim() != dim_) throw InvalidDimension("Assemblage: member dimension mismatch");
      members_.push_back(m);
    }
  }
}

HermitianOperator Assemblage::marginal(int x) const {
  HermitianOperator s = HermitianOperator::zero(dim_);
  for (int a = 0; a < k_; ++a) s += (*this)(x, a);
  return s;
}

double Assemblage::signaling() const {
  if (n_ == 0) return 0.0;
  const HermitianOperator m0 = marginal(0);
  double worst = 0.0;
  for (int x = 1; x < n_; ++x) worst = std::max(worst, (marginal(x) - m0).norm());
  return worst;
}

double Assemblage::positivity_violation() const {
  double worst = 0.0;
  for (const auto& m : members_) worst = std::max(worst, -min_eigenvalue(m));
  return worst;
}

StrategyTable::StrategyTable(std::vector<int> radix, std::int64_t cap) : radix_(std::move(radix)) {
  std::int64_t size = 1;
  for (int r : radix_) {
    if (r < 1) throw InvalidParameter("StrategyTable: outcome count must be positive");
    stride_.push_back(static_cast<int>(size));
    size *= r;
    if (size > cap)
      throw ScenarioTooLarge("StrategyTable: number of deterministic strategies exceeds the cap of " +
                             std::to_string(cap));
  }
  size_ = static_cast<int>(size);
}

int StrategyTable::index_of(const std::vector<int>& outcomes) const {
  int lambda = 0;
  for (int x = 0; x < n(); ++x) lambda += outcomes.at(x) * stride_[x];
  return lambda;
}

StrategyTable deterministic_strategies(int n, int k, std::int64_t cap) {
  if (n < 1 || k < 1) throw InvalidParameter("deterministic_strategies: n and k must be positive");
  return StrategyTable(std::vector<int>(n, k), cap);
}

BipartiteState make_max_entangled(int d) {
  if (d < 2) throw InvalidDimension("make_max_entangled: d must be at least 2");
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(d * d);
  for (int i = 0; i < d; ++i) psi(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
  return BipartiteState(d, d, HermitianOperator::projector(psi));
}

BipartiteState make_isotropic(int d, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidParameter("make_isotropic: eta must lie in [0, 1]");
  const auto phi = make_max_entangled(d);
  return BipartiteState(d, d, phi.rho * eta + HermitianOperator::identity(d * d) * ((1.0 - eta) / (d * d)));
}

BipartiteState make_werner_qubit(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidParameter("make_werner_qubit: eta must lie in [0, 1]");
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
  psi(1) = 1.0 / std::sqrt(2.0);
  psi(2) = -1.0 / std::sqrt(2.0);
  return BipartiteState(2, 2, HermitianOperator::projector(psi) * eta + HermitianOperator::identity(4) * ((1.0 - eta) / 4));
}

BipartiteState make_product(const HermitianOperator& rho_a, const HermitianOperator& rho_b) {
  return BipartiteState(rho_a.dim(), rho_b.dim(), tensor(rho_a, rho_b));
}

Povm projective_from_bloch(const Vector3d& v) {
  if (std::abs(v.norm() - 1.0) > kValidityTol) throw InvalidParameter("projective_from_bloch: Bloch vector is not a unit vector");
  return Povm{2, {bloch_to_operator({0.5, 0.5 * v}), bloch_to_operator({0.5, -0.5 * v})}};
}

Povm projective_from_basis(const MatrixXcd& u) {
  Povm p{static_cast<int>(u.rows()), {}};
  for (int j = 0; j < u.cols(); ++j) p.elements.push_back(HermitianOperator::projector(u.col(j)));
  return p;
}

MeasurementSet projective_set(const std::vector<Vector3d>& axes, FamilyTag tag) {
  std::vector<Povm> povms;
  for (const auto& v : axes) povms.push_back(projective_from_bloch(v.normalized()));
  return MeasurementSet(std::move(povms), tag);
}

MeasurementSet equally_spaced_planar(int n) {
  if (n < 1) throw InvalidParameter("equally_spaced_planar: n must be positive");
  std::vector<Vector3d> axes;
  for (int j = 0; j < n; ++j) {
    const double th = j * std::numbers::pi / n;
    axes.emplace_back(std::sin(th), 0.0, std::cos(th));
  }
  return projective_set(axes, FamilyTag::planar);
}

namespace {

void check_rotation(const Eigen::Matrix3d& r) {
  if ((r * r.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-9 || r.determinant() < 0)
    throw InvalidParameter("rotation argument is not a proper rotation");
}

Povm rank_one_povm(const std::vector<Vector3d>& dirs, const Eigen::Matrix3d& rotation) {
  check_rotation(rotation);
  const double w = 1.0 / static_cast<double>(dirs.size());
  Povm p{2, {}};
  for (const auto& u : dirs) p.elements.push_back(bloch_to_operator({w, w * (rotation * u)}));
  return p;
}

}  // namespace

Povm trine_povm(const Eigen::Matrix3d& rotation) {
  std::vector<Vector3d> dirs;
  for (int i = 0; i < 3; ++i) {
    const double th = 2.0 * std::numbers::pi * i / 3.0;
    dirs.emplace_back(std::sin(th), 0.0, std::cos(th));
  }
  return rank_one_povm(dirs, rotation);
}

Povm sic_tetrahedron_povm(const Eigen::Matrix3d& rotation) {
  std::vector<Vector3d> dirs{Vector3d(0, 0, 1)};
  const double s = 2.0 * std::sqrt(2.0) / 3.0;
  for (int i = 0; i < 3; ++i) {
    const double ph = 2.0 * std::numbers::pi * i / 3.0;
    dirs.emplace_back(s * std::cos(ph), s * std::sin(ph), -1.0 / 3.0);
  }
  return rank_one_povm(dirs, rotation);
}

namespace {

// Eigenbasis of a Hermitian matrix with nondegenerate spectrum, columns in
// ascending eigenvalue order.
MatrixXcd eigenbasis(const MatrixXcd& h) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
  return es.eigenvectors();
}

std::vector<MatrixXcd> qubit_mubs() {
  return {MatrixXcd::Identity(2, 2), eigenbasis(pauli_x()), eigenbasis(pauli_y())};
}

// Computational basis followed by the d quadratic-phase Fourier bases.
std::vector<MatrixXcd> prime_mubs(int d) {
  std::vector<MatrixXcd> out{MatrixXcd::Identity(d, d)};
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (int r = 0; r < d; ++r) {
    MatrixXcd b(d, d);
    for (int j = 0; j < d; ++j)
      for (int l = 0; l < d; ++l) {
        const double ph = 2.0 * std::numbers::pi * static_cast<double>((r * l * l + j * l) % d) / d;
        b(l, j) = norm * std::polar(1.0, ph);
      }
    out.push_back(b);
  }
  return out;
}

// Two-qubit MUBs: common eigenbases of the five maximal commuting classes of
// Pauli operators.
std::vector<MatrixXcd> two_qubit_mubs() {
  const MatrixXcd i2 = MatrixXcd::Identity(2, 2);
  const MatrixXcd& x = pauli_x();
  const MatrixXcd& y = pauli_y();
  const MatrixXcd& z = pauli_z();
  const std::vector<std::pair<MatrixXcd, MatrixXcd>> classes{
      {kron(z, i2), kron(i2, z)}, {kron(x, i2), kron(i2, x)}, {kron(y, i2), kron(i2, y)},
      {kron(x, y), kron(y, z)},   {kron(y, x), kron(z, y)},
  };
  std::vector<MatrixXcd> out;
  for (const auto& [p, q] : classes) out.push_back(eigenbasis(p + 2.0 * q));
  return out;
}

}  // namespace

std::vector<MatrixXcd> mub_basis_matrices(int d, int count) {
  const int max_count = d == 6 ? 3 : d + 1;
  if (d < 2 || d > 6 || count < 1 || count > max_count)
    throw UnsupportedScenario("mub_bases: unsupported (d, count) = (" + std::to_string(d) + ", " +
                              std::to_string(count) + ")");
  std::vector<MatrixXcd> all;
  if (d == 2) {
    all = qubit_mubs();
  } else if (d == 3 || d == 5) {
    all = prime_mubs(d);
  } else if (d == 4) {
    all = two_qubit_mubs();
  } else {
    // Products of qubit and qutrit MUBs.
    const auto a = qubit_mubs();
    const auto b = prime_mubs(3);
    for (int j = 0; j < 3; ++j) all.push_back(kron(a[j], b[j]));
  }
  all.resize(count);
  return all;
}

MeasurementSet mub_bases(int d, int count) {
  std::vector<Povm> povms;
  for (const auto& b : mub_basis_matrices(d, count)) povms.push_back(projective_from_basis(b));
  return MeasurementSet(std::move(povms), FamilyTag::mub);
}

MeasurementSet thomson_set(int n) { return projective_set(thomson_axes(n), FamilyTag::thomson); }

MeasurementSet fibonacci_set(int n) { return projective_set(fibonacci_axes(n), FamilyTag::fibonacci); }

Assemblage assemblage_from(const BipartiteState& state, const MeasurementSet& ms) {
  if (ms.dim() != state.dim_a)
    throw InvalidDimension("assemblage_from: measurements act on dim " + std::to_string(ms.dim()) +
                           " but Alice's system has dim " + std::to_string(state.dim_a));
  const int da = state.dim_a, db = state.dim_b;
  Assemblage out(ms.n(), ms.k(), db);
  const MatrixXcd& rho = state.rho.matrix();
  for (int x = 0; x < ms.n(); ++x) {
    for (int a = 0; a < ms.k(); ++a) {
      // Tr_A((M (x) 1) rho) = sum_ij M_ji rho_(i,j) blocks.
      const MatrixXcd& m = ms.element(x, a).matrix();
      MatrixXcd s = MatrixXcd::Zero(db, db);
      for (int i = 0; i < da; ++i)
        for (int j = 0; j < da; ++j)
          if (m(j, i) != cplx(0)) s += m(j, i) * rho.block(i * db, j * db, db, db);
      out.at(x, a) = HermitianOperator(s);
    }
  }
  return out;
}

Assemblage depolarize(const Assemblage& a, double eta) {
  Assemblage out = a;
  for (int x = 0; x < a.n(); ++x)
    for (int o = 0; o < a.k(); ++o) out.at(x, o) = depolarize(a(x, o), eta);
  return out;
}

MeasurementSet depolarize_measurements(const MeasurementSet& ms, double eta) {
  std::vector<Povm> out = ms.povms();
  for (auto& p : out)
    for (auto& e : p.elements) e = depolarize(e, eta);
  return MeasurementSet(std::move(out), FamilyTag::general);
}

}  // namespace steerlab
