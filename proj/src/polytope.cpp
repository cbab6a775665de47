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

#include "steerlab/polytope.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>
#include <thread>

#include "steerlab/optimizers.hpp"

namespace steerlab {

using Eigen::Matrix3d;

const char* to_string(PolytopeMode m) { return m == PolytopeMode::circle ? "circle" : "sphere"; }

PolytopeMode polytope_mode_from_string(const std::string& s) {
  if (s == "circle") return PolytopeMode::circle;
  if (s == "sphere") return PolytopeMode::sphere;
  throw InvalidParameter("unknown polytope mode '" + s + "'");
}

const char* to_string(Covariance c) {
  switch (c) {
    case Covariance::none: return "none";
    case Covariance::unitary: return "unitary";
    case Covariance::conjugate: return "conjugate";
  }
  return "?";
}

double SpherePolytope::circumradius() const {
  double r = 0.0;
  for (const auto& v : vertices) r = std::max(r, v.norm());
  return r;
}

std::vector<std::pair<int, double>> SpherePolytope::decompose(const Vector3d& u) const {
  if (u.norm() > 1.0 + 1e-9) throw InvalidParameter("SpherePolytope::decompose: vector outside the unit ball");
  if (mode == PolytopeMode::circle && std::abs(u.y()) > 1e-9)
    throw InvalidParameter("SpherePolytope::decompose: circle polytopes live in the x-z plane");
  std::vector<std::pair<int, double>> out;
  const double r = u.norm();
  if (r < 1e-15) return {{0, 0.5}, {antipode(0), 0.5}};

  // The ray through u leaves the polytope through the facet maximizing w.u / h.
  int best = 0;
  double s = -1.0;
  for (size_t f = 0; f < faces.size(); ++f) {
    const double sf = facet_normals[f].dot(u) / facet_offsets[f];
    if (sf > s) {
      s = sf;
      best = static_cast<int>(f);
    }
  }
  const Vector3d p = u / s;
  const auto& face = faces[best];
  Eigen::VectorXd c;
  if (mode == PolytopeMode::circle) {
    Eigen::Matrix2d m;
    m << vertices[face[0]].x(), vertices[face[1]].x(), vertices[face[0]].z(), vertices[face[1]].z();
    c = m.colPivHouseholderQr().solve(Eigen::Vector2d(p.x(), p.z()));
  } else {
    Matrix3d m;
    for (int i = 0; i < 3; ++i) m.col(i) = vertices[face[i]];
    c = m.colPivHouseholderQr().solve(p);
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    c[i] = std::max(0.0, c[i]);
    total += c[i];
  }
  std::map<int, double> w;
  for (Eigen::Index i = 0; i < c.size(); ++i)
    if (c[i] > 0.0) w[face[i]] += s * c[i] / total;
  // The rest of the weight sits at the center, the midpoint of an antipodal pair.
  if (s < 1.0) {
    w[0] += 0.5 * (1.0 - s);
    w[antipode(0)] += 0.5 * (1.0 - s);
  }
  out.assign(w.begin(), w.end());
  return out;
}

void SpherePolytope::write_off(std::ostream& os) const {
  os << "OFF\n";
  if (mode == PolytopeMode::circle) {
    os << vertices.size() << " 1 0\n";
  } else {
    os << vertices.size() << ' ' << faces.size() << " 0\n";
  }
  os.precision(17);
  for (const auto& v : vertices) os << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  if (mode == PolytopeMode::circle) {
    os << vertices.size();
    for (size_t i = 0; i < vertices.size(); ++i) os << ' ' << i;
    os << '\n';
  } else {
    for (const auto& f : faces) os << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
  }
}

namespace {

SpherePolytope circle_polytope(int m) {
  if (m < 2) throw InvalidParameter("circle polytope needs m >= 2");
  SpherePolytope p;
  p.mode = PolytopeMode::circle;
  p.refinement = m;
  const double r = 1.0 / std::cos(std::numbers::pi / (2.0 * m));
  for (int j = 0; j < 2 * m; ++j) {
    const double t = j * std::numbers::pi / m;
    p.vertices.emplace_back(r * std::sin(t), 0.0, r * std::cos(t));
  }
  for (int j = 0; j < 2 * m; ++j) {
    const int k = (j + 1) % (2 * m);
    const double t = (j + 0.5) * std::numbers::pi / m;
    const Vector3d w(std::sin(t), 0.0, std::cos(t));
    p.faces.push_back({j, k});
    p.facet_normals.push_back(w);
    p.facet_offsets.push_back(w.dot(p.vertices[j]));
  }
  return p;
}

SpherePolytope sphere_polytope(int refinement) {
  if (refinement < 1 || refinement > 5) throw InvalidParameter("sphere polytope refinement must lie in [1, 5]");
  const double phi = 0.5 * (1.0 + std::sqrt(5.0));
  std::vector<Vector3d> v;
  for (double a : {-1.0, 1.0})
    for (double b : {-phi, phi}) {
      v.emplace_back(0.0, a, b);
      v.emplace_back(a, b, 0.0);
      v.emplace_back(b, 0.0, a);
    }
  // Rotate about x so that (0, 1, phi) lands on +z.
  const Matrix3d rx = Eigen::AngleAxisd(std::atan2(1.0, phi), Vector3d::UnitX()).toRotationMatrix();
  for (auto& x : v) x = (rx * x).normalized();

  std::vector<std::array<int, 3>> tri;
  const int n0 = static_cast<int>(v.size());
  double edge = 1e9;
  for (int i = 0; i < n0; ++i)
    for (int j = i + 1; j < n0; ++j) edge = std::min(edge, (v[i] - v[j]).norm());
  auto adjacent = [&](int i, int j) { return std::abs((v[i] - v[j]).norm() - edge) < 1e-9; };
  for (int i = 0; i < n0; ++i)
    for (int j = i + 1; j < n0; ++j)
      for (int k = j + 1; k < n0; ++k)
        if (adjacent(i, j) && adjacent(j, k) && adjacent(i, k)) tri.push_back({i, j, k});

  for (int level = 1; level < refinement; ++level) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      const int id = static_cast<int>(v.size()) - 1;
      mid.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    for (const auto& t : tri) {
      const int ab = midpoint(t[0], t[1]), bc = midpoint(t[1], t[2]), ca = midpoint(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    tri = std::move(next);
  }

  // Representatives first, antipodes second.
  const int nv = static_cast<int>(v.size());
  auto positive = [](const Vector3d& x) {
    if (std::abs(x.z()) > 1e-9) return x.z() > 0;
    if (std::abs(x.x()) > 1e-9) return x.x() > 0;
    return x.y() > 0;
  };
  std::vector<int> order;
  for (int i = 0; i < nv; ++i)
    if (positive(v[i])) order.push_back(i);
  const int half = static_cast<int>(order.size());
  for (int i = 0; i < half; ++i) {
    int anti = -1;
    for (int j = 0; j < nv; ++j)
      if ((v[j] + v[order[i]]).norm() < 1e-9) anti = j;
    if (anti < 0) throw Error("sphere polytope is not centrally symmetric");
    order.push_back(anti);
  }
  std::vector<int> new_index(nv);
  for (int i = 0; i < nv; ++i) new_index[order[i]] = i;

  SpherePolytope p;
  p.mode = PolytopeMode::sphere;
  p.refinement = refinement;
  for (int i : order) p.vertices.push_back(v[i]);
  double inradius = 1e9;
  for (auto t : tri) {
    for (auto& i : t) i = new_index[i];
    const Vector3d &a = p.vertices[t[0]], &b = p.vertices[t[1]], &c = p.vertices[t[2]];
    Vector3d w = (b - a).cross(c - a).normalized();
    if (w.dot(a) < 0) {
      std::swap(t[1], t[2]);
      w = -w;
    }
    p.faces.push_back({t[0], t[1], t[2]});
    p.facet_normals.push_back(w);
    p.facet_offsets.push_back(w.dot(a));
    inradius = std::min(inradius, w.dot(a));
  }
  for (auto& x : p.vertices) x /= inradius;
  for (auto& h : p.facet_offsets) h /= inradius;
  return p;
}

HermitianOperator half_element(const Vector3d& b) {
  return bloch_to_operator({0.5, 0.5 * b});
}

}  // namespace

SpherePolytope circumscribed_polytope(PolytopeMode mode, int refinement) {
  return mode == PolytopeMode::circle ? circle_polytope(refinement) : sphere_polytope(refinement);
}

std::vector<QuasiPovm> quasi_povms(const SpherePolytope& p) {
  std::vector<QuasiPovm> out;
  for (const auto& v : p.vertices) {
    Povm q;
    q.dim = 2;
    q.elements = {half_element(v), half_element(-v)};
    out.push_back({v, std::move(q)});
  }
  return out;
}

MeasurementSet dichotomic_set(const std::vector<Vector3d>& bloch, FamilyTag tag) {
  std::vector<Povm> povms;
  for (const auto& b : bloch) {
    Povm q;
    q.dim = 2;
    q.elements = {half_element(b), half_element(-b)};
    povms.push_back(std::move(q));
  }
  return MeasurementSet(std::move(povms), tag);
}

Covariance detect_covariance(const BipartiteState& state) {
  if (state.dim_a != 2 || state.dim_b != 2) return Covariance::none;
  const Matrix3d r1 = Eigen::AngleAxisd(0.7, Vector3d(1, 2, 3).normalized()).toRotationMatrix();
  const Matrix3d r2 = Eigen::AngleAxisd(1.3, Vector3d(-2, 0.5, 1).normalized()).toRotationMatrix();
  for (Covariance c : {Covariance::unitary, Covariance::conjugate}) {
    bool ok = true;
    for (const Matrix3d& r : {r1, r2}) {
      const MatrixXcd w = kron(rotation_unitary(r), bob_unitary(c, r));
      if ((w * state.rho.matrix() * w.adjoint() - state.rho.matrix()).norm() > 1e-9) ok = false;
    }
    if (ok) return c;
  }
  return Covariance::none;
}

MatrixXcd bob_unitary(Covariance c, const Matrix3d& r) {
  const MatrixXcd u = rotation_unitary(r);
  switch (c) {
    case Covariance::unitary: return u;
    case Covariance::conjugate: return u.conjugate();
    case Covariance::none: break;
  }
  throw InvalidParameter("bob_unitary: state is not rotation covariant");
}

namespace {

// A rotation preserving the polytope and the z axis up to sign.
struct Symmetry {
  Matrix3d r;
  std::vector<int> axis_map;
  std::vector<int> sign;
  int z_sign = 1;
};

std::vector<Symmetry> symmetries(const SpherePolytope& p, bool covariant) {
  const int nv = p.vertex_count(), na = p.axis_count();
  std::vector<Symmetry> out;
  std::set<std::pair<std::vector<int>, std::vector<int>>> seen;
  auto try_add = [&](const Matrix3d& r) {
    Symmetry s;
    s.r = r;
    s.z_sign = (r * Vector3d::UnitZ()).z() > 0 ? 1 : -1;
    for (int i = 0; i < na; ++i) {
      const Vector3d img = r * p.vertices[i];
      int hit = -1;
      for (int j = 0; j < nv && hit < 0; ++j)
        if ((img - p.vertices[j]).norm() < 1e-7) hit = j;
      if (hit < 0) return;
      s.axis_map.push_back(hit % na);
      s.sign.push_back(hit < na ? 1 : -1);
    }
    std::vector<int> zs = s.sign;
    zs.push_back(s.z_sign);
    if (seen.emplace(s.axis_map, zs).second) out.push_back(std::move(s));
  };
  try_add(Matrix3d::Identity());
  if (!covariant) return out;
  const Matrix3d flip = Eigen::AngleAxisd(std::numbers::pi, Vector3d::UnitX()).toRotationMatrix();
  for (int q = 2; q <= 12; ++q)
    for (int k = 0; k < q; ++k) {
      const Matrix3d rz = Eigen::AngleAxisd(2.0 * std::numbers::pi * k / q, Vector3d::UnitZ()).toRotationMatrix();
      try_add(rz);
      try_add(rz * flip);
    }
  return out;
}

// Image of a signed combination under a symmetry, with the free positions
// sorted by axis.  order[j] is the position of the original combination that
// lands at position j.
struct Placed {
  VertexCombo key;
  std::vector<int> order;
  std::vector<int> sign;
};

Placed place(const Symmetry& g, bool gauge, const VertexCombo& axes, const std::vector<int>& sign) {
  const int n = static_cast<int>(axes.size());
  const int first = gauge ? 1 : 0;
  std::vector<int> img(n), sg(n);
  if (gauge) {
    img[0] = kGaugeAxis;
    sg[0] = sign[0] * g.z_sign;
  }
  for (int x = first; x < n; ++x) {
    img[x] = g.axis_map[axes[x]];
    sg[x] = sign[x] * g.sign[axes[x]];
  }
  Placed p;
  p.order.resize(n);
  for (int x = 0; x < n; ++x) p.order[x] = x;
  std::stable_sort(p.order.begin() + first, p.order.end(), [&](int a, int b) { return img[a] < img[b]; });
  for (int j = 0; j < n; ++j) {
    p.key.push_back(img[p.order[j]]);
    p.sign.push_back(sg[p.order[j]]);
  }
  return p;
}

VertexCombo canonical_key(const std::vector<Symmetry>& syms, bool gauge, const VertexCombo& axes) {
  const std::vector<int> ones(axes.size(), 1);
  VertexCombo best;
  for (const auto& g : syms) {
    auto p = place(g, gauge, axes, ones);
    if (best.empty() || p.key < best) best = std::move(p.key);
  }
  return best;
}

Vector3d axis_vector(const SpherePolytope& p, int axis) {
  return axis == kGaugeAxis ? Vector3d::UnitZ() : p.vertices[axis];
}

template <typename F>
void parallel_for(int count, int threads, F&& fn) {
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(count);
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int nt = std::min(worker_threads(threads), count);
  if (nt <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::int64_t multiset_count(int items, int length, std::int64_t limit) {
  // C(items + length - 1, length), saturating at limit + 1.
  long double c = 1.0L;
  for (int i = 1; i <= length; ++i) {
    c = c * (items + length - i) / i;
    if (c > static_cast<long double>(limit)) return limit + 1;
  }
  return static_cast<std::int64_t>(std::llround(static_cast<double>(c)));
}

using Dense = std::vector<MatrixXcd>;

Dense to_dense(const LhsModel& m, int n) {
  Dense out(std::size_t{1} << n, MatrixXcd::Zero(2, 2));
  for (int l = 0; l < m.strategies.size(); ++l) {
    std::size_t idx = 0;
    for (int x = 0; x < n; ++x) idx |= static_cast<std::size_t>(m.response(x, l)) << x;
    out[idx] += m.sigma[l].matrix();
  }
  return out;
}

}  // namespace

Assemblage combo_assemblage(const BipartiteState& state, const SpherePolytope& p, const VertexCombo& combo) {
  std::vector<Vector3d> bloch;
  for (int a : combo) {
    if (a != kGaugeAxis && (a < 0 || a >= p.axis_count())) throw InvalidParameter("vertex combination out of range");
    bloch.push_back(axis_vector(p, a));
  }
  return assemblage_from(state, dichotomic_set(bloch));
}

CertificateReport verify_lower_bound(const LowerBoundResult& lb) {
  CertificateReport rep;
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& [combo, c] : lb.certificates) {
    if (static_cast<int>(combo.size()) != lb.n) {
      rep.ok = false;
      rep.message = "certificate combination has the wrong length";
      return rep;
    }
    const Assemblage target = depolarize(combo_assemblage(lb.state, lb.polytope, combo), c.eta);
    rep.reconstruction_residual = std::max(rep.reconstruction_residual, lhs_reconstruction_residual(c.model, target));
    rep.positivity_violation = std::max(rep.positivity_violation, lhs_positivity_violation(c.model));
    lowest = std::min(lowest, c.eta);
  }
  rep.duality_mismatch = std::abs(lowest - lb.eta_lb);
  if (lb.certificates.empty()) {
    rep.ok = false;
    rep.message = "no certificates";
  } else if (rep.reconstruction_residual > kReconstructionTol) {
    rep.ok = false;
    rep.message = "an LHS model does not reproduce its quasi-assemblage";
  } else if (rep.positivity_violation > kPsdTol) {
    rep.ok = false;
    rep.message = "an LHS model has a non-positive hidden state";
  } else if (rep.duality_mismatch > 1e-12) {
    rep.ok = false;
    rep.message = "eta_lb is not the minimum over the certificates";
  }
  return rep;
}

LowerBoundResult lower_bound(const BipartiteState& state, int n, const SpherePolytope& p,
                             const LowerBoundOptions& opt) {
  if (state.dim_a != 2) throw InvalidDimension("lower_bound: Alice must hold a qubit");
  if (n < 1) throw InvalidParameter("lower_bound: n must be positive");
  const BlochVector ra = operator_to_bloch(partial_trace_second(state.rho, state.dim_a, state.dim_b));
  for (const auto& v : p.vertices)
    if (1.0 - 2.0 * std::abs(v.dot(ra.v)) < -1e-12)
      throw InvalidParameter(
          "lower_bound: Alice's marginal gives a polytope vertex a negative outcome probability; "
          "use a state with a less polarized marginal");

  LowerBoundResult res;
  res.polytope = p;
  res.state = state;
  res.n = n;
  res.covariance = opt.use_symmetry ? detect_covariance(state) : Covariance::none;
  const bool gauge = res.covariance != Covariance::none;
  const auto syms = symmetries(p, gauge);
  const int first = gauge ? 1 : 0;
  const int free = n - first;
  const int na = p.axis_count();

  res.raw_combinations = multiset_count(na, free, opt.cap);
  if (res.raw_combinations > opt.cap)
    throw ScenarioTooLarge("lower_bound: more than " + std::to_string(opt.cap) +
                           " vertex combinations; lower the refinement or the number of measurements");

  std::set<VertexCombo> keys;
  VertexCombo combo(n, 0);
  if (gauge) combo[0] = kGaugeAxis;
  std::function<void(int, int)> rec = [&](int x, int lo) {
    if (x == n) {
      keys.insert(canonical_key(syms, gauge, combo));
      return;
    }
    for (int a = lo; a < na; ++a) {
      combo[x] = a;
      rec(x + 1, a);
    }
  };
  rec(first, 0);

  const std::vector<VertexCombo> todo(keys.begin(), keys.end());
  std::vector<ComboCertificate> certs(todo.size());
  parallel_for(static_cast<int>(todo.size()), opt.threads, [&](int i) {
    const Assemblage a = combo_assemblage(state, p, todo[i]);
    const RobustnessResult r = white_noise_robustness(a, opt.robustness);
    certs[i] = {r.eta, *r.lhs_certificate, r.accurate()};
  });

  res.eta_lb = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < todo.size(); ++i) {
    if (certs[i].eta < res.eta_lb) {
      res.eta_lb = certs[i].eta;
      res.worst_vertex_combo = todo[i];
    }
    res.accurate = res.accurate && certs[i].accurate;
    res.certificates.emplace(todo[i], std::move(certs[i]));
  }
  return res;
}

namespace {

// One term of a measurement's decomposition.
struct Part {
  enum Kind { vertex, trivial } kind = vertex;
  int axis = 0;  // kGaugeAxis for the exact z element
  int sign = 1;
  int outcome = 0;  // the fixed answer of a trivial measurement
  double weight = 0.0;
};

std::vector<Part> decompose_measurement(const Povm& m, const SpherePolytope& p, bool gauge_position,
                                        const Matrix3d& r) {
  const BlochVector b = operator_to_bloch(m.elements[0]);
  const Vector3d v = r * b.v;
  const double len = v.norm();
  double q = b.alpha - len, t = 1.0 - b.alpha - len;
  if (q < -1e-9 || t < -1e-9) throw InvalidParameter("certify_measurement_set: not a valid dichotomic POVM");
  q = std::max(q, 0.0);
  t = std::max(t, 0.0);
  std::vector<Part> out;
  if (q > 0.0) out.push_back({Part::trivial, 0, 1, 0, q});
  if (t > 0.0) out.push_back({Part::trivial, 0, 1, 1, t});
  if (len <= 1e-14) return out;
  const double w = 2.0 * len;
  if (gauge_position) {
    out.push_back({Part::vertex, kGaugeAxis, 1, 0, w});
    return out;
  }
  for (const auto& [vi, c] : p.decompose(v / len)) {
    const int na = p.axis_count();
    out.push_back({Part::vertex, vi % na, vi < na ? 1 : -1, 0, w * c});
  }
  return out;
}

// Rotation taking u to +z; rotations about y keep the x-z plane.
Matrix3d gauge_rotation(const Vector3d& u) {
  const double len = u.norm();
  if (len < 1e-14) return Matrix3d::Identity();
  const Vector3d a = u / len;
  const Vector3d axis = a.cross(Vector3d::UnitZ());
  if (axis.norm() < 1e-12) {
    if (a.z() > 0) return Matrix3d::Identity();
    return Eigen::AngleAxisd(std::numbers::pi, Vector3d::UnitY()).toRotationMatrix();
  }
  return Eigen::AngleAxisd(std::atan2(axis.norm(), a.z()), axis.normalized()).toRotationMatrix();
}

}  // namespace

LhsModel certify_measurement_set(const MeasurementSet& ms, const LowerBoundResult& lb, double eta) {
  if (eta > lb.eta_lb + 1e-12)
    throw RefusedAboveBound("certify_measurement_set: eta " + std::to_string(eta) + " exceeds the lower bound " +
                            std::to_string(lb.eta_lb));
  if (eta < 0.0) throw InvalidParameter("certify_measurement_set: eta must be nonnegative");
  if (ms.dim() != 2 || ms.k() != 2) throw InvalidDimension("certify_measurement_set: needs dichotomic qubit POVMs");
  if (ms.n() != lb.n) throw InvalidDimension("certify_measurement_set: number of measurements differs from the bound");
  if (ms.tag() != FamilyTag::quasi) {
    const std::string err = ms.check();
    if (!err.empty()) throw InvalidParameter("certify_measurement_set: " + err);
  }
  const SpherePolytope& p = lb.polytope;
  const int n = ms.n();
  const bool gauge = lb.covariance != Covariance::none;
  if (p.mode == PolytopeMode::circle)
    for (int x = 0; x < n; ++x)
      if (std::abs(operator_to_bloch(ms.element(x, 0)).v.y()) > 1e-9)
        throw InvalidParameter("certify_measurement_set: circle bounds cover x-z plane measurements only");

  const Matrix3d r = gauge ? gauge_rotation(operator_to_bloch(ms.element(0, 0)).v) : Matrix3d::Identity();
  std::vector<std::vector<Part>> parts;
  for (int x = 0; x < n; ++x) parts.push_back(decompose_measurement(ms.povm(x), p, gauge && x == 0, r));

  const auto syms = symmetries(p, gauge);
  const BlochVector ra = operator_to_bloch(partial_trace_second(lb.state.rho, 2, lb.state.dim_b));
  const int db = lb.state.dim_b;
  const std::size_t size = std::size_t{1} << n;
  Dense total(size, MatrixXcd::Zero(db, db));
  std::vector<int> pick(n, 0);

  auto add_term = [&] {
    double weight = 1.0;
    VertexCombo axes(n);
    std::vector<int> sign(n);
    std::vector<int> fixed(n, -1);
    for (int x = 0; x < n; ++x) {
      const Part& pt = parts[x][pick[x]];
      weight *= pt.weight;
      if (pt.kind == Part::trivial) {
        axes[x] = gauge && x == 0 ? kGaugeAxis : 0;
        sign[x] = 1;
        fixed[x] = pt.outcome;
      } else {
        axes[x] = pt.axis;
        sign[x] = pt.sign;
      }
    }
    if (weight <= 0.0) return;

    const ComboCertificate* cert = nullptr;
    const Symmetry* used = nullptr;
    Placed placed;
    for (const auto& g : syms) {
      placed = place(g, gauge, axes, sign);
      auto it = lb.certificates.find(placed.key);
      if (it != lb.certificates.end()) {
        cert = &it->second;
        used = &g;
        break;
      }
    }
    if (!cert) throw Error("certify_measurement_set: no stored certificate covers a vertex combination");

    // Model for the combination in its own order and orientation.
    const Dense canon = to_dense(cert->model, n);
    std::size_t flips = 0;
    for (int j = 0; j < n; ++j)
      if (placed.sign[j] < 0) flips |= std::size_t{1} << j;
    const MatrixXcd v = gauge ? bob_unitary(lb.covariance, used->r) : MatrixXcd::Identity(db, db);
    const double ratio = cert->eta > 0.0 ? std::min(1.0, eta / cert->eta) : 0.0;
    Dense model(size);
    for (std::size_t lam = 0; lam < size; ++lam) {
      std::size_t mu = 0;
      for (int j = 0; j < n; ++j) mu |= ((lam >> placed.order[j]) & 1u) << j;
      double prob = 1.0;
      for (int x = 0; x < n; ++x) {
        const double e = sign[x] * axis_vector(p, axes[x]).dot(ra.v);
        prob *= ((lam >> x) & 1u) ? 0.5 * (1.0 - e) : 0.5 * (1.0 + e);
      }
      model[lam] = ratio * (v.adjoint() * canon[mu ^ flips] * v) +
                   (1.0 - ratio) * prob / db * MatrixXcd::Identity(db, db);
    }
    // Trivial measurements answer their fixed outcome.
    for (std::size_t lam = 0; lam < size; ++lam) {
      std::size_t target = lam;
      for (int x = 0; x < n; ++x)
        if (fixed[x] >= 0) target = (target & ~(std::size_t{1} << x)) | (static_cast<std::size_t>(fixed[x]) << x);
      total[target] += weight * model[lam];
    }
  };

  std::function<void(int)> rec = [&](int x) {
    if (x == n) {
      add_term();
      return;
    }
    for (size_t i = 0; i < parts[x].size(); ++i) {
      pick[x] = static_cast<int>(i);
      rec(x + 1);
    }
  };
  rec(0);

  // Undo the gauge rotation: assemblage(R M) = V assemblage(M) V^*.
  const MatrixXcd vg = gauge ? bob_unitary(lb.covariance, r) : MatrixXcd::Identity(db, db);
  std::vector<HermitianOperator> sigma;
  for (const auto& s : total) sigma.emplace_back(vg.adjoint() * s * vg);
  LhsModel out = make_lhs_model(deterministic_strategies(n, 2, std::int64_t{1} << n), std::move(sigma));

  const double res = certified_residual(ms, lb, eta, out);
  if (res > 1e-6 || lhs_positivity_violation(out) > kPsdTol)
    throw Error("certify_measurement_set: assembled model fails its check (residual " + std::to_string(res) + ")");
  return out;
}

double certified_residual(const MeasurementSet& ms, const LowerBoundResult& lb, double eta, const LhsModel& m) {
  return lhs_reconstruction_residual(m, depolarize(assemblage_from(lb.state, ms), eta));
}

}  // namespace steerlab
