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

// Lower bounds on the critical visibility for dichotomic qubit measurements,
// from quasi-POVMs on the vertices of a polytope that contains the Bloch ball
// (sphere mode) or the x-z Bloch disc (circle mode).

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <utility>
#include <vector>

#include "steerlab/robustness.hpp"

namespace steerlab {

enum class PolytopeMode { circle, sphere };
const char* to_string(PolytopeMode m);
PolytopeMode polytope_mode_from_string(const std::string& s);

/// Centrally symmetric polytope around the unit ball.  Vertex i + V/2 is the
/// antipode of vertex i, so vertices 0..V/2-1 represent the axes.
struct SpherePolytope {
  PolytopeMode mode = PolytopeMode::circle;
  int refinement = 0;
  std::vector<Vector3d> vertices;
  /// Vertex indices of each facet: edges in circle mode, triangles otherwise.
  std::vector<std::vector<int>> faces;
  /// Facet f is {x : facet_normals[f] . x <= facet_offsets[f]} restricted to
  /// the face; every offset is at least 1.
  std::vector<Vector3d> facet_normals;
  std::vector<double> facet_offsets;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int axis_count() const { return vertex_count() / 2; }
  int antipode(int i) const { return (i + axis_count()) % vertex_count(); }
  /// max |vertex|.
  double circumradius() const;
  /// Convex weights (vertex, weight) with sum weight * vertex = u, for
  /// |u| <= 1 (u in the x-z plane in circle mode).
  std::vector<std::pair<int, double>> decompose(const Vector3d& u) const;
  /// Writes the OFF vertex/face format.
  void write_off(std::ostream& os) const;
};

/// Circle: regular 2m-gon in the x-z plane with vertices at angles j pi / m
/// from the z axis, scaled by 1/cos(pi/2m).  Sphere: icosahedron with a
/// vertex on z, subdivided (refinement - 1) times and scaled by the reciprocal
/// of its inradius (12, 42, 162, 642 vertices).
SpherePolytope circumscribed_polytope(PolytopeMode mode, int refinement);

/// {(1 + v.sigma)/2, (1 - v.sigma)/2}; not positive when |v| > 1.
struct QuasiPovm {
  Vector3d vertex;
  Povm povm;
};

std::vector<QuasiPovm> quasi_povms(const SpherePolytope& p);

/// Dichotomic qubit (quasi-)measurements with first elements (1 + b_x.sigma)/2.
MeasurementSet dichotomic_set(const std::vector<Vector3d>& bloch, FamilyTag tag = FamilyTag::quasi);

/// How a two-qubit state transforms under local rotations.
enum class Covariance {
  none,
  /// (U x U) rho (U x U)^* = rho, e.g. the Werner state.
  unitary,
  /// (U x conj(U)) rho (U x conj(U))^* = rho, e.g. the isotropic state.
  conjugate,
};
const char* to_string(Covariance c);
Covariance detect_covariance(const BipartiteState& state);
/// Bob-side unitary V with assemblage(R . M) = V assemblage(M) V^*.
MatrixXcd bob_unitary(Covariance c, const Eigen::Matrix3d& r);

struct ComboCertificate {
  double eta = 0.0;
  LhsModel model;
  bool accurate = true;
};

/// A vertex combination: one axis index per measurement.  kGaugeAxis stands
/// for the exact z projective measurement used as the first measurement of
/// rotation-covariant states.
using VertexCombo = std::vector<int>;
inline constexpr int kGaugeAxis = -1;

struct LowerBoundResult {
  double eta_lb = 1.0;
  VertexCombo worst_vertex_combo;
  /// Canonical combinations only; the others follow by symmetry.
  std::map<VertexCombo, ComboCertificate> certificates;
  SpherePolytope polytope;
  BipartiteState state;
  int n = 0;
  Covariance covariance = Covariance::none;
  /// Vertex combinations before symmetry reduction.
  std::int64_t raw_combinations = 0;
  bool accurate = true;
};

struct LowerBoundOptions {
  RobustnessOptions robustness{};
  /// Limit on the number of unreduced combinations.
  std::int64_t cap = 200000;
  /// Symmetry reduction and the first-axis gauge; only applied to covariant
  /// states.
  bool use_symmetry = true;
  int threads = 0;
};

LowerBoundResult lower_bound(const BipartiteState& state, int n, const SpherePolytope& p,
                             const LowerBoundOptions& opt = {});

/// Quasi-assemblage of a vertex combination.
Assemblage combo_assemblage(const BipartiteState& state, const SpherePolytope& p, const VertexCombo& combo);

/// Replays every stored combination certificate against its quasi-assemblage
/// and checks that eta_lb is their minimum.  No solver involved.
CertificateReport verify_lower_bound(const LowerBoundResult& lb);

/// LHS model for the depolarized assemblage of ms at visibility eta, mixed
/// from the stored certificates.  Throws RefusedAboveBound for eta > eta_lb.
LhsModel certify_measurement_set(const MeasurementSet& ms, const LowerBoundResult& lb, double eta);

/// Reconstruction residual of a certify_measurement_set model against the
/// depolarized assemblage it claims.
double certified_residual(const MeasurementSet& ms, const LowerBoundResult& lb, double eta, const LhsModel& m);

}  // namespace steerlab
