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

// States, measurements, assemblages and deterministic strategies.
//
// Indices are zero-based throughout: measurement x in [0, N), outcome a in
// [0, k), hidden variable lambda in [0, k^N).

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "steerlab/hermitian.hpp"

namespace steerlab {

inline constexpr double kValidityTol = 1e-9;
inline constexpr std::int64_t kDefaultStrategyCap = 4096;

/// A POVM on C^dim.  Elements may be exactly zero (padding).
struct Povm {
  int dim = 0;
  std::vector<HermitianOperator> elements;

  int outcomes() const { return static_cast<int>(elements.size()); }
  /// Largest violation of positivity or completeness.
  double violation() const;
  bool is_valid(double tol = kValidityTol) const { return violation() <= tol; }
};

enum class FamilyTag { planar, projective, trine, sic, mub, thomson, fibonacci, general, quasi };

const char* to_string(FamilyTag t);
FamilyTag family_from_string(const std::string& s);

/// N POVMs with a common dimension and a common number of outcomes k.
/// Shorter POVMs are padded with zero elements on construction.
class MeasurementSet {
 public:
  MeasurementSet() = default;
  MeasurementSet(std::vector<Povm> povms, FamilyTag tag = FamilyTag::general);

  int n() const { return static_cast<int>(povms_.size()); }
  int k() const { return k_; }
  int dim() const { return dim_; }
  FamilyTag tag() const { return tag_; }
  const std::vector<Povm>& povms() const { return povms_; }
  const Povm& povm(int x) const { return povms_.at(x); }
  const HermitianOperator& element(int x, int a) const { return povms_.at(x).elements.at(a); }

  /// Checks the POVM invariants (skipped for quasi sets) and the tag-specific
  /// ones; returns an empty string when valid, otherwise a description.
  std::string check(double tol = kValidityTol) const;

  MeasurementSet with_tag(FamilyTag t) const;
  /// U M U^* on every element.
  MeasurementSet conjugated(const MatrixXcd& u) const;

 private:
  std::vector<Povm> povms_;
  int dim_ = 0;
  int k_ = 0;
  FamilyTag tag_ = FamilyTag::general;
};

struct BipartiteState {
  int dim_a = 0;
  int dim_b = 0;
  HermitianOperator rho;

  BipartiteState() = default;
  /// Throws InvalidDimension or InvalidParameter when rho is not a density
  /// operator on C^dim_a (x) C^dim_b.
  BipartiteState(int dim_a, int dim_b, HermitianOperator rho);

  HermitianOperator marginal_b() const { return partial_trace_first(rho, dim_a, dim_b); }
};

/// N x k grid of operators on Bob's space.
class Assemblage {
 public:
  Assemblage() = default;
  Assemblage(int n, int k, int dim_b);
  /// members[x][a]; all rows must have the same length.
  explicit Assemblage(const std::vector<std::vector<HermitianOperator>>& members);

  int n() const { return n_; }
  int k() const { return k_; }
  int dim_b() const { return dim_; }
  const HermitianOperator& operator()(int x, int a) const { return members_[index(x, a)]; }
  HermitianOperator& at(int x, int a) { return members_[index(x, a)]; }

  HermitianOperator marginal(int x) const;
  /// max_x || sum_a sigma_{a|x} - sum_a sigma_{a|0} ||.
  double signaling() const;
  /// Most negative eigenvalue over members, as a nonnegative number.
  double positivity_violation() const;

 private:
  int index(int x, int a) const { return x * k_ + a; }
  int n_ = 0, k_ = 0, dim_ = 0;
  std::vector<HermitianOperator> members_;
};

/// Deterministic response functions.  Strategy lambda answers input x with
/// digit x of lambda written in mixed radix (least significant digit is
/// input 0).  With a common radix k this is the standard enumeration of all
/// k^N functions.
class StrategyTable {
 public:
  StrategyTable() = default;
  explicit StrategyTable(std::vector<int> radix, std::int64_t cap = kDefaultStrategyCap);

  int n() const { return static_cast<int>(radix_.size()); }
  int radix(int x) const { return radix_.at(x); }
  const std::vector<int>& radices() const { return radix_; }
  int size() const { return size_; }
  int outcome(int x, int lambda) const { return (lambda / stride_[x]) % radix_[x]; }
  bool d(int a, int x, int lambda) const { return outcome(x, lambda) == a; }
  /// Strategy index of an outcome tuple.
  int index_of(const std::vector<int>& outcomes) const;

 private:
  std::vector<int> radix_;
  std::vector<int> stride_;
  int size_ = 0;
};

StrategyTable deterministic_strategies(int n, int k, std::int64_t cap = kDefaultStrategyCap);

// States.
BipartiteState make_max_entangled(int d);
BipartiteState make_isotropic(int d, double eta);
BipartiteState make_werner_qubit(double eta);
BipartiteState make_product(const HermitianOperator& rho_a, const HermitianOperator& rho_b);

// Measurements.
Povm projective_from_bloch(const Vector3d& v);
/// Projective measurement onto an orthonormal basis (columns of u).
Povm projective_from_basis(const MatrixXcd& u);
MeasurementSet projective_set(const std::vector<Vector3d>& axes, FamilyTag tag = FamilyTag::projective);
MeasurementSet equally_spaced_planar(int n);
Povm trine_povm(const Eigen::Matrix3d& rotation = Eigen::Matrix3d::Identity());
Povm sic_tetrahedron_povm(const Eigen::Matrix3d& rotation = Eigen::Matrix3d::Identity());
MeasurementSet mub_bases(int d, int count);
/// Orthonormal basis matrices (columns) behind mub_bases.
std::vector<MatrixXcd> mub_basis_matrices(int d, int count);
MeasurementSet thomson_set(int n);
MeasurementSet fibonacci_set(int n);

// Assemblages.
Assemblage assemblage_from(const BipartiteState& state, const MeasurementSet& ms);
Assemblage depolarize(const Assemblage& a, double eta);
MeasurementSet depolarize_measurements(const MeasurementSet& ms, double eta);

}  // namespace steerlab
