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

// Steering robustness programs and their certificates.
//
// Sign convention for steering functionals: coefficients F_{a|x} satisfy
// sum_x F_{lambda(x)|x} <= 0 for every deterministic strategy lambda, so
// sum Tr(F sigma) <= 0 on every LHS assemblage and a positive value
// witnesses steering.

#pragma once

#include <optional>
#include <vector>

#include "steerlab/scenario.hpp"
#include "steerlab/sdp.hpp"

namespace steerlab {

/// sigma_{a|x} = sum_lambda [response(x, lambda) == a] sigma_lambda.
struct LhsModel {
  StrategyTable strategies;
  /// labels[x][digit] is the outcome that strategy digit stands for.
  std::vector<std::vector<int>> labels;
  std::vector<HermitianOperator> sigma;

  int response(int x, int lambda) const { return labels[x][strategies.outcome(x, lambda)]; }
  Assemblage reconstruct(int k, int dim) const;
};

/// LhsModel over the full k^N table with identity labels.
LhsModel make_lhs_model(StrategyTable table, std::vector<HermitianOperator> sigma);

struct SteeringFunctional {
  std::vector<std::vector<HermitianOperator>> coefficients;  // [x][a]

  int n() const { return static_cast<int>(coefficients.size()); }
  int k() const { return coefficients.empty() ? 0 : static_cast<int>(coefficients.front().size()); }
  double value_on(const Assemblage& a) const;
  /// Element-wise depolarizing map; Tr(depolarized(eta)[x][a] s) = Tr(F Lambda_eta(s)).
  SteeringFunctional depolarized(double eta) const;
};

enum class Quantity { white_noise, white_noise_t, generalized };
const char* to_string(Quantity q);
Quantity quantity_from_string(const std::string& s);

struct RobustnessResult {
  Quantity quantity = Quantity::white_noise;
  /// eta for white_noise; t for white_noise_t and generalized.
  double value = 0.0;
  /// Critical visibility implied by value (1/(1+t) for the t-forms).
  double eta = 0.0;
  std::optional<LhsModel> lhs_certificate;
  std::optional<SteeringFunctional> functional_certificate;
  /// sum Tr(F sigma) of the returned functional on the input assemblage.
  double functional_value = 0.0;
  double solver_gap = 0.0;
  sdp::Status status = sdp::Status::optimal;
  int iterations = 0;

  bool accurate() const { return status == sdp::Status::optimal; }
};

struct RobustnessOptions {
  sdp::Options solver{};
  std::int64_t cap = kDefaultStrategyCap;
  /// Upper limit on eta in the white-noise program.  Values above 1 keep the
  /// dual functional informative on unsteerable assemblages (the seesaw uses
  /// this); the reported value is then not clamped to 1.
  double eta_max = 1.0;
};

/// Largest eta in [0, 1] such that Lambda_eta(a) admits an LHS model.
RobustnessResult white_noise_robustness(const Assemblage& a, const RobustnessOptions& opt = {});

/// Same optimum through min t with (sigma + t Tr(sigma) 1/d)/(1 + t) LHS.
RobustnessResult white_noise_robustness_t(const Assemblage& a, const RobustnessOptions& opt = {});

/// min sum_lambda Tr(sigma_lambda) - 1 s.t. sum_lambda D sigma_lambda >= sigma_{a|x}.
/// The LHS certificate dominates the assemblage member-wise.
RobustnessResult generalized_robustness(const Assemblage& a, const RobustnessOptions& opt = {});

/// The optimal functional of the white-noise program and its value 1 - eta.
std::pair<SteeringFunctional, double> steering_functional(const Assemblage& a, const RobustnessOptions& opt = {});

/// Solves the functional program directly, with one semidefinite constraint
/// per deterministic strategy.  Small scenarios only.
std::pair<SteeringFunctional, double> steering_functional_explicit(const Assemblage& a,
                                                                   const RobustnessOptions& opt = {});

/// Measurements maximizing sum Tr(F_{a|x} sigma_{a|x}) for the given state.
/// Throws sdp failures as steerlab::Error; an inaccurate solve sets *accurate.
MeasurementSet best_measurements_for_functional(const BipartiteState& state, const SteeringFunctional& f, int n,
                                                int k, const sdp::Options& opt = {}, bool* accurate = nullptr);

// Solver-independent certificate checks (hermitian-core only).

/// Max entry-wise deviation between the model's reconstruction and target.
double lhs_reconstruction_residual(const LhsModel& m, const Assemblage& target);
/// Most negative eigenvalue among the sigma_lambda, as a nonnegative number.
double lhs_positivity_violation(const LhsModel& m);
/// max over all k^N strategies of lambda_max(sum_x F_{lambda(x)|x}); <= 0 for
/// a valid functional.
double functional_lhs_violation(const SteeringFunctional& f);

inline constexpr double kReconstructionTol = 1e-7;
inline constexpr double kPsdTol = 1e-8;

struct CertificateReport {
  bool ok = true;
  double reconstruction_residual = 0.0;
  double positivity_violation = 0.0;
  double functional_violation = 0.0;
  double duality_mismatch = 0.0;
  std::string message;
};

/// Replays every certificate attached to r against the assemblage it was
/// computed for.
CertificateReport verify_certificates(const RobustnessResult& r, const Assemblage& a);

}  // namespace steerlab
