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

// JSON forms of the library types.  Operators are {"dim", "re", "im"} with
// row-major entry lists.

#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "steerlab/optimizers.hpp"
#include "steerlab/polytope.hpp"

namespace steerlab {

using json = nlohmann::json;

void to_json(json& j, const HermitianOperator& h);
void from_json(const json& j, HermitianOperator& h);
void to_json(json& j, const Povm& p);
void from_json(const json& j, Povm& p);
void to_json(json& j, const MeasurementSet& ms);
void from_json(const json& j, MeasurementSet& ms);
void to_json(json& j, const BipartiteState& s);
void from_json(const json& j, BipartiteState& s);
void to_json(json& j, const Assemblage& a);
void from_json(const json& j, Assemblage& a);
void to_json(json& j, const LhsModel& m);
void from_json(const json& j, LhsModel& m);
void to_json(json& j, const SteeringFunctional& f);
void from_json(const json& j, SteeringFunctional& f);
void to_json(json& j, const RobustnessResult& r);
void from_json(const json& j, RobustnessResult& r);
void to_json(json& j, const OptimizationRun& r);
void from_json(const json& j, OptimizationRun& r);
void to_json(json& j, const SpherePolytope& p);
void from_json(const json& j, SpherePolytope& p);
void to_json(json& j, const LowerBoundResult& r);
void from_json(const json& j, LowerBoundResult& r);

sdp::Status status_from_string(const std::string& s);

std::string read_text_file(const std::filesystem::path& path);
json read_json_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it over path.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace steerlab
