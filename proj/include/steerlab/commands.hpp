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

// Run orchestration behind the steerlab command line: configs, run records,
// certificate replay and the reference tables.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "steerlab/io.hpp"

namespace steerlab {

/// Malformed or inconsistent configuration.
class ConfigError : public InvalidParameter {
 public:
  using InvalidParameter::InvalidParameter;
};

enum class Method { sdp_fixed, seesaw, search, lower_bound };
const char* to_string(Method m);
Method method_from_string(const std::string& s);

struct StateSpec {
  /// werner, isotropic, max_entangled or file.
  std::string type = "werner";
  int d = 2;
  double eta = 1.0;
  std::string path;
};

struct MeasurementSpec {
  /// mub, planar, thomson, fibonacci, trine, sic, axes or file.
  std::string family = "mub";
  std::vector<Vector3d> axes;
  std::string path;
};

struct ScenarioConfig {
  StateSpec state;
  int n = 2;
  int k = 2;
  Method method = Method::sdp_fixed;
  MeasurementSpec measurements;
  Quantity quantity = Quantity::white_noise;
  SearchFamily search_family = SearchFamily::projective;
  int restarts = 20;
  int max_evals = 3000;
  double convergence_delta = 1e-7;
  int max_rounds = 200;
  PolytopeMode polytope_mode = PolytopeMode::circle;
  int refinement = 64;
  sdp::Options solver{};
  std::uint64_t seed = 1;
  int threads = 0;
  std::string output = ".";
  /// Relative paths in the config resolve against this directory.
  std::filesystem::path base_dir = ".";
};

ScenarioConfig parse_config(const json& j, const std::filesystem::path& base_dir = ".");
ScenarioConfig load_config(const std::filesystem::path& path);
json config_json(const ScenarioConfig& c);
/// Throws ConfigError for invalid method/family combinations, missing files
/// and scenarios beyond the caps.
void validate(const ScenarioConfig& c);

BipartiteState build_state(const ScenarioConfig& c);
MeasurementSet build_measurements(const ScenarioConfig& c, int dim);

struct RunRecord {
  std::string command;
  json config;
  json result;
  /// Git blob SHA-1 of the canonical {command, config, result} document.
  std::string hash;
  double headline = 0.0;
  double wall_seconds = 0.0;
  json solver_stats;
  bool accurate = true;
};

json record_json(const RunRecord& r);
RunRecord record_from_json(const json& j);
/// SHA-1 of "blob <size>\0<content>", as git computes object ids.
std::string git_blob_sha1(const std::string& content);
std::string record_hash(const RunRecord& r);

/// Writes the record (and lower-bound certificate files) under dir, each
/// file atomically; returns the record path.
std::filesystem::path save_record(const RunRecord& r, const std::filesystem::path& dir);
/// Reads a record and inlines any certificate files it references.
RunRecord load_record(const std::filesystem::path& path);

RunRecord cmd_robustness(const ScenarioConfig& c);
RunRecord cmd_seesaw(const ScenarioConfig& c);
RunRecord cmd_search(const ScenarioConfig& c);
RunRecord cmd_lowerbound(const ScenarioConfig& c);
/// Dispatches on c.method.
RunRecord run_config(const ScenarioConfig& c);

struct VerifyReport {
  bool ok = true;
  std::vector<std::string> lines;
  double worst_residual = 0.0;
};

/// Replays the certificates of a record with hermitian-core checks only.
VerifyReport verify_record(const RunRecord& r);
VerifyReport cmd_verify(const std::filesystem::path& record_path);

struct TableBudget {
  int restarts = 10;
  /// Largest N for fixed-set rows.
  int max_fixed_n = 8;
  /// Largest N for seesaw and search rows.
  int max_heuristic_n = 5;
  /// Largest N for polytope lower bounds (circle) and sphere lower bounds.
  int max_circle_lb_n = 3;
  int max_sphere_lb_n = 2;
  int max_d = 4;
  std::uint64_t seed = 1;
  int threads = 0;
};

struct TableCell {
  std::string row;
  std::string column;
  std::optional<double> reference;
  std::optional<double> computed;
  /// "ok", "skipped" or "error: ...".
  std::string status = "skipped";
  double deviation() const { return reference && computed ? *computed - *reference : 0.0; }
};

struct Table {
  std::string id;
  std::string title;
  std::vector<std::string> rows;
  std::vector<std::string> columns;
  std::vector<TableCell> cells;
};

/// Reference values shipped with the library (STEERLAB_DATA_DIR overrides
/// the install location).
json reference_values();
/// Table id in {I, II, III, IV, plot}.
Table cmd_table(const std::string& id, const TableBudget& budget);
std::string format_table(const Table& t);
std::string table_csv(const Table& t);

}  // namespace steerlab
