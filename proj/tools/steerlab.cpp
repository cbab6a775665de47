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

// steerlab command line.  Exit codes: 0 success, 2 config error, 3 numerical
// inaccuracy, 4 verification failure, 1 anything else.

#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "steerlab/commands.hpp"

namespace {

namespace fs = std::filesystem;
using namespace steerlab;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInaccurate = 3;
constexpr int kExitVerify = 4;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
};

int run_scenario(const std::string& command, Method method, const Common& o) {
  ScenarioConfig c = load_config(o.config);
  const json raw = read_json_file(o.config);
  if (raw.contains("method") && c.method != method)
    throw ConfigError("config method '" + std::string(to_string(c.method)) + "' does not match command '" + command +
                      "'");
  c.method = method;
  if (o.seed) c.seed = *o.seed;
  if (o.threads) c.threads = *o.threads;
  if (o.out) c.output = *o.out;
  const RunRecord r = run_config(c);
  fs::path dir = c.output;
  if (!o.out && dir.is_relative()) dir = c.base_dir / dir;
  const fs::path path = save_record(r, dir);
  std::cout << command << ": " << std::setprecision(10) << r.headline << "\n"
            << "record: " << path.string() << "\n"
            << "hash: " << r.hash << "\n"
            << "wall: " << std::setprecision(3) << r.wall_seconds << " s\n";
  if (!r.accurate) {
    std::cerr << "steerlab: solver reported an inaccurate result; the partial record was saved\n";
    return kExitInaccurate;
  }
  return kExitOk;
}

int run_table(const Common& o, const std::string& id_flag, TableBudget b) {
  std::string id = id_flag;
  if (!o.config.empty()) {
    const json j = read_json_file(o.config);
    try {
      if (id.empty()) id = j.value("table", std::string());
      if (j.contains("budget")) {
        const json& bj = j.at("budget");
        b.restarts = bj.value("restarts", b.restarts);
        b.max_fixed_n = bj.value("max_fixed_n", b.max_fixed_n);
        b.max_heuristic_n = bj.value("max_heuristic_n", b.max_heuristic_n);
        b.max_circle_lb_n = bj.value("max_circle_lb_n", b.max_circle_lb_n);
        b.max_sphere_lb_n = bj.value("max_sphere_lb_n", b.max_sphere_lb_n);
        b.max_d = bj.value("max_d", b.max_d);
      }
    } catch (const json::exception& e) {
      throw ConfigError(std::string("malformed table config: ") + e.what());
    }
  }
  if (id.empty()) throw ConfigError("table needs an id (--id or a 'table' key in the config)");
  if (o.seed) b.seed = *o.seed;
  if (o.threads) b.threads = *o.threads;
  const Table t = cmd_table(id, b);
  std::cout << format_table(t);
  if (o.out) {
    const fs::path path = fs::path(*o.out) / ("table_" + id + ".csv");
    write_file_atomic(path, table_csv(t));
    std::cout << "csv: " << path.string() << "\n";
  }
  for (const auto& cell : t.cells)
    if (cell.status.rfind("error", 0) == 0) return kExitInaccurate;
  return kExitOk;
}

int run_verify(const std::string& path) {
  if (path.empty()) throw ConfigError("verify needs a record path");
  if (!fs::exists(path)) throw ConfigError("record '" + path + "' does not exist");
  const VerifyReport rep = cmd_verify(path);
  for (const auto& line : rep.lines) std::cout << line << "\n";
  std::cout << "worst residual: " << std::scientific << std::setprecision(3) << rep.worst_residual << "\n"
            << (rep.ok ? "verification passed" : "verification FAILED") << "\n";
  return rep.ok ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"steerlab: steering robustness, heuristic upper bounds and certified lower bounds"};
  app.require_subcommand(1);

  Common o;
  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config,-c", o.config, "JSON config file");
    if (config_required) opt->required();
    sub->add_option("--seed", o.seed, "Override the config seed");
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--threads", o.threads, "Worker threads (0: STEERLAB_THREADS or hardware)");
  };

  struct Scenario {
    const char* name;
    Method method;
    const char* help;
  };
  const Scenario scenarios[] = {
      {"robustness", Method::sdp_fixed, "Exact critical visibility for fixed measurements"},
      {"seesaw", Method::seesaw, "Seesaw upper bound over general POVMs"},
      {"search", Method::search, "Parametric search over a measurement family"},
      {"lowerbound", Method::lower_bound, "Polytope lower bound for dichotomic qubit measurements"},
  };
  std::vector<std::pair<CLI::App*, const Scenario*>> subs;
  for (const auto& s : scenarios) {
    auto* sub = app.add_subcommand(s.name, s.help);
    add_common(sub, true);
    subs.emplace_back(sub, &s);
  }

  std::string table_id;
  TableBudget budget;
  auto* table = app.add_subcommand("table", "Reference tables I-IV or plot data, computed against the fixtures");
  add_common(table, false);
  table->add_option("--id", table_id, "I, II, III, IV or plot");
  table->add_option("--restarts", budget.restarts, "Heuristic restarts per cell");
  table->add_option("--max-n", budget.max_heuristic_n, "Largest N for heuristic cells");
  table->add_option("--max-fixed-n", budget.max_fixed_n, "Largest N for fixed-measurement cells");
  table->add_option("--max-d", budget.max_d, "Largest dimension for heuristic cells");

  std::string record;
  auto* verify = app.add_subcommand("verify", "Replay the certificates of a run record without a solver");
  verify->add_option("record", record, "Run record JSON");
  verify->add_option("--config,-c", record, "Run record JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    for (const auto& [sub, s] : subs)
      if (sub->parsed()) return run_scenario(s->name, s->method, o);
    if (table->parsed()) return run_table(o, table_id, budget);
    if (verify->parsed()) return run_verify(record);
  } catch (const ConfigError& e) {
    std::cerr << "steerlab: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidParameter& e) {
    std::cerr << "steerlab: invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidDimension& e) {
    std::cerr << "steerlab: invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const UnsupportedScenario& e) {
    std::cerr << "steerlab: unsupported scenario: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ScenarioTooLarge& e) {
    std::cerr << "steerlab: scenario too large: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "steerlab: " << e.what() << "\n";
    return 1;
  }
  return kExitConfig;
}
