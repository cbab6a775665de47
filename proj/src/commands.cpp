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

#include "steerlab/commands.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>

namespace steerlab {

namespace fs = std::filesystem;

const char* to_string(Method m) {
  switch (m) {
    case Method::sdp_fixed: return "sdp_fixed";
    case Method::seesaw: return "seesaw";
    case Method::search: return "search";
    case Method::lower_bound: return "lower_bound";
  }
  return "?";
}

Method method_from_string(const std::string& s) {
  for (auto m : {Method::sdp_fixed, Method::seesaw, Method::search, Method::lower_bound})
    if (s == to_string(m)) return m;
  throw ConfigError("unknown method '" + s + "' (expected sdp_fixed, seesaw, search or lower_bound)");
}

namespace {

const std::set<std::string> kStateTypes = {"werner", "isotropic", "max_entangled", "file"};
const std::set<std::string> kFixedFamilies = {"mub", "planar", "thomson", "fibonacci", "axes", "file"};

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

fs::path resolve(const ScenarioConfig& c, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : c.base_dir / path;
}

int state_dim(const ScenarioConfig& c) {
  if (c.state.type == "werner") return 2;
  if (c.state.type == "file") return build_state(c).dim_a;
  return c.state.d;
}

}  // namespace

ScenarioConfig parse_config(const json& j, const fs::path& base_dir) {
  ScenarioConfig c;
  c.base_dir = base_dir;
  try {
    check_keys(j,
               {"state", "n", "k", "method", "measurements", "quantity", "search", "seesaw", "polytope", "solver",
                "seed", "threads", "output"},
               "config");
    if (j.contains("state")) {
      const json& s = j.at("state");
      check_keys(s, {"type", "d", "eta", "path"}, "state");
      c.state.type = s.value("type", c.state.type);
      c.state.d = s.value("d", c.state.d);
      c.state.eta = s.value("eta", c.state.eta);
      c.state.path = s.value("path", c.state.path);
    }
    c.n = j.value("n", c.n);
    c.k = j.value("k", c.k);
    if (j.contains("method")) c.method = method_from_string(j.at("method").get<std::string>());
    if (j.contains("measurements")) {
      const json& m = j.at("measurements");
      check_keys(m, {"family", "axes", "path"}, "measurements");
      c.measurements.family = m.value("family", c.measurements.family);
      c.measurements.path = m.value("path", c.measurements.path);
      if (m.contains("axes"))
        for (const auto& a : m.at("axes")) {
          const auto v = a.get<std::vector<double>>();
          if (v.size() != 3) throw ConfigError("measurement axes must be 3-vectors");
          c.measurements.axes.emplace_back(v[0], v[1], v[2]);
        }
    }
    if (j.contains("quantity")) c.quantity = quantity_from_string(j.at("quantity").get<std::string>());
    if (j.contains("search")) {
      const json& s = j.at("search");
      check_keys(s, {"family", "restarts", "max_evals"}, "search");
      if (s.contains("family")) c.search_family = search_family_from_string(s.at("family").get<std::string>());
      c.restarts = s.value("restarts", c.restarts);
      c.max_evals = s.value("max_evals", c.max_evals);
    }
    if (j.contains("seesaw")) {
      const json& s = j.at("seesaw");
      check_keys(s, {"restarts", "convergence_delta", "max_rounds"}, "seesaw");
      c.restarts = s.value("restarts", c.restarts);
      c.convergence_delta = s.value("convergence_delta", c.convergence_delta);
      c.max_rounds = s.value("max_rounds", c.max_rounds);
    }
    if (j.contains("polytope")) {
      const json& p = j.at("polytope");
      check_keys(p, {"mode", "refinement"}, "polytope");
      if (p.contains("mode")) c.polytope_mode = polytope_mode_from_string(p.at("mode").get<std::string>());
      c.refinement = p.value("refinement", c.refinement);
    }
    if (j.contains("solver")) {
      const json& s = j.at("solver");
      check_keys(s, {"feas_tol", "gap_tol", "max_iter"}, "solver");
      c.solver.feas_tol = s.value("feas_tol", c.solver.feas_tol);
      c.solver.gap_tol = s.value("gap_tol", c.solver.gap_tol);
      c.solver.max_iter = s.value("max_iter", c.solver.max_iter);
    }
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
    c.output = j.value("output", c.output);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  }
  return c;
}

ScenarioConfig load_config(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("config file '" + path.string() + "' does not exist");
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(j, path.has_parent_path() ? path.parent_path() : fs::path("."));
}

json config_json(const ScenarioConfig& c) {
  json axes = json::array();
  for (const auto& a : c.measurements.axes) axes.push_back({a.x(), a.y(), a.z()});
  return json{
      {"state", {{"type", c.state.type}, {"d", c.state.d}, {"eta", c.state.eta}, {"path", c.state.path}}},
      {"n", c.n},
      {"k", c.k},
      {"method", to_string(c.method)},
      {"measurements", {{"family", c.measurements.family}, {"axes", axes}, {"path", c.measurements.path}}},
      {"quantity", to_string(c.quantity)},
      {"search", {{"family", to_string(c.search_family)}, {"restarts", c.restarts}, {"max_evals", c.max_evals}}},
      {"seesaw",
       {{"restarts", c.restarts}, {"convergence_delta", c.convergence_delta}, {"max_rounds", c.max_rounds}}},
      {"polytope", {{"mode", to_string(c.polytope_mode)}, {"refinement", c.refinement}}},
      {"solver", {{"feas_tol", c.solver.feas_tol}, {"gap_tol", c.solver.gap_tol}, {"max_iter", c.solver.max_iter}}},
      {"seed", c.seed},
      {"threads", c.threads},
      {"output", c.output}};
}

void validate(const ScenarioConfig& c) {
  if (!kStateTypes.count(c.state.type)) throw ConfigError("unknown state type '" + c.state.type + "'");
  if (c.state.type == "file") {
    if (c.state.path.empty()) throw ConfigError("state type 'file' needs a path");
    if (!fs::exists(resolve(c, c.state.path)))
      throw ConfigError("state file '" + resolve(c, c.state.path).string() + "' does not exist");
  } else if (c.state.type != "werner" && (c.state.d < 2 || c.state.d > 8)) {
    throw ConfigError("state dimension must lie in [2, 8]");
  }
  if (c.state.eta < 0.0 || c.state.eta > 1.0) throw ConfigError("state eta must lie in [0, 1]");
  if (c.n < 1 || c.n > 18) throw ConfigError("n must lie in [1, 18]");
  if (c.k < 1) throw ConfigError("k must be positive");
  if (c.restarts < 1) throw ConfigError("restarts must be at least 1");
  if (c.solver.max_iter < 1 || c.solver.feas_tol <= 0 || c.solver.gap_tol <= 0)
    throw ConfigError("solver options must be positive");
  const int d = state_dim(c);
  switch (c.method) {
    case Method::sdp_fixed: {
      const std::string& f = c.measurements.family;
      if (!kFixedFamilies.count(f)) throw ConfigError("unknown measurement family '" + f + "'");
      if (f != "mub" && f != "file" && d != 2) throw ConfigError("family '" + f + "' needs a qubit on Alice's side");
      if (f == "axes" && static_cast<int>(c.measurements.axes.size()) != c.n)
        throw ConfigError("'axes' must list n vectors");
      if (f == "file" && (c.measurements.path.empty() || !fs::exists(resolve(c, c.measurements.path))))
        throw ConfigError("measurement file is missing");
      break;
    }
    case Method::seesaw:
      if (c.k > d * d) throw ConfigError("k must not exceed d^2");
      if (std::pow(static_cast<double>(c.k), c.n) > static_cast<double>(kDefaultStrategyCap))
        throw ConfigError("k^n exceeds the strategy cap");
      if (c.quantity == Quantity::white_noise_t) throw ConfigError("seesaw supports white_noise or generalized");
      if (c.convergence_delta <= 0 || c.max_rounds < 1) throw ConfigError("seesaw options must be positive");
      break;
    case Method::search:
      if (d != 2) throw ConfigError("search families are qubit families");
      if (c.max_evals < 1) throw ConfigError("max_evals must be positive");
      break;
    case Method::lower_bound:
      if (d != 2) throw ConfigError("lower bounds need a qubit on Alice's side");
      if (c.k != 2) throw ConfigError("lower bounds cover dichotomic measurements (k = 2)");
      if (c.refinement < 1) throw ConfigError("polytope refinement must be positive");
      break;
  }
}

BipartiteState build_state(const ScenarioConfig& c) {
  const auto& s = c.state;
  if (s.type == "werner") return make_werner_qubit(s.eta);
  if (s.type == "isotropic") return make_isotropic(s.d, s.eta);
  if (s.type == "max_entangled") return make_max_entangled(s.d);
  if (s.type == "file") {
    try {
      return read_json_file(resolve(c, s.path)).get<BipartiteState>();
    } catch (const json::exception& e) {
      throw ConfigError("state file: " + std::string(e.what()));
    }
  }
  throw ConfigError("unknown state type '" + s.type + "'");
}

MeasurementSet build_measurements(const ScenarioConfig& c, int dim) {
  const auto& m = c.measurements;
  if (m.family == "mub") return mub_bases(dim, c.n);
  if (m.family == "planar") return equally_spaced_planar(c.n);
  if (m.family == "thomson") return thomson_set(c.n);
  if (m.family == "fibonacci") return fibonacci_set(c.n);
  if (m.family == "axes") return projective_set(m.axes);
  if (m.family == "file") {
    MeasurementSet ms;
    try {
      ms = read_json_file(resolve(c, m.path)).get<MeasurementSet>();
    } catch (const json::exception& e) {
      throw ConfigError("measurement file: " + std::string(e.what()));
    }
    const std::string err = ms.check();
    if (!err.empty()) throw ConfigError("measurement file: " + err);
    return ms;
  }
  throw ConfigError("unknown measurement family '" + m.family + "'");
}

// Records.

std::string git_blob_sha1(const std::string& content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr);
  EVP_DigestUpdate(ctx, header.data(), header.size());
  EVP_DigestUpdate(ctx, content.data(), content.size());
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return hex.str();
}

std::string record_hash(const RunRecord& r) {
  return git_blob_sha1(json{{"command", r.command}, {"config", r.config}, {"result", r.result}}.dump());
}

json record_json(const RunRecord& r) {
  return json{{"command", r.command},   {"config", r.config},
              {"result", r.result},     {"hash", r.hash},
              {"headline", r.headline}, {"wall_seconds", r.wall_seconds},
              {"solver_stats", r.solver_stats}, {"accurate", r.accurate}};
}

RunRecord record_from_json(const json& j) {
  RunRecord r;
  r.command = j.at("command").get<std::string>();
  r.config = j.at("config");
  r.result = j.at("result");
  r.hash = j.value("hash", std::string());
  r.headline = j.value("headline", 0.0);
  r.wall_seconds = j.value("wall_seconds", 0.0);
  r.solver_stats = j.value("solver_stats", json::object());
  r.accurate = j.value("accurate", true);
  return r;
}

fs::path save_record(const RunRecord& r, const fs::path& dir) {
  const std::string stem = r.command + "-" + r.hash.substr(0, 12);
  json doc = record_json(r);
  if (r.command == "lowerbound" && doc["result"].contains("lower_bound")) {
    const fs::path cert_dir = dir / (stem + "-certs");
    for (auto& c : doc["result"]["lower_bound"]["certificates"]) {
      const std::string name = "cert_" + std::to_string(c.at("index").get<int>()) + ".json";
      write_file_atomic(cert_dir / name, c.dump());
      c.erase("model");
      c["file"] = (fs::path(stem + "-certs") / name).string();
    }
  }
  const fs::path path = dir / (stem + ".json");
  write_file_atomic(path, doc.dump(1));
  return path;
}

RunRecord load_record(const fs::path& path) {
  json doc = read_json_file(path);
  if (doc.value("command", std::string()) == "lowerbound" && doc.contains("result") &&
      doc["result"].contains("lower_bound")) {
    const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    for (auto& c : doc["result"]["lower_bound"]["certificates"]) {
      if (!c.contains("file")) continue;
      const json stored = read_json_file(base / c.at("file").get<std::string>());
      c.erase("file");
      c["model"] = stored.at("model");
    }
  }
  return record_from_json(doc);
}

// Commands.

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

RobustnessOptions robustness_options(const ScenarioConfig& c) {
  RobustnessOptions o;
  o.solver = c.solver;
  return o;
}

json stats_json(const RobustnessResult& r) {
  return json{{"status", sdp::to_string(r.status)}, {"iterations", r.iterations}, {"gap", r.solver_gap}};
}

RunRecord finish(std::string command, const ScenarioConfig& c, json result, double headline, bool accurate,
                 json stats, Clock::time_point t0) {
  RunRecord r;
  r.command = std::move(command);
  r.config = config_json(c);
  r.result = std::move(result);
  r.headline = headline;
  r.accurate = accurate;
  r.solver_stats = std::move(stats);
  r.hash = record_hash(r);
  r.wall_seconds = seconds_since(t0);
  return r;
}

RobustnessResult robustness_of(const Assemblage& a, Quantity q, const RobustnessOptions& o) {
  switch (q) {
    case Quantity::white_noise: return white_noise_robustness(a, o);
    case Quantity::white_noise_t: return white_noise_robustness_t(a, o);
    case Quantity::generalized: return generalized_robustness(a, o);
  }
  throw InvalidParameter("unknown quantity");
}

RunRecord heuristic_record(const char* command, const ScenarioConfig& c, const BipartiteState& st,
                           const OptimizationRun& run, Clock::time_point t0) {
  const RobustnessResult cert = white_noise_robustness(assemblage_from(st, run.best_set), robustness_options(c));
  json result{{"state", st}, {"run", run}, {"certificate", cert}};
  json stats{{"restarts", run.restarts_used},
             {"evaluations", run.evaluations},
             {"converged", run.converged},
             {"certificate", stats_json(cert)}};
  return finish(command, c, std::move(result), run.best_value, run.accurate && cert.accurate(), std::move(stats), t0);
}

}  // namespace

RunRecord cmd_robustness(const ScenarioConfig& c) {
  if (c.method != Method::sdp_fixed) throw ConfigError("robustness runs need method sdp_fixed");
  validate(c);
  const auto t0 = Clock::now();
  const BipartiteState st = build_state(c);
  const MeasurementSet ms = build_measurements(c, st.dim_a);
  const Assemblage a = assemblage_from(st, ms);
  const RobustnessResult r = robustness_of(a, c.quantity, robustness_options(c));
  const double headline = c.quantity == Quantity::generalized ? r.value : r.eta;
  json result{{"measurements", ms}, {"assemblage", a}, {"robustness", r}};
  return finish("robustness", c, std::move(result), headline, r.accurate(), stats_json(r), t0);
}

RunRecord cmd_seesaw(const ScenarioConfig& c) {
  if (c.method != Method::seesaw) throw ConfigError("seesaw runs need method seesaw");
  validate(c);
  const auto t0 = Clock::now();
  const BipartiteState st = build_state(c);
  SeesawConfig sc;
  sc.restarts = c.restarts;
  sc.convergence_delta = c.convergence_delta;
  sc.max_rounds = c.max_rounds;
  sc.quantity = c.quantity;
  sc.seed = c.seed;
  sc.solver = c.solver;
  sc.threads = c.threads;
  return heuristic_record("seesaw", c, st, seesaw(st, c.n, c.k, sc), t0);
}

RunRecord cmd_search(const ScenarioConfig& c) {
  if (c.method != Method::search) throw ConfigError("search runs need method search");
  validate(c);
  const auto t0 = Clock::now();
  const BipartiteState st = build_state(c);
  SearchConfig sc;
  sc.family = c.search_family;
  sc.restarts = c.restarts;
  sc.max_evals = c.max_evals;
  sc.seed = c.seed;
  sc.solver = c.solver;
  sc.threads = c.threads;
  return heuristic_record("search", c, st, parametric_search(st, sc, c.n), t0);
}

RunRecord cmd_lowerbound(const ScenarioConfig& c) {
  if (c.method != Method::lower_bound) throw ConfigError("lowerbound runs need method lower_bound");
  validate(c);
  const auto t0 = Clock::now();
  const BipartiteState st = build_state(c);
  const SpherePolytope p = circumscribed_polytope(c.polytope_mode, c.refinement);
  LowerBoundOptions opt;
  opt.robustness = robustness_options(c);
  opt.threads = c.threads;
  const LowerBoundResult lb = lower_bound(st, c.n, p, opt);
  // A representative certificate: the configured set, or equally spaced
  // planar measurements.
  const bool explicit_set = c.measurements.family == "axes" || c.measurements.family == "file";
  const MeasurementSet ms = explicit_set ? build_measurements(c, 2) : equally_spaced_planar(c.n);
  const LhsModel model = certify_measurement_set(ms, lb, lb.eta_lb);
  json result{{"lower_bound", lb}, {"certified", {{"measurements", ms}, {"eta", lb.eta_lb}, {"model", model}}}};
  json stats{{"combinations", lb.certificates.size()},
             {"raw_combinations", lb.raw_combinations},
             {"covariance", to_string(lb.covariance)},
             {"circumradius", p.circumradius()}};
  return finish("lowerbound", c, std::move(result), lb.eta_lb, lb.accurate, std::move(stats), t0);
}

RunRecord run_config(const ScenarioConfig& c) {
  switch (c.method) {
    case Method::sdp_fixed: return cmd_robustness(c);
    case Method::seesaw: return cmd_seesaw(c);
    case Method::search: return cmd_search(c);
    case Method::lower_bound: return cmd_lowerbound(c);
  }
  throw ConfigError("unknown method");
}

// Verification.

namespace {

void add_check(VerifyReport& rep, bool ok, const std::string& line) {
  rep.ok = rep.ok && ok;
  rep.lines.push_back(std::string(ok ? "PASS " : "FAIL ") + line);
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(3) << std::scientific << v;
  return s.str();
}

void add_report(VerifyReport& rep, const CertificateReport& c, const std::string& what) {
  rep.worst_residual = std::max({rep.worst_residual, c.reconstruction_residual, c.positivity_violation,
                                 c.functional_violation});
  add_check(rep, c.ok,
            what + ": reconstruction " + fmt(c.reconstruction_residual) + ", positivity " +
                fmt(c.positivity_violation) + ", functional " + fmt(c.functional_violation) + ", duality " +
                fmt(c.duality_mismatch) + (c.message.empty() ? "" : " (" + c.message + ")"));
}

}  // namespace

VerifyReport verify_record(const RunRecord& r) {
  VerifyReport rep;
  add_check(rep, !r.hash.empty() && record_hash(r) == r.hash, "content hash " + r.hash.substr(0, 12));
  try {
    if (r.command == "robustness") {
      const Assemblage a = r.result.at("assemblage").get<Assemblage>();
      const RobustnessResult rr = r.result.at("robustness").get<RobustnessResult>();
      add_check(rep, rr.lhs_certificate.has_value(), "LHS certificate present");
      add_check(rep, rr.functional_certificate.has_value(), "steering functional present");
      add_report(rep, verify_certificates(rr, a), "robustness certificates");
    } else if (r.command == "seesaw" || r.command == "search") {
      const BipartiteState st = r.result.at("state").get<BipartiteState>();
      const OptimizationRun run = r.result.at("run").get<OptimizationRun>();
      const RobustnessResult cert = r.result.at("certificate").get<RobustnessResult>();
      add_check(rep, cert.lhs_certificate.has_value() && cert.functional_certificate.has_value(),
                "certificates present");
      add_report(rep, verify_certificates(cert, assemblage_from(st, run.best_set)), "best set certificates");
      add_check(rep, std::abs(cert.eta - std::min(1.0, run.best_value)) <= 1e-6,
                "best value matches its certificate (" + fmt(std::abs(cert.eta - std::min(1.0, run.best_value))) +
                    ")");
    } else if (r.command == "lowerbound") {
      const LowerBoundResult lb = r.result.at("lower_bound").get<LowerBoundResult>();
      add_report(rep, verify_lower_bound(lb), "vertex combination certificates");
      const json& cj = r.result.at("certified");
      const MeasurementSet ms = cj.at("measurements").get<MeasurementSet>();
      const double eta = cj.at("eta").get<double>();
      const LhsModel model = cj.at("model").get<LhsModel>();
      const double res = certified_residual(ms, lb, eta, model);
      const double neg = lhs_positivity_violation(model);
      rep.worst_residual = std::max({rep.worst_residual, res, neg});
      add_check(rep, eta <= lb.eta_lb + 1e-12 && res <= 1e-6 && neg <= kPsdTol,
                "certified set at eta " + std::to_string(eta) + ": reconstruction " + fmt(res) + ", positivity " +
                    fmt(neg));
    } else {
      add_check(rep, false, "unknown record command '" + r.command + "'");
    }
  } catch (const std::exception& e) {
    add_check(rep, false, std::string("record is incomplete: ") + e.what());
  }
  return rep;
}

VerifyReport cmd_verify(const fs::path& record_path) {
  RunRecord r;
  try {
    r = load_record(record_path);
  } catch (const std::exception& e) {
    VerifyReport rep;
    rep.ok = false;
    rep.lines.push_back(std::string("FAIL cannot load record: ") + e.what());
    return rep;
  }
  return verify_record(r);
}

// Tables.

json reference_values() {
  fs::path dir = STEERLAB_DATA_DIR;
  if (const char* env = std::getenv("STEERLAB_DATA_DIR"); env && *env) dir = env;
  return read_json_file(dir / "reference_values.json");
}

namespace {

std::optional<double> ref_value(const json& table, const std::string& row, int col) {
  const json& rows = table.at("rows");
  if (!rows.contains(row)) return std::nullopt;
  const json& v = rows.at(row).at(col);
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

template <typename F>
void fill(Table& t, const json* ref, const std::string& row, const std::string& col, int ref_col, bool run, F&& f) {
  TableCell cell;
  cell.row = row;
  cell.column = col;
  if (ref) cell.reference = ref_value(*ref, row, ref_col);
  if (run) {
    try {
      cell.computed = f();
      cell.status = "ok";
    } catch (const std::exception& e) {
      cell.status = std::string("error: ") + e.what();
    }
  }
  t.cells.push_back(std::move(cell));
}

double fixed_eta(const BipartiteState& st, const MeasurementSet& ms) {
  return white_noise_robustness(assemblage_from(st, ms)).eta;
}

SeesawConfig seesaw_config(const TableBudget& b) {
  SeesawConfig c;
  c.restarts = b.restarts;
  c.seed = b.seed;
  c.threads = b.threads;
  return c;
}

double lb_value(PolytopeMode mode, int refinement, int n, const TableBudget& b) {
  LowerBoundOptions o;
  o.threads = b.threads;
  return lower_bound(make_werner_qubit(1.0), n, circumscribed_polytope(mode, refinement), o).eta_lb;
}

}  // namespace

Table cmd_table(const std::string& id, const TableBudget& b) {
  const json refs = reference_values();
  const BipartiteState werner = make_werner_qubit(1.0);
  Table t;
  t.id = id;
  if (id == "I") {
    const json& ref = refs.at("table_I");
    t.title = ref.at("title").get<std::string>();
    t.columns = ref.at("columns").get<std::vector<std::string>>();
    for (int n = 2; n <= 18; ++n) {
      const std::string row = std::to_string(n);
      t.rows.push_back(row);
      fill(t, &ref, row, "gen_upper", 0, n <= b.max_heuristic_n,
           [&] { return seesaw(werner, n, 2, seesaw_config(b)).best_value; });
      fill(t, &ref, row, "gen_lower", 1, n <= b.max_sphere_lb_n,
           [&] { return lb_value(PolytopeMode::sphere, 3, n, b); });
      fill(t, &ref, row, "planar_upper", 2, n <= b.max_fixed_n,
           [&] { return fixed_eta(werner, equally_spaced_planar(n)); });
      fill(t, &ref, row, "planar_lower", 3, n <= b.max_circle_lb_n,
           [&] { return lb_value(PolytopeMode::circle, 64, n, b); });
      fill(t, &ref, row, "thomson", 4, n <= b.max_fixed_n, [&] { return fixed_eta(werner, thomson_set(n)); });
      fill(t, &ref, row, "fibonacci", 5, n <= b.max_fixed_n, [&] { return fixed_eta(werner, fibonacci_set(n)); });
    }
  } else if (id == "II") {
    const json& ref = refs.at("table_II");
    t.title = ref.at("title").get<std::string>();
    t.columns = ref.at("columns").get<std::vector<std::string>>();
    for (int n = 2; n <= 8; ++n) {
      const std::string row = std::to_string(n);
      t.rows.push_back(row);
      fill(t, &ref, row, "projective", 0, n <= b.max_heuristic_n,
           [&] { return seesaw(werner, n, 2, seesaw_config(b)).best_value; });
      int col = 1;
      for (SearchFamily f : {SearchFamily::trine, SearchFamily::sic}) {
        fill(t, &ref, row, t.columns[col], col, n <= std::min(b.max_heuristic_n, 3), [&] {
          SearchConfig sc;
          sc.family = f;
          sc.restarts = b.restarts;
          sc.seed = b.seed;
          sc.threads = b.threads;
          return parametric_search(werner, sc, n).best_value;
        });
        ++col;
      }
    }
  } else if (id == "III") {
    const json& ref = refs.at("table_III");
    t.title = ref.at("title").get<std::string>();
    t.columns = ref.at("columns").get<std::vector<std::string>>();
    for (int k = 2; k <= 7; ++k) {
      const std::string row = std::to_string(k);
      t.rows.push_back(row);
      for (int d = 2; d <= 6; ++d)
        fill(t, &ref, row, t.columns[d - 2], d - 2, d <= b.max_d && k <= d + 1,
             [&] { return seesaw(make_max_entangled(d), 2, k, seesaw_config(b)).best_value; });
    }
  } else if (id == "IV") {
    const json& ref = refs.at("table_IV");
    t.title = ref.at("title").get<std::string>();
    t.columns = ref.at("columns").get<std::vector<std::string>>();
    for (int n = 2; n <= 6; ++n) {
      const std::string row = std::to_string(n);
      t.rows.push_back(row);
      for (int d = 2; d <= 6; ++d) {
        const bool mub_exists = n <= (d == 6 ? 3 : d + 1);
        const bool small = std::pow(static_cast<double>(d), n) <= 4096.0;
        fill(t, &ref, row, t.columns[d - 2], d - 2, mub_exists && small,
             [&] { return fixed_eta(make_max_entangled(d), mub_bases(d, n)); });
      }
      for (int d = 2; d <= 6; ++d) {
        const bool run = d <= b.max_d && n <= b.max_heuristic_n && std::pow(static_cast<double>(d), n) <= 64.0;
        fill(t, &ref, row, t.columns[d + 3], d + 3, run,
             [&] { return seesaw(make_max_entangled(d), n, d, seesaw_config(b)).best_value; });
      }
    }
  } else if (id == "plot") {
    t.title = "Critical visibility versus N, with the 1/2 and 2/pi reference lines";
    t.columns = {"planar_upper", "thomson", "fibonacci", "gen_upper", "half", "two_over_pi"};
    for (int n = 2; n <= b.max_fixed_n; ++n) {
      const std::string row = std::to_string(n);
      t.rows.push_back(row);
      fill(t, nullptr, row, "planar_upper", 0, true, [&] { return fixed_eta(werner, equally_spaced_planar(n)); });
      fill(t, nullptr, row, "thomson", 0, true, [&] { return fixed_eta(werner, thomson_set(n)); });
      fill(t, nullptr, row, "fibonacci", 0, true, [&] { return fixed_eta(werner, fibonacci_set(n)); });
      fill(t, nullptr, row, "gen_upper", 0, n <= b.max_heuristic_n,
           [&] { return seesaw(werner, n, 2, seesaw_config(b)).best_value; });
      fill(t, nullptr, row, "half", 0, true, [] { return 0.5; });
      fill(t, nullptr, row, "two_over_pi", 0, true, [] { return 2.0 / std::numbers::pi; });
    }
  } else {
    throw ConfigError("unknown table '" + id + "' (expected I, II, III, IV or plot)");
  }
  return t;
}

std::string format_table(const Table& t) {
  std::ostringstream os;
  os << "Table " << t.id << ": " << t.title << "\n";
  os << "cells read computed [reference] (deviation); '-' marks cells without a value\n";
  os << std::left << std::setw(6) << "row";
  for (const auto& c : t.columns) os << std::setw(30) << c;
  os << "\n";
  for (const auto& row : t.rows) {
    os << std::setw(6) << row;
    for (const auto& col : t.columns) {
      std::string text = "-";
      for (const auto& cell : t.cells) {
        if (cell.row != row || cell.column != col) continue;
        std::ostringstream s;
        s << std::fixed << std::setprecision(4);
        if (cell.computed)
          s << *cell.computed;
        else if (cell.status.rfind("error", 0) == 0)
          s << "error";
        else
          s << (cell.reference ? "skipped" : "-");
        if (cell.reference) s << " [" << *cell.reference << "]";
        if (cell.reference && cell.computed) s << " (" << std::showpos << cell.deviation() << std::noshowpos << ")";
        text = s.str();
      }
      os << std::setw(30) << text;
    }
    os << "\n";
  }
  for (const auto& cell : t.cells)
    if (cell.status.rfind("error", 0) == 0) os << "row " << cell.row << ", " << cell.column << ": " << cell.status << "\n";
  return os.str();
}

std::string table_csv(const Table& t) {
  std::ostringstream os;
  os << "row,column,reference,computed,deviation,status\n" << std::setprecision(10);
  for (const auto& c : t.cells) {
    std::string status = c.status;
    for (auto& ch : status)
      if (ch == ',' || ch == '\n') ch = ';';
    os << c.row << ',' << c.column << ',';
    if (c.reference) os << *c.reference;
    os << ',';
    if (c.computed) os << *c.computed;
    os << ',';
    if (c.reference && c.computed) os << c.deviation();
    os << ',' << status << '\n';
  }
  return os.str();
}

}  // namespace steerlab
