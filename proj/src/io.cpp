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

#include "steerlab/io.hpp"

#include <fstream>
#include <sstream>

namespace steerlab {

namespace {

json vec_json(const Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

Vector3d json_vec(const json& j) {
  if (!j.is_array() || j.size() != 3) throw InvalidParameter("expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

template <typename T>
std::optional<T> optional_field(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

constexpr std::int64_t kMaxTable = std::int64_t{1} << 24;

}  // namespace

void to_json(json& j, const HermitianOperator& h) {
  const int d = h.dim();
  std::vector<double> re, im;
  re.reserve(d * d);
  im.reserve(d * d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) {
      re.push_back(h(r, c).real());
      im.push_back(h(r, c).imag());
    }
  j = json{{"dim", d}, {"re", re}, {"im", im}};
}

void from_json(const json& j, HermitianOperator& h) {
  const int d = j.at("dim").get<int>();
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  if (d < 1 || re.size() != static_cast<size_t>(d * d) || im.size() != re.size())
    throw InvalidDimension("operator JSON: entry count does not match dim " + std::to_string(d));
  MatrixXcd m(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) m(r, c) = cplx(re[r * d + c], im[r * d + c]);
  h = HermitianOperator(m);
}

void to_json(json& j, const Povm& p) { j = json{{"dim", p.dim}, {"elements", p.elements}}; }

void from_json(const json& j, Povm& p) {
  p.dim = j.at("dim").get<int>();
  p.elements = j.at("elements").get<std::vector<HermitianOperator>>();
}

void to_json(json& j, const MeasurementSet& ms) {
  j = json{{"family", to_string(ms.tag())}, {"povms", ms.povms()}};
}

void from_json(const json& j, MeasurementSet& ms) {
  const FamilyTag tag = j.contains("family") ? family_from_string(j.at("family").get<std::string>())
                                             : FamilyTag::general;
  ms = MeasurementSet(j.at("povms").get<std::vector<Povm>>(), tag);
}

void to_json(json& j, const BipartiteState& s) { j = json{{"dim_a", s.dim_a}, {"dim_b", s.dim_b}, {"rho", s.rho}}; }

void from_json(const json& j, BipartiteState& s) {
  s = BipartiteState(j.at("dim_a").get<int>(), j.at("dim_b").get<int>(), j.at("rho").get<HermitianOperator>());
}

void to_json(json& j, const Assemblage& a) {
  json rows = json::array();
  for (int x = 0; x < a.n(); ++x) {
    json row = json::array();
    for (int o = 0; o < a.k(); ++o) row.push_back(a(x, o));
    rows.push_back(std::move(row));
  }
  j = json{{"n", a.n()}, {"k", a.k()}, {"dim_b", a.dim_b()}, {"members", std::move(rows)}};
}

void from_json(const json& j, Assemblage& a) {
  a = Assemblage(j.at("members").get<std::vector<std::vector<HermitianOperator>>>());
}

void to_json(json& j, const LhsModel& m) {
  j = json{{"radix", m.strategies.radices()}, {"labels", m.labels}, {"sigma", m.sigma}};
}

void from_json(const json& j, LhsModel& m) {
  m.strategies = StrategyTable(j.at("radix").get<std::vector<int>>(), kMaxTable);
  m.labels = j.at("labels").get<std::vector<std::vector<int>>>();
  m.sigma = j.at("sigma").get<std::vector<HermitianOperator>>();
  if (static_cast<int>(m.sigma.size()) != m.strategies.size())
    throw InvalidDimension("LHS model JSON: sigma count does not match the strategy table");
  if (static_cast<int>(m.labels.size()) != m.strategies.n())
    throw InvalidDimension("LHS model JSON: labels do not match the strategy table");
  for (int x = 0; x < m.strategies.n(); ++x)
    if (static_cast<int>(m.labels[x].size()) != m.strategies.radix(x))
      throw InvalidDimension("LHS model JSON: label row does not match its radix");
}

void to_json(json& j, const SteeringFunctional& f) { j = json{{"coefficients", f.coefficients}}; }

void from_json(const json& j, SteeringFunctional& f) {
  f.coefficients = j.at("coefficients").get<std::vector<std::vector<HermitianOperator>>>();
}

sdp::Status status_from_string(const std::string& s) {
  for (auto st : {sdp::Status::optimal, sdp::Status::infeasible, sdp::Status::unbounded, sdp::Status::inaccurate})
    if (s == sdp::to_string(st)) return st;
  throw InvalidParameter("unknown solver status '" + s + "'");
}

void to_json(json& j, const RobustnessResult& r) {
  j = json{{"quantity", to_string(r.quantity)},
           {"value", r.value},
           {"eta", r.eta},
           {"functional_value", r.functional_value},
           {"solver_gap", r.solver_gap},
           {"status", sdp::to_string(r.status)},
           {"iterations", r.iterations}};
  j["lhs_certificate"] = r.lhs_certificate ? json(*r.lhs_certificate) : json(nullptr);
  j["functional_certificate"] = r.functional_certificate ? json(*r.functional_certificate) : json(nullptr);
}

void from_json(const json& j, RobustnessResult& r) {
  r.quantity = quantity_from_string(j.at("quantity").get<std::string>());
  r.value = j.at("value").get<double>();
  r.eta = j.at("eta").get<double>();
  r.functional_value = j.value("functional_value", 0.0);
  r.solver_gap = j.value("solver_gap", 0.0);
  r.status = status_from_string(j.value("status", std::string("optimal")));
  r.iterations = j.value("iterations", 0);
  r.lhs_certificate = optional_field<LhsModel>(j, "lhs_certificate");
  r.functional_certificate = optional_field<SteeringFunctional>(j, "functional_certificate");
}

void to_json(json& j, const OptimizationRun& r) {
  j = json{{"best_value", r.best_value},       {"best_set", r.best_set},
           {"trace", r.trace},                 {"restart_values", r.restart_values},
           {"best_params", r.best_params},     {"restarts_used", r.restarts_used},
           {"evaluations", r.evaluations},     {"converged", r.converged},
           {"accurate", r.accurate}};
}

void from_json(const json& j, OptimizationRun& r) {
  r.best_value = j.at("best_value").get<double>();
  r.best_set = j.at("best_set").get<MeasurementSet>();
  r.trace = j.value("trace", std::vector<double>{});
  r.restart_values = j.value("restart_values", std::vector<double>{});
  r.best_params = j.value("best_params", std::vector<double>{});
  r.restarts_used = j.value("restarts_used", 0);
  r.evaluations = j.value("evaluations", 0);
  r.converged = j.value("converged", false);
  r.accurate = j.value("accurate", true);
}

void to_json(json& j, const SpherePolytope& p) {
  json verts = json::array(), normals = json::array();
  for (const auto& v : p.vertices) verts.push_back(vec_json(v));
  for (const auto& w : p.facet_normals) normals.push_back(vec_json(w));
  j = json{{"mode", to_string(p.mode)},
           {"refinement", p.refinement},
           {"circumradius", p.circumradius()},
           {"vertices", std::move(verts)},
           {"faces", p.faces},
           {"facet_normals", std::move(normals)},
           {"facet_offsets", p.facet_offsets}};
}

void from_json(const json& j, SpherePolytope& p) {
  p.mode = polytope_mode_from_string(j.at("mode").get<std::string>());
  p.refinement = j.at("refinement").get<int>();
  p.vertices.clear();
  p.facet_normals.clear();
  for (const auto& v : j.at("vertices")) p.vertices.push_back(json_vec(v));
  for (const auto& w : j.at("facet_normals")) p.facet_normals.push_back(json_vec(w));
  p.faces = j.at("faces").get<std::vector<std::vector<int>>>();
  p.facet_offsets = j.at("facet_offsets").get<std::vector<double>>();
  if (p.vertices.size() % 2 != 0 || p.faces.size() != p.facet_normals.size() ||
      p.faces.size() != p.facet_offsets.size())
    throw InvalidDimension("polytope JSON: inconsistent vertex or facet lists");
}

void to_json(json& j, const LowerBoundResult& r) {
  json certs = json::array();
  int index = 0;
  for (const auto& [combo, c] : r.certificates)
    certs.push_back(json{{"index", index++}, {"combo", combo}, {"eta", c.eta}, {"accurate", c.accurate},
                         {"model", c.model}});
  j = json{{"eta_lb", r.eta_lb},
           {"worst_vertex_combo", r.worst_vertex_combo},
           {"n", r.n},
           {"covariance", to_string(r.covariance)},
           {"raw_combinations", r.raw_combinations},
           {"accurate", r.accurate},
           {"polytope", r.polytope},
           {"state", r.state},
           {"certificates", std::move(certs)}};
}

void from_json(const json& j, LowerBoundResult& r) {
  r.eta_lb = j.at("eta_lb").get<double>();
  r.worst_vertex_combo = j.at("worst_vertex_combo").get<VertexCombo>();
  r.n = j.at("n").get<int>();
  const std::string cov = j.at("covariance").get<std::string>();
  r.covariance = cov == "unitary" ? Covariance::unitary : cov == "conjugate" ? Covariance::conjugate : Covariance::none;
  r.raw_combinations = j.value("raw_combinations", std::int64_t{0});
  r.accurate = j.value("accurate", true);
  r.polytope = j.at("polytope").get<SpherePolytope>();
  r.state = j.at("state").get<BipartiteState>();
  r.certificates.clear();
  for (const auto& c : j.at("certificates")) {
    ComboCertificate cc;
    cc.eta = c.at("eta").get<double>();
    cc.accurate = c.value("accurate", true);
    cc.model = c.at("model").get<LhsModel>();
    r.certificates.emplace(c.at("combo").get<VertexCombo>(), std::move(cc));
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidParameter("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json_file(const std::filesystem::path& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw InvalidParameter("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw Error("short write to '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

}  // namespace steerlab
