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

#include <unistd.h>

#include <fstream>

#include "doctest.h"
#include "support.hpp"

using namespace steerlab;
using steerlab::testing::Gen;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("steerlab_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ScenarioConfig config_from(const char* text) { return parse_config(json::parse(text)); }

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("git blob hashes match known object ids") {
    CHECK(git_blob_sha1("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
    CHECK(git_blob_sha1("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
  }

  TEST_CASE("robustness results round trip through JSON") {
    Gen g(71);
    const Assemblage a = g.assemblage(2, 2, 3);
    const RobustnessResult r = white_noise_robustness(a);
    const json j = r;
    const RobustnessResult back = j.get<RobustnessResult>();
    CHECK(back.eta == r.eta);
    CHECK(json(back) == j);
    CHECK(json(json(a).get<Assemblage>()) == json(a));
    CHECK(verify_certificates(back, json(a).get<Assemblage>()).ok);
  }

  TEST_CASE("lower-bound results round trip through JSON") {
    const LowerBoundResult lb = lower_bound(make_werner_qubit(1.0), 2, circumscribed_polytope(PolytopeMode::circle, 4));
    const json j = lb;
    const LowerBoundResult back = j.get<LowerBoundResult>();
    CHECK(json(back) == j);
    CHECK(verify_lower_bound(back).ok);
  }

  TEST_CASE("malformed operator JSON is rejected") {
    const json bad = {{"dim", 2}, {"re", {1.0, 0.0, 0.0}}, {"im", {0.0, 0.0, 0.0, 0.0}}};
    CHECK_THROWS_AS(bad.get<HermitianOperator>(), InvalidDimension);
  }

  TEST_CASE("atomic writes leave no temporary file") {
    const fs::path dir = scratch_dir("atomic");
    write_file_atomic(dir / "a" / "b.json", "{}");
    CHECK(read_text_file(dir / "a" / "b.json") == "{}");
    CHECK_FALSE(fs::exists(dir / "a" / "b.json.tmp"));
    fs::remove_all(dir);
  }
}

TEST_SUITE("config") {
  TEST_CASE("defaults and overrides") {
    const ScenarioConfig c = config_from(R"({"state": {"type": "isotropic", "d": 3, "eta": 0.9}, "n": 3,
        "method": "seesaw", "seesaw": {"restarts": 7}, "seed": 5})");
    CHECK(c.state.type == "isotropic");
    CHECK(c.state.d == 3);
    CHECK(c.method == Method::seesaw);
    CHECK(c.restarts == 7);
    CHECK(c.seed == 5u);
    CHECK_NOTHROW(validate(c));
    CHECK(parse_config(config_json(c)).restarts == 7);
  }

  TEST_CASE("invalid configs raise ConfigError") {
    CHECK_THROWS_AS(config_from(R"({"nn": 2})"), ConfigError);
    CHECK_THROWS_AS(config_from(R"({"method": "magic"})"), ConfigError);
    CHECK_THROWS_AS(config_from(R"({"n": "two"})"), ConfigError);
    CHECK_THROWS_AS(config_from(R"({"quantity": "other"})"), ConfigError);
    CHECK_THROWS_AS(validate(config_from(R"({"state": {"type": "qutrit"}})")), ConfigError);
    CHECK_THROWS_AS(validate(config_from(R"({"state": {"type": "file", "path": "/nonexistent.json"}})")),
                    ConfigError);
    CHECK_THROWS_AS(validate(config_from(R"({"method": "lower_bound", "k": 3})")), ConfigError);
    CHECK_THROWS_AS(validate(config_from(R"({"method": "seesaw", "n": 13, "k": 2})")), ConfigError);
    CHECK_THROWS_AS(validate(config_from(R"({"method": "seesaw", "k": 5})")), ConfigError);
    CHECK_THROWS_AS(validate(config_from(R"({"state": {"type": "isotropic", "d": 3}, "method": "search"})")),
                    ConfigError);
    CHECK_THROWS_AS(validate(config_from(R"({"measurements": {"family": "axes", "axes": [[0, 0, 1]]}})")),
                    ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
  }

  TEST_CASE("file states and measurement files resolve against the config directory") {
    const fs::path dir = scratch_dir("files");
    write_file_atomic(dir / "state.json", json(make_isotropic(2, 0.9)).dump());
    write_file_atomic(dir / "ms.json", json(mub_bases(2, 2)).dump());
    write_file_atomic(dir / "cfg.json", R"({"state": {"type": "file", "path": "state.json"},
        "measurements": {"family": "file", "path": "ms.json"}})");
    const ScenarioConfig c = load_config(dir / "cfg.json");
    CHECK_NOTHROW(validate(c));
    const RunRecord r = cmd_robustness(c);
    CHECK(r.headline == doctest::Approx(1.0 / std::sqrt(2.0) / 0.9).epsilon(1e-6));
    fs::remove_all(dir);
  }
}

TEST_SUITE("records") {
  TEST_CASE("robustness record saves, reloads and verifies") {
    const fs::path dir = scratch_dir("records");
    const ScenarioConfig c = config_from(R"({"n": 3, "measurements": {"family": "planar"}})");
    const RunRecord r = cmd_robustness(c);
    CHECK(r.headline == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
    CHECK(r.hash == record_hash(r));
    const fs::path path = save_record(r, dir);
    const VerifyReport rep = cmd_verify(path);
    CHECK(rep.ok);

    json doc = read_json_file(path);
    json& sigma = doc["result"]["robustness"]["lhs_certificate"]["sigma"][0]["re"][0];
    sigma = sigma.get<double>() + 1e-3;
    write_file_atomic(dir / "tampered.json", doc.dump());
    const VerifyReport bad = cmd_verify(dir / "tampered.json");
    CHECK_FALSE(bad.ok);
    CHECK(bad.worst_residual > kReconstructionTol);

    doc["result"]["robustness"]["lhs_certificate"] = nullptr;
    write_file_atomic(dir / "missing.json", doc.dump());
    CHECK_FALSE(cmd_verify(dir / "missing.json").ok);
    fs::remove_all(dir);
  }

  TEST_CASE("lower-bound record stores certificates separately and verifies at eta_lb") {
    const fs::path dir = scratch_dir("lb");
    const ScenarioConfig c = config_from(R"({"n": 2, "method": "lower_bound", "polytope": {"refinement": 16}})");
    const RunRecord r = cmd_lowerbound(c);
    const fs::path path = save_record(r, dir);
    const json stored = read_json_file(path);
    for (const auto& cert : stored["result"]["lower_bound"]["certificates"]) {
      CHECK_FALSE(cert.contains("model"));
      CHECK(fs::exists(dir / cert["file"].get<std::string>()));
    }
    const RunRecord back = load_record(path);
    CHECK(back.hash == r.hash);
    CHECK(record_hash(back) == r.hash);
    CHECK(verify_record(back).ok);
    fs::remove_all(dir);
  }

  TEST_CASE("heuristic records replay to the same headline under a fixed seed") {
    const ScenarioConfig c = config_from(R"({"n": 3, "method": "seesaw", "seesaw": {"restarts": 4}, "seed": 9})");
    const RunRecord a = cmd_seesaw(c), b = cmd_seesaw(c);
    CHECK(std::abs(a.headline - b.headline) <= 1e-9);
    CHECK(a.hash == b.hash);
    CHECK(verify_record(a).ok);
  }

  TEST_CASE("commands refuse configs for other methods") {
    CHECK_THROWS_AS(cmd_seesaw(config_from(R"({"method": "sdp_fixed"})")), ConfigError);
  }
}

TEST_SUITE("tables") {
  TEST_CASE("reference fixture covers tables I-IV") {
    const json refs = reference_values();
    for (const char* id : {"table_I", "table_II", "table_III", "table_IV"}) {
      REQUIRE(refs.contains(id));
      CHECK(refs[id].contains("columns"));
      CHECK(refs[id].contains("rows"));
    }
    CHECK(refs["table_I"]["rows"]["2"][2].get<double>() == doctest::Approx(0.7071));
  }

  TEST_CASE("rows beyond the budget are marked skipped") {
    TableBudget b;
    b.restarts = 2;
    b.max_d = 2;
    const Table t = cmd_table("III", b);
    int computed = 0, skipped = 0;
    for (const auto& cell : t.cells) {
      if (cell.status == "ok") ++computed;
      if (cell.status == "skipped") ++skipped;
    }
    CHECK(computed == 2);
    CHECK(skipped == static_cast<int>(t.cells.size()) - 2);
    CHECK(t.cells.size() == t.rows.size() * t.columns.size());
    const std::string text = format_table(t);
    CHECK(text.find("skipped") != std::string::npos);
    const std::string csv = table_csv(t);
    CHECK(csv.rfind("row,column,reference,computed,deviation,status\n", 0) == 0);
    for (const auto& cell : t.cells)
      if (cell.status == "ok") CHECK(*cell.computed == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-3));
    CHECK_THROWS_AS(cmd_table("V", b), ConfigError);
  }
}
