#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "overlap/cli/commands.hpp"

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = overlap::cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("overlap_cli_test_" + name);
}

overlap::io::Json json_of(const Run& r) { return overlap::io::Json::parse(r.out); }

}  // namespace

TEST_CASE("expand matches the golden output", "[cli]") {
  const auto r = run({"expand", "--word", "Cdd", "--graph", "{1,2}"});
  CHECK(r.code == 0);
  CHECK(r.out == slurp(std::filesystem::path(OVERLAP_GOLDEN_DIR) / "expand_cdd_12.txt"));
  const auto d = run({"expand", "--word", "D", "--graph", "{1,2}"});
  CHECK(d.out == r.out);
}

TEST_CASE("expand edge cases", "[cli]") {
  CHECK(run({"expand", "--graph", "{2,1}"}).out == "{1,2}\n");
  CHECK(run({"expand", "--word", "d", "--graph", "1"}).out == "0\n");
  CHECK(run({"expand", "--word", "x", "--graph", "{1,2}"}).code == 2);
}

TEST_CASE("verify exit codes", "[cli]") {
  CHECK(run({"verify", "--graph", "{1,2}", "--n", "2"}).code == 0);
  const auto big = run({"verify", "--graph", "{1,2}", "--n", "4"});
  CHECK(big.code == 2);
  CHECK(big.err.find("error:") != std::string::npos);
  const auto bad = run({"verify", "--graph", "{1,1}"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("at byte 3") != std::string::npos);
  CHECK(run({"verify", "--graph", "{1,2}", "--nonsense"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("verify JSON document", "[cli][json]") {
  const auto a = run({"verify", "--graph", "{1,2}{2,3}", "--n", "2", "--json"});
  REQUIRE(a.code == 0);
  const auto doc = json_of(a);
  const auto& p = overlap::io::document_payload(doc);
  CHECK(p["kind"] == "theorem");
  CHECK(p["equal"] == true);
  CHECK(p["counts"]["canonical_lhs"] == 18);
  CHECK(doc["timings"].contains("wall_seconds"));
  const auto round = overlap::io::theorem_report_from_json(p);
  CHECK(round.equal);
  CHECK(round.n == 2);
  const auto b = json_of(run({"verify", "--graph", "{1,2}{2,3}", "--n", "2", "--json"}));
  CHECK(doc["payload_hash"] == b["payload_hash"]);
}

TEST_CASE("counts", "[cli]") {
  const auto r = run({"counts", "--graph", "{1,2}", "--n", "2"});
  CHECK(r.code == 0);
  CHECK(r.out.find("raw lhs 48") != std::string::npos);
  CHECK(r.out.find("raw rhs 16") != std::string::npos);
  CHECK(r.out.find("canonical lhs 8") != std::string::npos);
}

TEST_CASE("estimate", "[cli]") {
  const auto r = run({"estimate", "--graph", "{1,2}", "--model", "sk", "--N", "2", "--beta", "0",
                      "--method", "quadrature", "--json"});
  REQUIRE(r.code == 0);
  const auto p = overlap::io::document_payload(json_of(r));
  CHECK(std::abs(p["estimate"]["mean"].get<double>() - 0.5) < 1e-12);
  CHECK(run({"estimate", "--graph", "{1}{1,2}"}).code == 2);
  CHECK(run({"estimate", "--graph", "{1,2}", "--model", "potts"}).code == 2);
  CHECK(run({"estimate", "--graph", "{1,2}{3,4}{5,6}", "--N", "5", "--budget", "20"}).code == 2);
  const auto csv = scratch("curve.csv");
  const auto c = run({"estimate", "--graph", "{1,2}", "--samples", "200", "--csv", csv.string()});
  CHECK(c.code == 0);
  const auto text = slurp(csv);
  CHECK(text.rfind("lambda,", 0) == 0);
  std::filesystem::remove(csv);
}

TEST_CASE("hash is independent of the thread count", "[cli][json][determinism]") {
  const std::vector<std::string> base{"estimate", "--graph", "{1,2}{2,3}", "--beta",  "0.5",
                                      "--samples", "2000",   "--seed",     "4",       "--json"};
  auto with = [&](const char* t) {
    auto a = base;
    a.push_back("--threads");
    a.push_back(t);
    return json_of(run(a));
  };
  const auto one = with("1");
  CHECK(one["payload_hash"] == with("3")["payload_hash"]);
  CHECK(one["payload"] == with("3")["payload"]);
}

TEST_CASE("config file supplies defaults and flags win", "[cli]") {
  const auto path = scratch("config.json");
  {
    std::ofstream f(path);
    f << R"({"graph": "{1,2}{2,3}", "n": 2})";
  }
  const auto r = run({"counts", "--config", path.string(), "--json"});
  REQUIRE(r.code == 0);
  auto p = overlap::io::document_payload(json_of(r));
  CHECK(p["input"] == "{1,2}{2,3}");
  CHECK(p["n"] == 2);
  const auto w = run({"counts", "--config", path.string(), "--n", "1", "--json"});
  p = overlap::io::document_payload(json_of(w));
  CHECK(p["n"] == 1);
  CHECK(p["input"] == "{1,2}{2,3}");
  {
    std::ofstream f(path);
    f << R"({"samples": 10})";
  }
  CHECK(run({"counts", "--config", path.string()}).code == 2);
  {
    std::ofstream f(path);
    f << "not json";
  }
  CHECK(run({"counts", "--config", path.string()}).code == 2);
  std::filesystem::remove(path);
  CHECK(run({"counts", "--config", path.string()}).code == 2);
}

TEST_CASE("identity and baseline commands", "[cli]") {
  const auto r = run({"identity", "--graph", "{1,2}", "--N", "2", "--method", "quadrature"});
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') >= 3);
  const auto b = run({"baseline", "--N", "2", "--method", "quadrature", "--json"});
  CHECK(b.code == 0);
  const auto p = overlap::io::document_payload(json_of(b));
  CHECK(p["report"]["rows"].size() == 2);
  CHECK(run({"identity", "--graph", "{1,2}", "--lambda-grid", "0.1,-0.2"}).code == 2);
  CHECK(run({"baseline", "--N", "3", "--method", "quadrature"}).code == 2);
}

TEST_CASE("output file", "[cli]") {
  const auto path = scratch("out.txt");
  CHECK(run({"expand", "--graph", "{1,2}", "--out", path.string()}).code == 0);
  CHECK(slurp(path) == "{1,2}\n");
  std::filesystem::remove(path);
}
