#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <functional>
#include <fstream>
#include <sstream>

#include "clab/commands.hpp"
#include "clab/error.hpp"
#include "clab/scene.hpp"

using namespace clab;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::IoError;
}

std::string message_of(const std::string& text) {
  try {
    parse_scene(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("clab-test-" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kJetScene = R"({
  "chart": {"jet": {"alpha": {"10": 0.5, "11": 0.2, "21": 0.3}, "beta": {"10": -0.7, "11": 1.5}}},
  "grid": 32,
  "lens": "Q3"
})";

}  // namespace

TEST_CASE("scene: defaults and round trip") {
  const Scene s = parse_scene(R"({"chart": {"gallery": "sphere-normals"}})");
  CHECK(s.chart.source == ChartSource::Gallery);
  CHECK(s.grid == 96);
  CHECK(s.lens == Lens::Q2);
  CHECK(!s.region);
  CHECK(parse_scene(serialize_scene(s)) == s);

  Scene t = parse_scene(kJetScene);
  t.region = Domain{-0.3, 0.2, -0.4, 0.1};
  t.seed = 99;
  t.tolerances.pitch = 1e-10;
  t.outputs.dir = "elsewhere";
  const std::string text = serialize_scene(t);
  CHECK(parse_scene(text) == t);
  CHECK(serialize_scene(parse_scene(text)) == text);

  Scene g = parse_scene(R"({"chart": {"surface": {"kind": "graph", "height": {"20": 0.5, "22": -0.25}}},
                            "region": {"u_min": -1, "u_max": 1, "v_min": -1, "v_max": 1}})");
  CHECK(parse_scene(serialize_scene(g)) == g);
}

TEST_CASE("scene: jet frame at the origin") {
  const Scene s = parse_scene(kJetScene);
  const PointFrame f = make_chart(s).frame(0.0, 0.0);
  CHECK(f.fund.a == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(f.fund.b1 == doctest::Approx(-0.2).epsilon(1e-14));
  CHECK(f.fund.b2 == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(f.fund.c == doctest::Approx(-1.5).epsilon(1e-14));
  CHECK(f.fund.A == doctest::Approx(1.0));
  CHECK(f.fund.C == doctest::Approx(1.0));
  CHECK(std::abs(f.fund.B) < 1e-15);
}

TEST_CASE("scene: errors carry position") {
  const std::string unknown = "{\n  \"chart\": {\"gallery\": \"sphere-normals\"},\n  \"speling\": 3\n}\n";
  CHECK(code_of([&] { parse_scene(unknown); }) == ErrorCode::SchemaError);
  const std::string m = message_of(unknown);
  CHECK(m.find("speling") != std::string::npos);
  CHECK(m.find("line 3, column 3") != std::string::npos);

  CHECK(code_of([] { parse_scene(R"({"chart": {"gallery": "sphere-normals"},})"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_scene(R"({"chart": {"gallery": "x"}, "grid": 1, "grid": 2})"); }) ==
        ErrorCode::ParseError);
  CHECK(code_of([] { parse_scene(R"({"grid": 32})"); }) == ErrorCode::SchemaError);
  CHECK(code_of([] { parse_scene(R"({"chart": {"gallery": "sphere-normals"}, "grid": "32"})"); }) ==
        ErrorCode::SchemaError);
  CHECK(code_of([] { parse_scene(R"({"chart": {"gallery": "sphere-normals"}, "grid": 8})"); }) ==
        ErrorCode::RangeError);
  CHECK(code_of([] { parse_scene(R"({"chart": {"gallery": "sphere-normals"}, "lens": "Q7"})"); }) ==
        ErrorCode::SchemaError);
  CHECK(code_of([] { parse_scene(R"({"chart": {"jet": {"alpha": {"41": 1}}}})"); }) == ErrorCode::SchemaError);
  CHECK(code_of([] {
          parse_scene(R"({"chart": {"surface": {"kind": "sphere", "params": [1]}}})");
        }) == ErrorCode::SchemaError);
  // The jet chart lives on u^2 + v^2 < 1.
  const std::string outside = R"({"chart": {"jet": {"alpha": {"10": 1}}},
      "region": {"u_min": -1.2, "u_max": 0.5, "v_min": -0.5, "v_max": 0.5}})";
  CHECK(code_of([&] { parse_scene(outside); }) == ErrorCode::RangeError);
  CHECK(message_of(outside).find("/region") != std::string::npos);
  CHECK(code_of([] { check_seed_density(0.0); }) == ErrorCode::RangeError);
}

TEST_CASE("commands: verify on the sphere normals notes the umbilics") {
  const Scene s = parse_scene(R"({"chart": {"gallery": "sphere-normals"}})");
  const VerifyResult r = verify_chart(make_chart(s), s.tolerances, s.seed);
  CHECK(r.pass());
  bool noted = false;
  for (const auto& n : r.notes) noted |= n.find("umbilic everywhere") != std::string::npos;
  CHECK(noted);
}

TEST_CASE("commands: classify the monstar jet") {
  Scene s = parse_scene(R"({"chart": {"gallery": "monstar-jet"}, "grid": 32})");
  const fs::path dir = scratch("classify");
  s.outputs.dir = dir.string();
  std::ostringstream out;
  CHECK(run_command("classify", s, out) == 0);
  const std::string tsv = slurp(dir / "singularities_Q2.tsv");
  int rows = 0;
  std::istringstream lines(tsv);
  for (std::string line; std::getline(lines, line);) rows += line.rfind("umbilic", 0) == 0;
  CHECK(rows == 1);
  CHECK(tsv.find("Monstar") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("commands: artifacts are removed on failure") {
  const fs::path dir = scratch("artifacts");
  {
    Artifacts a(dir);
    a.write("sub/one.txt", "1");
    CHECK(fs::exists(dir / "sub/one.txt"));
  }
  CHECK(!fs::exists(dir / "sub"));
  {
    Artifacts a(dir);
    a.write("two.txt", "2");
    a.commit();
  }
  CHECK(slurp(dir / "two.txt") == "2");

  // A file where the curves directory should go: trace fails and leaves nothing new behind.
  fs::create_directories(dir);
  std::ofstream(dir / "curves") << "blocker";
  Scene s = parse_scene(R"({"chart": {"gallery": "fold-parabolic-chart"}, "grid": 32, "lens": "Q3"})");
  s.outputs.dir = dir.string();
  std::ostringstream out;
  CHECK(code_of([&] { run_command("trace", s, out); }) == ErrorCode::IoError);
  std::vector<std::string> left;
  for (const auto& e : fs::directory_iterator(dir)) left.push_back(e.path().filename().string());
  std::sort(left.begin(), left.end());
  CHECK(left == std::vector<std::string>{"curves", "two.txt"});
  fs::remove_all(dir);
}

TEST_CASE("commands: render writes a deterministic svg") {
  Scene s = parse_scene(R"({"chart": {"gallery": "fold-parabolic-chart"}, "grid": 32, "lens": "Q3"})");
  const fs::path dir = scratch("render");
  s.outputs.dir = dir.string();
  std::ostringstream out;
  REQUIRE(run_command("render", s, out) == 0);
  const std::string first = slurp(dir / "portrait_Q3.svg");
  REQUIRE(run_command("render", s, out) == 0);
  CHECK(slurp(dir / "portrait_Q3.svg") == first);
  CHECK(first.rfind("<?xml", 0) == 0);
  CHECK(first.find("</svg>") != std::string::npos);
  CHECK(first.find("stroke:#1f5fa8") != std::string::npos);
  CHECK(first.find("<g id=\"singularities\">") != std::string::npos);
  CHECK(first.find("stroke:#d62728") != std::string::npos);  // Q3 discriminant, the parabolic curve
  CHECK(first.find("stroke:#000000;stroke-width:2.2") != std::string::npos);  // Sigma(n)
  s.lens = Lens::Q2;
  REQUIRE(run_command("render", s, out) == 0);
  CHECK(slurp(dir / "portrait_Q2.svg").find("stroke:#ff7f0e") != std::string::npos);  // parabolic overlay
  fs::remove_all(dir);
}
