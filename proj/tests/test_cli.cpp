#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bht/errors.hpp"
#include "bht_cli/commands.hpp"
#include "bht_cli/table.hpp"

using namespace bht::cli;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "bht");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

Table sample_table() {
  Table t;
  t.columns = {"m", "sup_ratio"};
  t.rows = {{2, 0.5}, {3, 0.25}, {4, 0.125}, {5, 1.0 / 3.0}};
  return t;
}

}  // namespace

TEST_CASE("analyze reports the correlation degree") {
  const auto r = run_cli({"analyze", "--P", "t^6", "--Q", "3t^4-3t^2"});
  REQUIRE(r.code == kExitPass);
  const auto doc = json::parse(r.out);
  CHECK(doc["results"]["correlation_degree"] == 2);
  CHECK(doc["results"]["threshold"] == "2/3");
  CHECK(doc["results"]["admissible"] == true);
  CHECK(doc["subcommand"] == "analyze");
  CHECK(doc.contains("wall_clock_seconds"));
}

TEST_CASE("missing catalog entry is a configuration error naming the entry") {
  const auto r = run_cli({"evaluate", "--P", "t", "--Q", "t^2", "--f", "g99", "--x-grid", "0:1:3"});
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("g99") != std::string::npos);
  CHECK(r.err.find("evaluate.f") != std::string::npos);
}

TEST_CASE("malformed polynomial and bad ranges exit with the config code") {
  CHECK(run_cli({"analyze", "--P", "t^^2", "--Q", "t"}).code == kExitConfig);
  CHECK(run_cli({"decay", "--P", "t", "--Q", "t^2", "--m-range", "5:2"}).code == kExitConfig);
  CHECK(run_cli({"frobnicate"}).code == kExitConfig);
}

TEST_CASE("reports are deterministic apart from wall clock") {
  const std::vector<std::string> args{"evaluate", "--P", "t", "--Q", "t^2", "--f", "g1", "--g", "g2",
                                      "--x-grid", "-1:1:5", "--eps", "1e-4", "--R", "16"};
  auto a = json::parse(run_cli(args).out);
  auto b = json::parse(run_cli(args).out);
  a.erase("wall_clock_seconds");
  b.erase("wall_clock_seconds");
  CHECK(a.dump() == b.dump());
}

TEST_CASE("config file supplies subcommand options") {
  const auto path = std::filesystem::temp_directory_path() / "bht_cli_test.toml";
  {
    std::ofstream cfg(path);
    cfg << "[analyze]\nP = \"t^6\"\nQ = \"3t^4-3t^2\"\n";
  }
  const auto r = run_cli({"--config", path.string(), "analyze"});
  REQUIRE(r.code == kExitPass);
  CHECK(json::parse(r.out)["results"]["correlation_degree"] == 2);
  std::filesystem::remove(path);
}

TEST_CASE("csv output round-trips") {
  const auto t = sample_table();
  std::stringstream s;
  write_csv(s, t);
  const auto back = read_csv(s);
  CHECK(back.columns == t.columns);
  CHECK(back.rows == t.rows);

  std::istringstream bad("a,b\n1,2\n3\n");
  CHECK_THROWS_AS(read_csv(bad), bht::Error);
}

TEST_CASE("evaluate writes a readable csv") {
  const auto path = std::filesystem::temp_directory_path() / "bht_cli_eval.csv";
  const auto r = run_cli({"evaluate", "--P", "t", "--Q", "t^2", "--x-grid", "-1:1:3", "--eps", "1e-4",
                          "--R", "16", "--out", path.string()});
  REQUIRE(r.code == kExitPass);
  std::ifstream in(path);
  const auto t = read_csv(in);
  CHECK(t.columns == std::vector<std::string>{"x", "re", "im", "err"});
  CHECK(t.rows.size() == 3);
  std::filesystem::remove(path);
}

TEST_CASE("plots") {
  PlotOptions opt;
  opt.log2_y = true;
  opt.annotation = "fitted slope 0.5";
  const auto line = render_svg(sample_table(), PlotKind::line, opt);
  CHECK(line.find("<svg") != std::string::npos);
  CHECK(line.find("fitted slope 0.5") != std::string::npos);

  Table surface;
  surface.columns = {"m", "n", "sup_abs"};
  for (int m = 0; m < 3; ++m)
    for (int n = 0; n < 3; ++n) surface.rows.push_back({double(m), double(n), std::exp2(-m - n)});
  const auto heat = render_svg(surface, PlotKind::heatmap);
  CHECK(heat.find("<rect") != std::string::npos);

  CHECK_THROWS_AS(render_svg(Table{}, PlotKind::line), bht::PreconditionError);
}

TEST_CASE("decay subcommand with a planted operator writes an annotated plot") {
  const auto path = std::filesystem::temp_directory_path() / "bht_cli_decay.svg";
  const auto r = run_cli({"decay", "--P", "t", "--Q", "t^2", "--j-window", "9:10", "--m-range", "2:7",
                          "--planted", "0.5", "--plot", path.string()});
  REQUIRE(r.code == kExitPass);
  const auto doc = json::parse(r.out);
  CHECK(std::abs(doc["results"]["fitted_exponent"].get<double>() - 0.5) <= 0.02);
  std::ifstream in(path);
  std::stringstream svg;
  svg << in.rdbuf();
  CHECK(svg.str().find("slope") != std::string::npos);
  std::filesystem::remove(path);
}

TEST_CASE("parse helpers") {
  CHECK(parse_int_range("x", "2:4") == std::vector<int>{2, 3, 4});
  CHECK(parse_int_range("x", "7") == std::vector<int>{7});
  CHECK_THROWS_AS(parse_int_range("x", "a:b"), ConfigError);
  CHECK(parse_grid("x", "-1:1:3") == std::vector<double>{-1.0, 0.0, 1.0});
  CHECK(parse_grid("x", "0.5") == std::vector<double>{0.5});
  CHECK_THROWS_AS(parse_grid("x", "0:1:0"), ConfigError);
}

TEST_CASE("verify --suite all passes on a correct build") {
  const auto r = run_cli({"verify", "--suite", "all"});
  CHECK(r.code == kExitPass);
  const auto doc = json::parse(r.out);
  for (const auto& c : doc["results"]["checks"]) {
    CAPTURE(c.dump());
    CHECK(c["passed"] == true);
  }
}
