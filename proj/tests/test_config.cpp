#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "antibunch/config.hpp"
#include "antibunch/csv.hpp"
#include "antibunch/errors.hpp"
#include "antibunch/figures.hpp"

using namespace antibunch;
namespace fs = std::filesystem;

TEST_CASE("state specs") {
  const StateSpec s = parse_state(json::parse(R"({"kind": "kerr_coherent", "alpha": [0.3, 0.1], "chi_t": 0.05})"));
  CHECK(s.kind == "kerr_coherent");
  CHECK(s.alpha == cplx(0.3, 0.1));
  CHECK(parse_state(to_json(s)).alpha == s.alpha);
  CHECK(make_state(s, 16).dim() == 16);
  CHECK(state_dim(s, std::nullopt) == default_dim(std::abs(s.alpha)));
  CHECK(state_dim(s, 40) == 40);
  CHECK_THROWS_AS(parse_state(json::parse(R"({"kind": "coherent", "chi_t": 1})")), ConfigError);
  CHECK_THROWS_AS(parse_state(json::parse(R"({"kind": "cat_state", "alpha_sch": 0.1, "parity": "odd-ish"})")),
                  ConfigError);
  CHECK_THROWS_AS(parse_state(json::parse(R"({"kind": "coherent", "alpha": "big"})")), ConfigError);
  CHECK_THROWS_AS(parse_state(json::parse(R"({"alpha": 1})")), ConfigError);
}

TEST_CASE("run config round trip") {
  const json j = json::parse(R"({
    "command": "figure", "figure": "fig3a",
    "axes": [{"name": "R", "min": 0.0, "max": 1.0, "count": 11}, {"name": "phi", "min": 0.0, "max": 2.0, "count": 11}],
    "objective": "kerr", "parameters": {"alpha": 0.2, "chi_t": 0.05}, "dim": 20, "output": "out"})");
  const RunConfig c = parse_config(j);
  CHECK(c.axes->size() == 2);
  CHECK(c.parameters.at("alpha") == 0.2);
  CHECK(*c.dim == 20);
  const RunConfig back = parse_config(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK_THROWS_AS(parse_config(json::parse(R"({"colour": 1})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"axes": [{"name": "R", "min": 1, "max": 0, "count": 3}]})")),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"dynamics": {"single": {"gain": 1}}})")), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("csv round trip") {
  const fs::path dir = fs::temp_directory_path() / "antibunch_csv_test";
  fs::create_directories(dir);
  CsvTable t{{"x", "g2"}, {{0.1, 1.0 / 3.0}, {1e-300, std::nan("")}}};
  write_csv(dir / "t.csv", t);
  const CsvTable r = read_csv(dir / "t.csv");
  CHECK(r.columns == t.columns);
  CHECK(r.rows[0][1] == t.rows[0][1]);
  CHECK(r.rows[1][0] == t.rows[1][0]);
  CHECK(std::isnan(r.rows[1][1]));
  CHECK(r.column("g2") == 1);
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK_THROWS(write_csv("/nonexistent/dir/t.csv", t));
  fs::remove_all(dir);
}

TEST_CASE("figure defaults and overrides") {
  for (const auto& name : figure_names()) CHECK_NOTHROW(figure_defaults(name));
  CHECK_THROWS_AS(figure_defaults("fig9"), ConfigError);
  const RunConfig d = figure_defaults("fig6");
  CHECK(d.parameters.at("R") == doctest::Approx(0.1));
  CHECK(d.parameters.at("phi") == 1.0);
  RunConfig o;
  o.parameters["alpha"] = 0.25;
  o.axes = std::vector<Axis>{{"R", 0.0, 1.0, 5}, {"phi", 0.0, 2.0, 5}};
  const RunConfig m = merge_figure_config("fig3a", o);
  CHECK(m.parameters.at("alpha") == 0.25);
  CHECK(m.parameters.at("chi_t") == 0.05);
  CHECK(m.axes->front().count == 5);
  RunConfig bad;
  bad.state = StateSpec{"vacuum"};
  CHECK_THROWS_AS(merge_figure_config("fig2", bad), ConfigError);
}

TEST_CASE("small figure run writes csv and metadata") {
  RunConfig o;
  o.axes = std::vector<Axis>{{"R", 0.1, 0.9, 9}, {"phi", 0.0, 2.0, 9}};
  const FigureResult r = run_figure(merge_figure_config("fig3a", o));
  CHECK(r.table.rows.size() == 81);
  CHECK(r.meta["results"]["refined_min"]["g2"].get<double>() < r.meta["results"]["grid_min"]["g2"].get<double>() + 1e-15);
  const fs::path dir = fs::temp_directory_path() / "antibunch_fig_test";
  write_figure(r, dir);
  CHECK(read_csv(dir / "fig3a.csv").rows.size() == 81);
  std::ifstream in(dir / "fig3a.meta.json");
  const json meta = json::parse(in);
  CHECK(meta["phase_units"] == "pi");
  CHECK(meta.contains("dims"));
  CHECK(meta.contains("wall_time_s"));
  // the stored config reproduces the run
  const FigureResult again = run_figure(parse_config(meta["config"]));
  CHECK(again.table.rows == r.table.rows);
  fs::remove_all(dir);
}
