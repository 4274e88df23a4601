#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "antibunch/beamsplitter.hpp"
#include "antibunch/config.hpp"
#include "antibunch/errors.hpp"
#include "antibunch/figures.hpp"
#include "antibunch/selftest.hpp"

using namespace antibunch;

namespace {

enum Exit { kOk = 0, kFailure = 1, kUndefined = 2, kConfig = 3, kSelftest = 4 };

struct Options {
  std::string config;
  std::string out;
  std::optional<int> dim;
  bool pretty = false;
};

json distribution_json(const RealVector& p) {
  Eigen::Index last = p.size();
  while (last > 1 && p[last - 1] < 1e-30) --last;
  json j = json::array();
  for (Eigen::Index n = 0; n < last; ++n) j.push_back(p[n]);
  return j;
}

void print(const json& j, bool pretty, const std::function<void()>& human) {
  if (pretty) {
    human();
  } else {
    std::cout << j.dump() << '\n';
  }
}

int cmd_g2(const Options& o) {
  const RunConfig c = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (!c.state) throw ConfigError("g2: the config needs a 'state'");
  if (c.axes || c.scan || c.dynamics || c.objective || !c.parameters.empty()) {
    throw ConfigError("g2: sweep and dynamics keys belong to the figure command");
  }
  const std::optional<int> override_dim = o.dim ? o.dim : c.dim;
  json report;
  report["state"] = to_json(*c.state);

  if (!c.state_b) {
    const bool pinned = c.state->dim || override_dim;
    const int start = state_dim(*c.state, override_dim);
    auto g2_at = [&](int d) { return g2_from_coeffs(make_state(*c.state, d).span()); };
    ConvergedValue conv{start, 0.0, 0.0};
    if (pinned) {
      conv.value = g2_at(start);
    } else {
      conv = converge_dim(g2_at, start);
    }
    const FockVector s = make_state(*c.state, conv.dim);
    const OutputStats st = stats_from_distribution({s.probabilities().data(), static_cast<std::size_t>(s.dim())});
    report["dim"] = conv.dim;
    report["g2"] = st.g2;
    report["n_mean"] = st.n_mean;
    report["distribution"] = distribution_json(s.probabilities());
    if (!pinned) report["relative_change_at_dim_plus_8"] = conv.relative_change;
    print(report, o.pretty, [&] {
      std::printf("state     %s (dim %d)\n", c.state->kind.c_str(), conv.dim);
      std::printf("g2(0)     %.10g\n<n>       %.10g\n", st.g2, st.n_mean);
    });
    return kOk;
  }

  const SplitterSpec sp = c.beamsplitter.value_or(SplitterSpec{});
  const BeamsplitterParams bs(sp.R, sp.phi);
  const bool pinned = (c.state->dim && c.state_b->dim) || override_dim;
  const int da0 = state_dim(*c.state, override_dim);
  const int db0 = state_dim(*c.state_b, override_dim);
  auto stats_at = [&](int extra) {
    return output_g2(make_state(*c.state, da0 + extra), make_state(*c.state_b, db0 + extra), bs);
  };
  int extra = 0;
  double change = 0.0;
  if (!pinned) {
    const ConvergedValue conv = converge_dim([&](int e) { return stats_at(e).g2; }, 0);
    extra = conv.dim;
    change = conv.relative_change;
  }
  const FockVector a = make_state(*c.state, da0 + extra);
  const FockVector b = make_state(*c.state_b, db0 + extra);
  const OutputStats st = output_g2(a, b, bs);
  const TwoModeState out = mix(a, b, bs);
  report["state_b"] = to_json(*c.state_b);
  report["beamsplitter"] = {{"R", sp.R}, {"phi", sp.phi}};
  report["dims"] = {a.dim(), b.dim()};
  report["g2"] = st.g2;
  report["n_mean"] = st.n_mean;
  report["distribution"] = distribution_json(out.distribution_a());
  if (!pinned) report["relative_change_at_dim_plus_8"] = change;
  print(report, o.pretty, [&] {
    std::printf("inputs    %s (dim %d) + %s (dim %d)\n", c.state->kind.c_str(), a.dim(), c.state_b->kind.c_str(),
                b.dim());
    std::printf("splitter  R = %.6g, phi = %.6g pi\n", sp.R, sp.phi);
    std::printf("g2(0)     %.10g\n<n_A>     %.10g\n", st.g2, st.n_mean);
  });
  return kOk;
}

int cmd_figure(const std::string& name, const Options& o) {
  const RunConfig user = o.config.empty() ? RunConfig{} : load_config(o.config);
  RunConfig c = merge_figure_config(name, user);
  if (o.dim) {
    if (name == "fig7") c.dynamics->dim = *o.dim;
    else c.dim = o.dim;
  }
  const std::string dir = !o.out.empty() ? o.out : user.output.value_or(".");
  const FigureResult r = run_figure(c);
  write_figure(r, dir);
  json report = {{"figure", name},
                 {"csv", dir + "/" + name + ".csv"},
                 {"meta", dir + "/" + name + ".meta.json"},
                 {"results", r.meta["results"]},
                 {"wall_time_s", r.meta["wall_time_s"]}};
  print(report, o.pretty, [&] {
    std::printf("%s: %zu rows -> %s/%s.csv (%.2f s)\n", name.c_str(), r.table.rows.size(), dir.c_str(),
                name.c_str(), r.meta["wall_time_s"].get<double>());
    std::printf("%s\n", r.meta["results"].dump(2).c_str());
  });
  return kOk;
}

int cmd_selftest(const Options& o) {
  const auto results = run_selftest(o.dim);
  bool ok = true;
  json report = json::array();
  for (const auto& r : results) {
    ok = ok && r.passed;
    report.push_back({{"check", r.name}, {"passed", r.passed}, {"detail", r.detail}});
  }
  print(report, o.pretty, [&] {
    for (const auto& r : results) std::printf("%s  %-26s %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
  });
  return ok ? kOk : kSelftest;
}

void add_common(CLI::App* sub, Options& o, bool with_out) {
  sub->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
  if (with_out) sub->add_option("--out", o.out, "output directory");
  sub->add_option("--dim", o.dim, "truncation override")->check(CLI::Range(2, 100000));
  sub->add_flag("--pretty", o.pretty, "human-readable output");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photon statistics of states mixed on a beamsplitter, and cavity antibunching"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ANTIBUNCH_VERSION);

  Options o;
  CLI::App* g2 = app.add_subcommand("g2", "g2(0), <n> and photon distribution of a state or a mixed pair");
  add_common(g2, o, false);
  std::string figure_name;
  CLI::App* fig = app.add_subcommand("figure", "write a figure dataset as CSV plus metadata");
  fig->add_option("name", figure_name, "fig2 | fig3a | fig3b | fig4 | fig5 | fig6 | fig7")
      ->required()
      ->check(CLI::IsMember(figure_names()));
  add_common(fig, o, true);
  CLI::App* st = app.add_subcommand("selftest", "run the fast invariant suite");
  add_common(st, o, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (g2->parsed()) return cmd_g2(o);
    if (fig->parsed()) return cmd_figure(figure_name, o);
    return cmd_selftest(o);
  } catch (const UndefinedG2& e) {
    std::cerr << "error: g2 undefined: " << e.what() << '\n';
    return kUndefined;
  } catch (const ConfigError& e) {
    std::cerr << "error: config: " << e.what() << '\n';
    return kConfig;
  } catch (const TruncationError& e) {
    std::cerr << "error: " << e.what() << " (recommended dim " << e.recommended_dim() << ")\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
