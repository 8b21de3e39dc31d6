#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "coupling_lab/bounds.hpp"
#include "coupling_lab/densities.hpp"
#include "coupling_lab/error.hpp"
#include "coupling_lab/format.hpp"
#include "coupling_lab/harness.hpp"
#include "coupling_lab/subordinators.hpp"

using namespace coupling_lab;
using nlohmann::json;

namespace {

struct SpecFlags {
  std::string family = "stable-pow";
  std::optional<double> alpha, beta, m, b;

  void add(CLI::App* app) {
    app->add_option("--family", family, "stable-pow, mixed-stable, log-up, log-down, relativistic, "
                                        "log-stable, geometric-stable, linear");
    app->add_option("--alpha", alpha);
    app->add_option("--beta", beta);
    app->add_option("--m", m, "relativistic mass");
    app->add_option("--b", b, "linear drift");
  }

  json to_json() const {
    json j = {{"family", family}};
    if (alpha) j["alpha"] = *alpha;
    if (beta) j["beta"] = *beta;
    if (m) j["m"] = *m;
    if (b) j["b"] = *b;
    return j;
  }

  BernsteinSpec spec() const { return parse_spec(to_json()); }
};

void print_row(const char* name, double v) { std::printf("%s,%s\n", name, shortest_repr(v).c_str()); }

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write '" + path + "'");
  out << text;
}

int run_report(const ExperimentConfig& config) {
  const auto report = run_experiment(config);
  write_outputs(config, report);
  if (config.csv_path.empty()) std::cout << rows_to_csv(report.rows);
  for (const auto& c : report.criteria)
    std::cerr << (c.pass ? "pass " : "FAIL ") << c.name << ": " << c.detail << '\n';
  if (report.slope)
    std::cerr << "slope " << shortest_repr(report.slope->slope) << " +- "
              << shortest_repr(report.slope->half_width) << '\n';
  if (report.status == "error") {
    std::cerr << "error: " << report.error << '\n';
    return 2;
  }
  return report.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reflection-subordinate coupling lab"};
  app.require_subcommand(1);

  // bound
  auto* bound = app.add_subcommand("bound", "evaluate a bound");
  SpecFlags bound_spec;
  bound_spec.add(bound);
  std::string op = "subordinate";
  double t = 1.0, h = 1.0, c_env = 1.0;
  int dimension = 1;
  std::string mode = "corrected";
  std::vector<double> distances;
  bound->add_option("--op", op, "subordinate, general, integral, rate, lower, product, c")
      ->check(CLI::IsMember({"subordinate", "general", "integral", "rate", "lower", "product", "c"}));
  bound->add_option("--t", t);
  bound->add_option("--distance", h);
  bound->add_option("--dimension", dimension);
  bound->add_option("--mode", mode)->check(CLI::IsMember({"corrected", "as-printed"}));
  bound->add_option("--c-env", c_env, "envelope constant C");
  bound->add_option("--distances", distances, "per-coordinate distances (product)")->delimiter(',');

  // simulate-coupling
  auto* sim = app.add_subcommand("simulate-coupling", "coupling-time survival curve");
  SpecFlags sim_spec;
  sim_spec.add(sim);
  std::vector<double> t_grid{1, 2, 5, 10}, x{0}, y{1};
  std::uint64_t n = 100000, seed = 42;
  double tol = 0.01;
  std::string strategy = "auto", method = "identity", csv;
  sim->add_option("--t-grid", t_grid)->delimiter(',');
  sim->add_option("--x", x)->delimiter(',');
  sim->add_option("--y", y)->delimiter(',');
  sim->add_option("--n", n);
  sim->add_option("--seed", seed);
  sim->add_option("--tol", tol);
  sim->add_option("--strategy", strategy);
  sim->add_option("--method", method)->check(CLI::IsMember({"identity", "first-passage"}));
  sim->add_option("--csv", csv);

  // tv
  auto* tv = app.add_subcommand("tv", "exact total variation in one dimension");
  SpecFlags tv_spec;
  tv_spec.add(tv);
  double tv_t = 1.0, tv_h = 1.0;
  std::string density_csv;
  tv->add_option("--t", tv_t);
  tv->add_option("--distance", tv_h);
  tv->add_option("--density-csv", density_csv, "write the density grid as z,p");

  // validate
  auto* validate = app.add_subcommand("validate", "Laplace and complete-monotonicity checks");
  SpecFlags val_spec;
  val_spec.add(validate);
  std::vector<double> lambdas{0.5, 1, 4}, times{0.1, 1, 10};
  std::uint64_t val_n = 100000, val_seed = 42;
  std::string val_strategy = "auto";
  validate->add_option("--lambda", lambdas)->delimiter(',');
  validate->add_option("--t", times)->delimiter(',');
  validate->add_option("--n", val_n);
  validate->add_option("--seed", val_seed);
  validate->add_option("--strategy", val_strategy);

  // experiment run
  auto* experiment = app.add_subcommand("experiment", "config-driven experiments");
  experiment->require_subcommand(1);
  auto* run = experiment->add_subcommand("run", "run a JSON experiment config");
  std::string config_path;
  run->add_option("config", config_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bound) {
      const auto spec = bound_spec.spec();
      BoundRequest req{.spec = spec};
      req.t = t;
      req.distance = h;
      req.dimension = dimension;
      req.prefactor_mode = parse_prefactor_mode(mode);
      req.envelope_constant = c_env;
      std::printf("quantity,value\n");
      if (op == "subordinate") {
        print_row("tv_bound_subordinate", tv_bound_subordinate(req));
      } else if (op == "general") {
        print_row("tv_bound_general", tv_bound_general(req));
      } else if (op == "integral") {
        const auto r = bound_integral(spec, t);
        print_row("bound_integral", r.value);
        print_row("error", r.error);
      } else if (op == "rate") {
        const auto r = asymptotic_rate(spec, t, h);
        print_row("envelope", r.envelope);
        print_row("growth_proxy", r.growth_proxy);
        print_row("small_r_proxy", r.small_r_proxy);
        print_row("doubling_limsup", r.doubling.limsup_ratio);
      } else if (op == "lower") {
        const auto r = lower_bound_integral(spec, t, req.prefactor_mode);
        if (r) print_row("lower_bound_integral", *r);
        else std::printf("lower_bound_integral,not-applicable\n");
      } else if (op == "product") {
        const std::vector<BernsteinSpec> specs(distances.size(), spec);
        print_row("bound_product", bound_product(specs, t, distances,
                                                 static_cast<int>(distances.size()), c_env,
                                                 req.prefactor_mode));
      } else {
        print_row("c_constant", c_constant(dimension));
      }
      std::printf("# prefactor_mode=%s C=%s\n", mode.c_str(), shortest_repr(c_env).c_str());
      return 0;
    }
    if (*sim) {
      json cfg = {{"kind", "coupling-survival"}, {"spec", sim_spec.to_json()}, {"t_grid", t_grid},
                  {"x", x}, {"y", y}, {"n", n}, {"seed", seed}, {"tol", tol},
                  {"strategy", strategy}, {"method", method}};
      if (!csv.empty()) cfg["output"] = {{"csv", csv}};
      return run_report(parse_config(cfg));
    }
    if (*tv) {
      const auto spec = tv_spec.spec();
      const auto grid = density_1d(spec, tv_t);
      const auto exact = tv_exact_1d(grid, tv_h);
      const double xs[1] = {0.0}, ys[1] = {tv_h};
      std::printf("quantity,value\n");
      print_row("tv_exact", exact.value);
      print_row("tv_direct", exact.direct);
      print_row("halfspace_lower", tv_halfspace_lower(spec, tv_t, xs, ys));
      BoundRequest req{.spec = spec};
      req.t = tv_t;
      req.distance = tv_h;
      print_row("bound_corrected", tv_bound_subordinate(req));
      print_row("grid_spacing", grid.spacing);
      print_row("grid_clipped", grid.clipped);
      if (!density_csv.empty()) write_file(density_csv, density_to_csv(grid));
      return 0;
    }
    if (*validate) {
      const auto spec = val_spec.spec();
      json cfg = {{"kind", "laplace-validation"}, {"spec", val_spec.to_json()}, {"t_grid", times},
                  {"lambda_grid", lambdas}, {"n", val_n}, {"seed", val_seed},
                  {"strategy", val_strategy}};
      std::vector<double> grid;
      for (int i = 0; i < 20; ++i) grid.push_back(std::pow(10.0, -3.0 + 6.0 * i / 19.0));
      const auto mono = check_complete_monotone(spec, grid, 4);
      std::cerr << (mono.pass ? "pass " : "FAIL ") << "complete-monotone: worst violation "
                << shortest_repr(mono.worst_violation) << " at lambda "
                << shortest_repr(mono.worst_lambda) << " order " << mono.worst_order << '\n';
      const int code = run_report(parse_config(cfg));
      return mono.pass ? code : std::max(code, 1);
    }
    if (*run) return run_report(load_config(config_path));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
