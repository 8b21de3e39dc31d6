// Acceptance run: every criterion at its stated tolerance, one line each.
// Usage: acceptance [criterion numbers...]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "coupling_lab/bounds.hpp"
#include "coupling_lab/coupling.hpp"
#include "coupling_lab/format.hpp"
#include "coupling_lab/harness.hpp"
#include "coupling_lab/parallel.hpp"
#include "coupling_lab/stats.hpp"

using namespace coupling_lab;
using nlohmann::json;

namespace {

constexpr std::uint64_t kSeed = 42;

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

json stable(double a) { return {{"family", "stable-pow"}, {"alpha", a}}; }

ExperimentReport run(const json& cfg, Outcome& out) {
  auto report = run_experiment(parse_config(cfg));
  if (report.status == "error") out.check(false, cfg.value("name", "experiment") + ": " + report.error);
  return report;
}

bool criterion_pass(const ExperimentReport& r, const std::string& name) {
  for (const auto& c : r.criteria)
    if (c.name == name) return c.pass;
  return false;
}

double detail_at(const ExperimentReport& r, std::size_t k, const char* key) {
  return r.details.at("rows").at(k).at(key).get<double>();
}

// ---------------------------------------------------------------------------

Outcome quadrature_oracles() {
  Outcome out;
  const double pi = std::numbers::pi;
  const struct {
    BernsteinSpec spec;
    double exact;
    const char* name;
  } cases[] = {{BernsteinSpec::linear(1.0), std::sqrt(pi), "linear"},
               {BernsteinSpec::stable_pow(1.0), 2.0, "stable"},
               {BernsteinSpec::geometric_stable(1.0), pi, "geometric"}};
  for (const auto& c : cases) {
    const double rel = std::abs(bound_integral(c.spec, 1.0).value / c.exact - 1.0);
    out.check(rel <= 1e-8, std::string(c.name) + " rel err " + fmt(rel));
    out.note(std::string(c.name) + " rel err " + fmt(rel));
  }
  return out;
}

Outcome brownian_diagnostic() {
  Outcome out;
  const auto r = run({{"kind", "coupling-survival"},
                      {"name", "brownian"},
                      {"spec", {{"family", "linear"}, {"b", 1.0}}},
                      {"t_grid", {0.5, 1, 2}},
                      {"n", 1000000},
                      {"seed", kSeed}},
                     out);
  if (r.status == "error") return out;
  out.check(criterion_pass(r, "matches-exact-gaussian-tv"), "match exact Gaussian TV");
  out.check(criterion_pass(r, "corrected-bound-dominates"), "corrected bound dominates");
  out.check(criterion_pass(r, "as-printed-bound-violated"), "as-printed bound violated");
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    out.note("t=" + fmt(r.rows[k].t) + " mc " + fmt(r.rows[k].value) + " exact " +
             fmt(detail_at(r, k, "exact_gaussian_tv")) + " corrected " +
             fmt(detail_at(r, k, "bound_corrected")) + " as-printed " +
             fmt(detail_at(r, k, "bound_as_printed")));
  }
  return out;
}

Outcome coupling_time_law() {
  Outcome out;
  const std::size_t n = 1000000;
  std::vector<double> tb(n);
  const auto id = experiment_id("acceptance/tb-law");
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      RngStream rng = make_rng_stream(kSeed, id, i);
      tb[i] = sample_tb(2.0, rng);
    }
  });
  std::size_t alive = 0;
  for (double v : tb) alive += v > 1.0;
  const auto p = proportion_estimate(alive, n);
  const double exact = survival_tb(2.0, 1.0).probability;
  out.check(std::abs(p.mean - exact) <= 3.0 * p.std_error, "survival");
  out.note("P(T^B > 1) = " + fmt(p.mean) + " vs " + fmt(exact) + " (se " + fmt(p.std_error) + ")");
  const auto ks = ks_test(tb, [](double s) { return s <= 0 ? 0.0 : std::erfc(0.5 / std::sqrt(s)); });
  out.check(ks.pass, "KS");
  out.note("KS D=" + fmt(ks.statistic) + " crit " + fmt(ks.critical));
  return out;
}

Outcome stable_domination() {
  Outcome out;
  for (double a : {0.5, 1.0, 1.5}) {
    const auto r = run({{"kind", "coupling-survival"},
                        {"name", "domination"},
                        {"spec", stable(a)},
                        {"t_grid", {5, 10, 20, 50}},
                        {"n", 100000},
                        {"seed", kSeed}},
                       out);
    if (r.status == "error") continue;
    out.check(criterion_pass(r, "corrected-bound-dominates"), "alpha=" + fmt(a));
    double margin = kInfinity;
    for (std::size_t k = 0; k < r.rows.size(); ++k)
      margin = std::min(margin, detail_at(r, k, "bound_corrected") - r.rows[k].value);
    out.note("alpha=" + fmt(a) + " min(bound - mc) " + fmt(margin));
  }
  return out;
}

Outcome sharpness() {
  Outcome out;
  for (double a : {0.5, 1.0, 1.5}) {
    const auto r = run({{"kind", "tv-sharpness"},
                        {"name", "sharpness"},
                        {"spec", stable(a)},
                        {"t_grid", {10, 21.5, 46.4, 100, 215, 464, 1000}},
                        {"expect_slope", -1.0 / a},
                        {"slope_tolerance", 0.05}},
                       out);
    if (r.status == "error") continue;
    out.check(criterion_pass(r, "slope"), "slope alpha=" + fmt(a));
    out.check(criterion_pass(r, "halfspace-rate"), "half-space rate alpha=" + fmt(a));
    out.note("alpha=" + fmt(a) + " slope " + fmt(r.slope ? r.slope->slope : NAN));
  }
  return out;
}

Outcome relativistic() {
  Outcome out;
  const auto spec = BernsteinSpec::relativistic(1.0, 1.0);
  std::vector<double> t, env;
  for (double s = 1e2; s <= 1e6 * 1.001; s *= std::sqrt(10.0)) {
    t.push_back(s);
    env.push_back(asymptotic_rate(spec, s, 1.0).envelope);
  }
  const double envelope_slope = fit_loglog_slope(t, env).slope;
  out.check(std::abs(envelope_slope + 0.5) <= 0.02, "envelope slope");
  out.note("envelope slope " + fmt(envelope_slope));
  const auto r = run({{"kind", "coupling-survival"},
                      {"name", "relativistic"},
                      {"spec", {{"family", "relativistic"}, {"alpha", 1.0}, {"m", 1.0}}},
                      {"t_grid", {10, 20, 40, 80, 160, 300}},
                      {"n", 100000},
                      {"seed", kSeed},
                      {"expect_slope", -0.5},
                      {"slope_tolerance", 0.15}},
                     out);
  if (r.status != "error") {
    out.check(criterion_pass(r, "slope"), "survival slope");
    out.note("survival slope " + fmt(r.slope ? r.slope->slope : NAN));
  }
  return out;
}

Outcome dichotomy() {
  Outcome out;
  for (const auto& spec :
       {BernsteinSpec::stable_pow(1.0), BernsteinSpec::mixed_stable(0.5, 1.0),
        BernsteinSpec::log_up(1.0, 0.5), BernsteinSpec::log_down(1.0, 0.5)}) {
    out.check(std::isinf(fprime_at_zero(spec)), spec.describe() + " should be infinite");
  }
  for (const auto& spec : {BernsteinSpec::relativistic(1.0, 1.0), BernsteinSpec::log_stable(0.5),
                           BernsteinSpec::log_stable(1.0)}) {
    const double fp = fprime_at_zero(spec);
    out.check(std::isfinite(fp), spec.describe() + " should be finite");
    if (!std::isfinite(fp)) continue;
    double lo = kInfinity, hi = 0.0;
    bool dominated = true;
    for (double t = 10.0; t <= 1e4 * 1.001; t *= std::sqrt(10.0)) {
      const double v = bound_integral(spec, t).value;
      lo = std::min(lo, v * std::sqrt(t));
      hi = std::max(hi, v * std::sqrt(t));
      dominated = dominated && *lower_bound_integral(spec, t) <= v;
    }
    out.check(hi <= 3.0 * lo, spec.describe() + " band");
    out.check(dominated, spec.describe() + " lower bound");
    out.note(spec.describe() + " f'(0)=" + fmt(fp) + " band " + fmt(hi / lo));
  }
  return out;
}

Outcome laplace() {
  Outcome out;
  const auto r = run({{"kind", "laplace-validation"},
                      {"name", "laplace"},
                      {"specs",
                       {stable(1.0),
                        {{"family", "geometric-stable"}, {"alpha", 1.0}},
                        {{"family", "relativistic"}, {"alpha", 1.0}, {"m", 1.0}},
                        {{"family", "linear"}, {"b", 1.0}},
                        {{"family", "mixed-stable"}, {"alpha", 0.5}, {"beta", 1.0}},
                        stable(1.0)}},
                      {"strategies",
                       {"exact-stable", "exact-gamma", "tempered-stable-rejection", "drift-only",
                        "sum-of-components", "compound-poisson"}},
                      {"lambda_grid", {0.5, 1, 4}},
                      {"t_grid", {0.1, 1, 10}},
                      {"n", 100000},
                      {"seed", kSeed}},
                     out);
  if (r.status == "error") return out;
  int failed = 0;
  for (const auto& d : r.details.at("rows")) {
    if (!d.at("pass").get<bool>()) {
      ++failed;
      out.note("fail " + d.at("sampler").get<std::string>() + " lambda=" +
               fmt(d.at("lambda").get<double>()) + " t=" + fmt(d.at("t").get<double>()));
    }
  }
  out.check(failed == 0, std::to_string(failed) + " of " + std::to_string(r.rows.size()) + " cases");
  out.note(std::to_string(r.rows.size()) + " cases");
  return out;
}

Outcome marginals() {
  Outcome out;
  const std::size_t n = 100000;
  const struct {
    BernsteinSpec spec;
    const char* name;
  } cases[] = {{BernsteinSpec::stable_pow(1.0), "stable"},
               {BernsteinSpec::geometric_stable(1.0), "gamma"}};
  const double x[1] = {0.0}, y[1] = {1.0};
  for (const auto& c : cases) {
    const auto sampler = SubordinatorSampler::for_spec(c.spec);
    for (double t : {0.5, 2.0, 10.0}) {
      std::vector<double> first(n), second(n), free_x(n), free_y(n);
      const auto id = experiment_id(std::string("acceptance/marginals/") + c.name + "/" + fmt(t));
      parallel_for(n, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
          RngStream rng = make_rng_stream(kSeed, id, i);
          const auto pair = simulate_coupled_marginals(sampler, x, y, t, rng);
          first[i] = pair.first[0];
          second[i] = pair.second[0];
          free_x[i] = std::sqrt(2.0 * sample_increment(sampler, t, rng)) * rng.normal();
          free_y[i] = 1.0 + std::sqrt(2.0 * sample_increment(sampler, t, rng)) * rng.normal();
        }
      });
      const auto k1 = ks_test_two_sample(first, free_x);
      const auto k2 = ks_test_two_sample(second, free_y);
      const std::string tag = std::string(c.name) + " t=" + fmt(t);
      out.check(k1.pass, tag + " first");
      out.check(k2.pass, tag + " second");
      out.note(tag + " D/crit " + fmt(k1.statistic / k1.critical) + "," +
               fmt(k2.statistic / k2.critical));
    }
  }
  return out;
}

Outcome product() {
  Outcome out;
  const auto r = run({{"kind", "product-coupling"},
                      {"name", "product"},
                      {"spec", stable(1.0)},
                      {"x", {0, 0}},
                      {"y", {1, 1}},
                      {"t_grid", {10, 20, 50}},
                      {"n", 100000},
                      {"seed", kSeed}},
                     out);
  if (r.status == "error") return out;
  out.check(criterion_pass(r, "product-bound-dominates"), "bound domination");
  out.check(criterion_pass(r, "max-law"), "max law");
  for (std::size_t k = 0; k < r.rows.size(); ++k)
    out.note("t=" + fmt(r.rows[k].t) + " mc " + fmt(r.rows[k].value) + " bound " +
             fmt(detail_at(r, k, "bound_product")) + " p_max " + fmt(detail_at(r, k, "p_max")) +
             " pred " + fmt(detail_at(r, k, "p_max_predicted")));
  return out;
}

Outcome decomposition() {
  Outcome out;
  const auto r = run({{"kind", "decomposition-domination"},
                      {"name", "decomposition"},
                      {"spec", stable(1.0)},
                      {"x", {0}},
                      {"y", {1}},
                      {"t_grid", {5, 20}},
                      {"n", 100000},
                      {"seed", kSeed}},
                     out);
  if (r.status == "error") return out;
  out.check(criterion_pass(r, "decomposition-dominated"), "domination");
  for (std::size_t k = 0; k < r.rows.size(); ++k)
    out.note("t=" + fmt(r.rows[k].t) + " TV(X) " + fmt(detail_at(r, k, "tv_x")) + " TV(B^f) " +
             fmt(detail_at(r, k, "tv_subordinate")));
  return out;
}

Outcome truncated_stable() {
  Outcome out;
  for (double a : {0.5, 1.0}) {
    const auto r = run({{"kind", "truncated-stable-slope"},
                        {"name", "truncated"},
                        {"alpha", a},
                        {"c_alpha", 0.05},
                        {"epsilon", 1e-3},
                        {"x", {0}},
                        {"y", {1}},
                        {"t_grid", {10, 20, 40, 80, 160, 300}},
                        {"n", 100000},
                        {"seed", kSeed},
                        {"expect_slope", -0.5},
                        {"slope_tolerance", 0.15}},
                       out);
    if (r.status == "error") continue;
    out.check(criterion_pass(r, "slope"), "slope alpha=" + fmt(a));
    out.check(criterion_pass(r, "epsilon-sensitivity"), "eps/2 shift alpha=" + fmt(a));
    out.note("alpha=" + fmt(a) + " slope " + fmt(r.slope ? r.slope->slope : NAN) + " eps/2 slope " +
             fmt(r.details.at("half_epsilon").at("slope").get<double>()));
  }
  return out;
}

Outcome determinism() {
  Outcome out;
  const auto dir = std::filesystem::temp_directory_path() / "coupling_lab_acceptance";
  std::filesystem::create_directories(dir);
  const std::vector<json> configs = {
      {{"kind", "coupling-survival"}, {"spec", stable(1.0)}, {"t_grid", {5, 10, 20}},
       {"n", 100000}},
      {{"kind", "laplace-validation"}, {"spec", {{"family", "relativistic"}, {"alpha", 1.0}, {"m", 1.0}}},
       {"t_grid", {0.1, 1}}, {"n", 20000}},
      {{"kind", "decomposition-domination"}, {"spec", stable(1.0)}, {"x", {0}}, {"y", {1}},
       {"t_grid", {5}}, {"n", 20000}},
      {{"kind", "truncated-stable-slope"}, {"x", {0}}, {"y", {1}}, {"c_alpha", 0.05},
       {"t_grid", {10, 20, 40, 80}}, {"n", 5000}},
  };
  auto read = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  for (std::size_t c = 0; c < configs.size(); ++c) {
    std::vector<std::string> files;
    for (unsigned workers : {1u, 8u, 8u}) {
      set_worker_count(workers);
      auto cfg = configs[c];
      cfg["seed"] = kSeed;
      const auto path = dir / ("run" + std::to_string(c) + "_" + std::to_string(files.size()) + ".csv");
      cfg["output"] = {{"csv", path.string()}};
      const auto config = parse_config(cfg);
      const auto report = run_experiment(config);
      write_outputs(config, report);
      out.check(report.status != "error", cfg.at("kind").get<std::string>() + ": " + report.error);
      files.push_back(read(path));
    }
    const bool same = files[0] == files[1] && files[1] == files[2] && !files[0].empty();
    out.check(same, configs[c].at("kind").get<std::string>());
  }
  set_worker_count(0);
  std::filesystem::remove_all(dir);
  out.note(std::to_string(configs.size()) + " kinds byte-identical at 1 and 8 workers");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"closed-form quadrature oracles", quadrature_oracles},
      {"exact Brownian diagnostic", brownian_diagnostic},
      {"coupling-time law", coupling_time_law},
      {"stable bound domination", stable_domination},
      {"stable sharpness", sharpness},
      {"relativistic rate", relativistic},
      {"finite-mean dichotomy", dichotomy},
      {"Laplace validation", laplace},
      {"marginal preservation", marginals},
      {"product coupling", product},
      {"decomposition domination", decomposition},
      {"truncated-stable slope", truncated_stable},
      {"determinism", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(number)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.check(false, e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::printf("[%s] %2d %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", number,
                criteria[i].first.c_str(), secs, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
