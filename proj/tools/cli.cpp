#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "lambda_lab/construct.hpp"
#include "lambda_lab/diagnose.hpp"
#include "lambda_lab/error.hpp"
#include "lambda_lab/exact_even.hpp"
#include "lambda_lab/io.hpp"
#include "lambda_lab/kp.hpp"
#include "lambda_lab/parallel.hpp"
#include "lambda_lab/partition.hpp"
#include "lambda_lab/rng.hpp"
#include "lambda_lab/select.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace lambda_lab::cli {
namespace {

constexpr std::uint64_t kOracleTag = 0x6f7261636c65ULL;

// Thrown by a subcommand when a cross-check or audit does not hold.
struct CheckFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string manifold = "paraboloid";
  int d = 3;
  std::vector<std::int64_t> R;
  std::string method = "capwise";
  std::optional<double> p;
  double q = 2.0;
  std::uint64_t seed = 0;
  std::size_t retries = kDefaultRetries;
  std::string set;
  std::string out;
  std::string probes = "constant,random";
  std::size_t trials = 64;
  std::size_t restarts = 8;
  std::size_t iterations = 50;
  double cap_beta = 0.5;
  bool star = false;
  std::string norm = "auto";
  std::size_t samples = 1'000'000;
  double resolution = 4.0;
  // oracle
  std::size_t max_points = 24;
  std::int64_t max_value = 64;
  // experiment
  std::string kind = "concentration";
  std::size_t M = 1000;
  double delta = 0.1;
  std::optional<double> kq;
  double C = 2.0;
  // diagnose
  std::string kinds = "all";
  double beta = 0.5;
  std::vector<double> radii;
  std::size_t per_axis = 3;
  std::size_t threads = 0;
};

NormConfig norm_config(const Options& o) {
  NormConfig n;
  n.method = parse_norm_method(o.norm);
  n.samples = o.samples;
  n.resolution = o.resolution;
  n.seed = derive_seed(o.seed, 0x6e6f726dULL);
  return n;
}

KpConfig kp_config(const Options& o) {
  KpConfig k;
  k.probes = parse_probes(o.probes);
  k.random_trials = o.trials;
  k.restarts = o.restarts;
  k.iterations = o.iterations;
  k.cap_beta = o.cap_beta;
  k.norm = norm_config(o);
  k.seed = o.seed;
  return k;
}

std::string set_id(const std::string& path) { return fs::path(path).stem().string(); }

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string num(double v) { return format_number(v); }
std::string num(std::size_t v) { return std::to_string(v); }

// The serialized run: subcommand plus every option value, defaults included.
// --threads is left out so the hash does not depend on the worker count.
json run_config(const CLI::App& sub) {
  json opts = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_lnames().empty() ? opt->get_name() : opt->get_lnames().front();
    if (name == "help" || name == "threads") continue;
    if (opt->count() > 0) {
      const auto res = opt->reduced_results();
      opts[name] = res.size() == 1 ? json(res.front()) : json(res);
    } else {
      opts[name] = opt->get_default_str();
    }
  }
  return {{"command", sub.get_name()}, {"options", opts}, {"tool", "lambda_lab 0.1.0"}};
}

ConstructionParams construction(const Options& o, std::int64_t R) {
  ConstructionParams c;
  c.method = parse_construction_method(o.method);
  c.kind = parse_manifold_kind(o.manifold);
  c.d = o.d;
  c.R = R;
  c.p = o.p.value_or(4.0);
  c.seed = o.seed;
  c.retries = o.retries;
  if ((c.method == ConstructionMethod::Smallcap || c.method == ConstructionMethod::FullgridSelect) && !o.p)
    throw InvalidArgument(std::string(to_string(c.method)) + " needs --p");
  return c;
}

FrequencySet build_with_provenance(const Options& o, std::int64_t R, const json& config) {
  FrequencySet f = build(construction(o, R));
  Provenance prov = f.provenance();
  prov.params["run_config"] = config;
  prov.params["config_hash"] = hex64(fnv1a(config.dump()));
  f.set_provenance(std::move(prov));
  return f;
}

double require_p(const Options& o) {
  if (!o.p) throw InvalidArgument("--p is required");
  return *o.p;
}

// ---------------------------------------------------------------- build

int cmd_build(const Options& o, const json& config, std::ostream& out) {
  if (o.R.size() != 1) throw InvalidArgument("build takes exactly one --R");
  const FrequencySet f = build_with_provenance(o, o.R.front(), config);
  save_set(f, o.out);
  out << "built " << f.size() << " points (" << o.method << ", " << to_string(f.spec().kind())
      << " d=" << f.d() << ", R=" << f.R() << ", seed=" << o.seed << ") -> " << o.out << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- estimate

int cmd_estimate(const Options& o, const json& config, std::ostream& out) {
  const FrequencySet f = load_set(o.set);
  const double p = require_p(o);
  const KpConfig cfg = kp_config(o);
  const auto reports = o.star ? estimate_kp_star(f, p, cfg) : estimate_kp(f, p, cfg);
  CsvWriter csv(o.out, config, kp_report_columns());
  const std::string id = set_id(o.set);
  for (const auto& r : reports) {
    csv.row(kp_report_row(id, r));
    out << to_string(r.probe) << ": K_p" << (o.star ? "*" : "") << " >= " << num(r.bound) << " (+/- "
        << num(r.error) << ", " << to_string(r.method) << ")\n";
  }
  out << "wrote " << reports.size() << " rows -> " << o.out << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- sweep

int cmd_sweep(const Options& o, const json& config, std::ostream& out) {
  if (o.R.size() < 3) throw InvalidArgument("sweep needs at least three --R values");
  const double p = require_p(o);
  const KpConfig cfg = kp_config(o);
  std::vector<std::string> cols{"R", "size"};
  for (Probe pr : cfg.probes) {
    cols.emplace_back(to_string(pr));
    cols.push_back(std::string(to_string(pr)) + "_error");
  }
  cols.insert(cols.end(), {"best", "method", "seed", "wall_ms"});
  CsvWriter csv(o.out, config, cols);

  std::map<std::string, std::vector<std::pair<double, double>>> series;
  for (std::int64_t R : o.R) {
    const auto t0 = std::chrono::steady_clock::now();
    const FrequencySet f = build(construction(o, R));
    const auto reports = o.star ? estimate_kp_star(f, p, cfg) : estimate_kp(f, p, cfg);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    std::vector<std::string> row{std::to_string(R), num(f.size())};
    double best = 0.0;
    std::string method = "exact-even";
    for (const auto& r : reports) {
      row.push_back(num(r.bound));
      row.push_back(num(r.error));
      series[std::string(to_string(r.probe))].emplace_back(static_cast<double>(R), r.bound);
      if (r.bound > best) {
        best = r.bound;
        method = std::string(to_string(r.method));
      }
    }
    series["best"].emplace_back(static_cast<double>(R), best);
    row.insert(row.end(), {num(best), method, std::to_string(o.seed), num(ms)});
    csv.row(row);
    out << "R=" << R << " size=" << f.size() << " best=" << num(best) << '\n';
  }

  json fits = json::object();
  for (const auto& [name, pairs] : series) {
    const ScalingFit fit = scaling_regression(pairs);
    fits[name] = {{"slope", fit.slope}, {"halfwidth", fit.halfwidth}, {"intercept", fit.intercept}, {"r2", fit.r2}};
    out << "fit " << name << ": slope " << num(fit.slope) << " +/- " << num(fit.halfwidth) << " (r2 "
        << num(fit.r2) << ")\n";
  }
  fs::path summary = o.out;
  summary.replace_extension(".fit.json");
  std::ofstream(summary) << json{{"config", config}, {"config_hash", hex64(fnv1a(config.dump()))}, {"fits", fits}}.dump(2)
                         << '\n';
  std::vector<std::string> ys;
  for (Probe pr : cfg.probes) ys.emplace_back(to_string(pr));
  const fs::path plot = write_plot_script(o.out, "R", ys, true);
  out << "wrote " << o.out << ", " << summary.string() << ", " << plot.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- oracle

std::vector<std::int64_t> random_lattice_set(std::uint64_t seed, std::size_t trial, std::size_t max_points,
                                             std::int64_t max_value) {
  const std::uint64_t s = derive_seed(seed, kOracleTag, trial);
  const std::size_t cap = std::min<std::size_t>(max_points, static_cast<std::size_t>(max_value));
  const std::size_t n = 2 + static_cast<std::size_t>(counter_uniform(s, 0) * static_cast<double>(cap - 1));
  std::set<std::int64_t> pts;
  for (std::uint64_t draw = 0; pts.size() < n; ++draw)
    pts.insert(static_cast<std::int64_t>(counter_uniform(s, 1, draw) * static_cast<double>(max_value)));
  return {pts.begin(), pts.end()};
}

int cmd_oracle(const Options& o, const json& config, std::ostream& out) {
  const double p = o.p.value_or(4.0);
  if (p != std::floor(p) || static_cast<long>(p) % 2 != 0 || p < 2) throw InvalidArgument("oracle needs an even --p");
  const int k = static_cast<int>(p) / 2;

  if (!o.set.empty()) {
    const FrequencySet f = load_set(o.set);
    const auto a = Coefficients::constant(f.size());
    CsvWriter csv(o.out, config, norm_report_columns());
    const std::string id = set_id(o.set);
    std::vector<NormReport> reps;
    for (NormMethod m : {NormMethod::ExactEven, NormMethod::Quadrature, NormMethod::MonteCarlo}) {
      NormConfig nc = norm_config(o);
      nc.method = m;
      try {
        reps.push_back(NormEngine(f, p, nc).report(a.values));
      } catch (const BudgetExceeded& e) {
        out << to_string(m) << ": skipped (" << e.what() << ")\n";
      }
    }
    for (const auto& r : reps) {
      csv.row(norm_report_row(id, r));
      out << to_string(r.method) << ": moment " << num(r.moment) << " +/- " << num(r.moment_error) << '\n';
    }
    return kExitOk;
  }

  CsvWriter csv(o.out, config,
                {"trial", "size", "p", "exact_even", "energy", "rel_diff", "monte_carlo", "mc_std_error", "z", "seed"});
  bool ok = true;
  std::size_t worst_trial = 0;
  double worst_rel = 0.0, worst_z = 0.0;
  for (std::size_t t = 0; t < o.trials; ++t) {
    const auto pts = random_lattice_set(o.seed, t, o.max_points, o.max_value);
    const FrequencySet f(ManifoldSpec(ManifoldKind::Lattice, 1), 1, pts);
    const auto a = Coefficients::constant(f.size());
    const double exact = exact_even_norm(f, a.values, static_cast<int>(p));
    const auto energy = static_cast<double>(count_energy(pts, 1, k));
    const double rel = std::abs(exact - energy) / energy;
    NormConfig nc = norm_config(o);
    nc.method = NormMethod::MonteCarlo;
    nc.seed = derive_seed(o.seed, kOracleTag + 1, t);
    const NormReport mc = NormEngine(f, p, nc).report(a.values);
    const double z = (mc.moment - exact) / mc.moment_error;
    ok = ok && rel <= 1e-9 && std::abs(z) <= 3.0;
    if (rel > worst_rel) worst_rel = rel;
    if (std::abs(z) > std::abs(worst_z)) {
      worst_z = z;
      worst_trial = t;
    }
    csv.row({num(t), num(f.size()), num(p), num(exact), num(energy), num(rel), num(mc.moment),
             num(mc.moment_error), num(z), std::to_string(nc.seed)});
  }
  out << "oracle: " << o.trials << " sets, max relative difference " << num(worst_rel) << ", max |z| "
      << num(std::abs(worst_z)) << " (trial " << worst_trial << ") -> " << o.out << '\n';
  if (!ok) throw CheckFailed("oracle cross-check failed");
  return kExitOk;
}

// ---------------------------------------------------------------- experiment

fs::path sibling(const std::string& out, const std::string& suffix) {
  fs::path p = out;
  p.replace_extension(suffix);
  return p;
}

int cmd_experiment(const Options& o, const json& config, std::ostream& out) {
  if (o.kind == "concentration") {
    const ConcentrationResult r = concentration_experiment(o.M, o.delta, o.trials, o.seed);
    {
      CsvWriter csv(o.out, config, {"trial", "size", "accepted", "seed"});
      for (std::size_t t = 0; t < r.sizes.size(); ++t)
        csv.row({num(t), num(r.sizes[t]), r.inside[t] ? "1" : "0", std::to_string(o.seed)});
    }
    const fs::path cdf_path = sibling(o.out, ".cdf.csv");
    CsvWriter cdf(cdf_path, config, {"size", "fraction"});
    for (const auto& [s, frac] : r.cdf) cdf.row({num(s), num(frac)});
    write_plot_script(cdf_path, "size", {"fraction"}, false);
    out << "concentration: M=" << o.M << " delta=" << num(o.delta) << " inside fraction "
        << num(r.inside_fraction) << " over " << o.trials << " trials\n";
    return kExitOk;
  }
  if (o.kind == "tail") {
    const double p = require_p(o);
    const FrequencySet f = o.set.empty() ? build(construction(o, o.R.empty() ? 128 : o.R.front())) : load_set(o.set);
    const TailExperiment r = kp_tail_experiment(f, o.q, p, o.trials, o.seed, kp_config(o), o.kq);
    {
      CsvWriter csv(o.out, config, {"trial", "size", "accepted", "probe_max", "seed"});
      for (const auto& t : r.trials)
        csv.row({num(t.trial), num(t.size), t.accepted ? "1" : "0", num(t.probe_max), std::to_string(t.seed)});
    }
    const fs::path ex = sibling(o.out, ".exceedance.csv");
    CsvWriter csv(ex, config, {"u", "fraction"});
    for (const auto& [u, frac] : r.exceedance) csv.row({num(u), num(frac)});
    write_plot_script(ex, "u", {"fraction"}, false);
    out << "tail: delta=" << num(r.plan.delta) << " median " << num(r.median) << " p95 " << num(r.p95) << " max "
        << num(r.max) << " slope vs u^2 " << num(r.tail_slope) << '\n';
    return kExitOk;
  }
  if (o.kind == "family") {
    const std::int64_t R = o.R.empty() ? 64 : o.R.front();
    FamilyValidator v;
    v.C = o.C;
    v.norm = norm_config(o);
    const HyperbolicBuild hb = hyperbolic_build(R, o.seed, v, o.retries);
    CsvWriter csv(o.out, config, {"member", "size", "bound", "method", "seed"});
    for (const auto& m : hb.selection.table)
      csv.row({num(m.member), num(m.size), num(m.bound), std::string(to_string(m.method)), std::to_string(o.seed)});
    out << "family: R=" << R << " size " << hb.set.size() << " draws " << hb.selection.draws << " worst "
        << num(hb.selection.worst) << " threshold " << num(hb.selection.threshold)
        << (hb.selection.success ? " (accepted)\n" : " (FAILED)\n");
    if (!hb.selection.success) throw ValidationFailure("family selection exhausted its retries");
    return kExitOk;
  }
  throw InvalidArgument("unknown experiment kind: " + o.kind);
}

// ---------------------------------------------------------------- diagnose

int cmd_diagnose(const Options& o, const json& config, std::ostream& out) {
  const FrequencySet f = load_set(o.set);
  std::set<std::string> kinds;
  if (o.kinds == "all") {
    kinds = {"interference", "necessity", "balls", "equidistribution"};
  } else {
    std::string item;
    for (char c : o.kinds + ",") {
      if (c == ',') {
        if (!item.empty()) kinds.insert(item);
        item.clear();
      } else {
        item += c;
      }
    }
  }
  CsvWriter csv(o.out, config, {"kind", "R", "param", "value", "error", "seed"});
  const std::string R = std::to_string(f.R()), seed = std::to_string(o.seed);
  for (const std::string& kind : kinds) {
    if (kind == "interference") {
      const CapPartition caps = cap_partition(f, o.beta);
      const auto& members = caps.caps[caps.densest()].members;
      const InterferenceResult r = interference_lower(f, members, o.per_axis);
      csv.row({"interference", R, num(o.beta), num(r.min_ratio), "0", seed});
      out << "interference: min ratio " << num(r.min_ratio) << " over " << r.samples << " samples (floor "
          << num(r.analytic_floor) << ")\n";
    } else if (kind == "necessity") {
      const NecessityResult r = necessity_probe(f, o.p.value_or(4.0), o.beta, norm_config(o));
      csv.row({"necessity", R, num(o.beta), num(r.ratio), num(r.ratio_error), seed});
      csv.row({"necessity_cap_size", R, num(o.beta), num(r.cap_size), "0", seed});
      out << "necessity: cap " << r.cap_size << " ratio " << num(r.ratio) << " +/- " << num(r.ratio_error) << '\n';
    } else if (kind == "balls") {
      std::vector<double> radii = o.radii;
      if (radii.empty())
        for (double r = 1.0 / 32; r <= 0.25 + 1e-12; r *= 2) radii.push_back(r);
      const BallCounts b = ball_counts(f, radii);
      for (std::size_t k = 0; k < b.radii.size(); ++k)
        csv.row({"ball", R, num(b.radii[k]), num(b.max_fraction[k]), "0", seed});
      csv.row({"ball_alpha", R, "0", num(b.alpha), num(b.alpha_halfwidth), seed});
      out << "balls: alpha " << num(b.alpha) << " +/- " << num(b.alpha_halfwidth) << '\n';
    } else if (kind == "equidistribution") {
      const CapEquidistribution e = cap_equidistribution(f, o.delta);
      for (const auto& [name, v] : std::vector<std::pair<std::string, double>>{{"cap_predicted", e.predicted},
                                                                               {"cap_min", e.min},
                                                                               {"cap_median", e.median},
                                                                               {"cap_max", e.max},
                                                                               {"cap_dispersion", e.dispersion}})
        csv.row({name, R, num(o.delta), num(v), "0", seed});
      out << "equidistribution: " << e.counts.size() << " cells, min " << num(e.min) << " median " << num(e.median)
          << " max " << num(e.max) << " (predicted " << num(e.predicted) << ")\n";
    } else {
      throw InvalidArgument("unknown diagnostic: " + kind);
    }
  }
  write_plot_script(o.out, "param", {"value"}, true);
  return kExitOk;
}

// ---------------------------------------------------------------- wiring

void add_manifold(CLI::App* sub, Options& o) {
  sub->add_option("--manifold", o.manifold, "paraboloid, sphere, hyperbolic, momentcurve, cone, lattice");
  sub->add_option("--d", o.d, "ambient dimension");
  sub->add_option("--method", o.method, "capwise, squares, hyperbolic, moment, smallcap, fullgrid-select, fullgrid");
  sub->add_option("--seed", o.seed);
  sub->add_option("--retries", o.retries);
}

void add_norm(CLI::App* sub, Options& o) {
  sub->add_option("--norm", o.norm, "auto, exact-even, quadrature, monte-carlo");
  sub->add_option("--samples", o.samples, "Monte-Carlo samples");
  sub->add_option("--resolution", o.resolution, "quadrature samples per unit frequency");
}

void add_probes(CLI::App* sub, Options& o) {
  sub->add_option("--probes,--probe", o.probes, "comma-separated: constant, random, cap, ascent");
  sub->add_option("--trials", o.trials, "random probes");
  sub->add_option("--restarts", o.restarts);
  sub->add_option("--iterations", o.iterations);
  sub->add_option("--cap-beta", o.cap_beta);
  sub->add_flag("--star", o.star, "normalize by N^{1/2-1/p} |a|_p instead of |a|_2");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Candidate Lambda(p) sets: construction, norm certification and scaling diagnostics", "lambda_lab"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1, 1);
  app.add_option("--threads", o.threads, "worker threads (default: LAMBDA_LAB_THREADS or all cores)");

  CLI::App* b = app.add_subcommand("build", "construct a frequency set and write it as JSON");
  add_manifold(b, o);
  b->add_option("--R", o.R, "scale")->required()->delimiter(',')->default_str("");
  b->add_option("--p", o.p, "exponent (smallcap, fullgrid-select)");
  b->add_option("--out", o.out)->required()->default_str("");

  CLI::App* e = app.add_subcommand("estimate", "probe lower bounds for K_p of a stored set");
  e->add_option("--set", o.set)->required()->check(CLI::ExistingFile);
  e->add_option("--p", o.p)->required();
  e->add_option("--seed", o.seed);
  add_probes(e, o);
  add_norm(e, o);
  e->add_option("--out", o.out)->required()->default_str("");

  CLI::App* s = app.add_subcommand("sweep", "K_p probes across several R with a log-log fit");
  add_manifold(s, o);
  s->add_option("--R", o.R)->required()->delimiter(',')->default_str("");
  s->add_option("--p", o.p)->required();
  add_probes(s, o);
  add_norm(s, o);
  o.out = "sweep.csv";
  s->add_option("--out", o.out);

  CLI::App* r = app.add_subcommand("oracle", "cross-check exact-even norms against energy counts and Monte-Carlo");
  r->add_option("--p", o.p, "even exponent (default 4)");
  r->add_option("--trials", o.trials, "random sets");
  r->add_option("--max-points", o.max_points);
  r->add_option("--max-value", o.max_value);
  r->add_option("--seed", o.seed);
  r->add_option("--set", o.set, "cross-check the methods on a stored set instead")->check(CLI::ExistingFile);
  add_norm(r, o);
  r->add_option("--out", o.out)->required()->default_str("");

  CLI::App* x = app.add_subcommand("experiment", "random-selection experiments");
  x->add_option("--kind", o.kind)->check(CLI::IsMember({"concentration", "tail", "family"}));
  x->add_option("--M", o.M);
  x->add_option("--delta", o.delta);
  x->add_option("--q", o.q);
  x->add_option("--p", o.p);
  x->add_option("--kq", o.kq, "known K_q (tail)");
  x->add_option("--C", o.C, "family threshold C log N");
  x->add_option("--set", o.set)->check(CLI::ExistingFile);
  x->add_option("--R", o.R)->delimiter(',')->default_str("");
  add_manifold(x, o);
  add_probes(x, o);
  add_norm(x, o);
  x->add_option("--out", o.out)->required()->default_str("");

  CLI::App* g = app.add_subcommand("diagnose", "interference, necessity, ball counts and cap equidistribution");
  g->add_option("--set", o.set)->required()->check(CLI::ExistingFile);
  g->add_option("--kinds", o.kinds, "all or a comma-separated subset");
  g->add_option("--p", o.p);
  g->add_option("--beta", o.beta);
  g->add_option("--radii", o.radii)->delimiter(',')->default_str("");
  g->add_option("--delta", o.delta);
  g->add_option("--per-axis", o.per_axis);
  g->add_option("--seed", o.seed);
  add_norm(g, o);
  g->add_option("--out", o.out)->required()->default_str("");

  std::vector<const char*> argv{"lambda_lab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  }

  if (o.threads > 0) set_worker_count(o.threads);
  CLI::App* sub = app.get_subcommands().front();
  const json config = run_config(*sub);
  try {
    int rc = kExitUsage;
    if (sub == b) rc = cmd_build(o, config, out);
    if (sub == e) rc = cmd_estimate(o, config, out);
    if (sub == s) rc = cmd_sweep(o, config, out);
    if (sub == r) rc = cmd_oracle(o, config, out);
    if (sub == x) rc = cmd_experiment(o, config, out);
    if (sub == g) rc = cmd_diagnose(o, config, out);
    set_worker_count(0);
    return rc;
  } catch (const ValidationFailure& ex) {
    err << "validation failed: " << ex.what() << '\n';
  } catch (const RetryExhausted& ex) {
    err << "retries exhausted: " << ex.what() << " (sizes:";
    for (std::size_t n : ex.size_history()) err << ' ' << n;
    err << ")\n";
  } catch (const CheckFailed& ex) {
    err << "check failed: " << ex.what() << '\n';
  } catch (const std::exception& ex) {
    set_worker_count(0);
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  }
  set_worker_count(0);
  return kExitValidation;
}

}  // namespace lambda_lab::cli
