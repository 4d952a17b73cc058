// Acceptance run: one PASS/FAIL line per criterion. Every criterion also
// writes a CSV; the whole run is repeated with three workers and the CSVs
// are compared field by field (wall-clock columns excepted).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "lambda_lab/construct.hpp"
#include "lambda_lab/diagnose.hpp"
#include "lambda_lab/exact_even.hpp"
#include "lambda_lab/io.hpp"
#include "lambda_lab/kp.hpp"
#include "lambda_lab/parallel.hpp"
#include "lambda_lab/partition.hpp"
#include "lambda_lab/rng.hpp"
#include "lambda_lab/select.hpp"

using namespace lambda_lab;
namespace fs = std::filesystem;

namespace {

// Tolerances and limits.
constexpr double kOracleRel = 1e-9;
constexpr double kOracleZ = 3.0;
constexpr std::size_t kMcSamples = 1'000'000;
constexpr double kC1Seconds = 60.0;
constexpr double kSlopeTol = 0.05;
constexpr double kC2Seconds = 300.0;
constexpr double kC3Tol = 0.1;
constexpr double kFlatSlope = 0.1;
constexpr double kFlatRatio = 3.0;
constexpr double kNecessitySlope = 0.3;
constexpr double kSquaresSlope = 0.15;
constexpr double kInterferenceFloor = 0.95;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct Outcome {
  bool pass = false;
  std::string detail;
  Table table;
};

struct Criterion {
  std::string id;
  std::string name;
  double limit_seconds = 0.0;  // 0: no runtime clause
  std::function<Outcome()> run;
};

std::string num(double v) { return format_number(v); }
std::string num(std::size_t v) { return std::to_string(v); }

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

double slope_of(const std::vector<std::pair<double, double>>& pairs) {
  return scaling_regression(pairs).slope;
}

std::vector<Complex> ones(std::size_t n) { return Coefficients::constant(n).values; }

double constant_bound(const FrequencySet& f, double p, NormConfig norm = {}) {
  KpConfig cfg;
  cfg.probes = {Probe::Constant};
  cfg.norm = norm;
  return estimate_kp(f, p, cfg).front().bound;
}

Outcome oracle_equivalence() {
  Outcome o;
  o.table.columns = {"set", "size", "exact_even", "energy", "rel_diff", "mc", "mc_se", "z"};
  double worst_rel = 0.0, worst_z = 0.0;
  for (std::uint64_t t = 0; t < 20; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(counter_uniform(derive_seed(11, t), 0) * 23);
    std::vector<std::int64_t> pts;
    for (std::uint64_t k = 1; pts.size() < n; ++k) {
      const auto v = static_cast<std::int64_t>(counter_uniform(derive_seed(11, t), k) * 200) - 100;
      if (std::find(pts.begin(), pts.end(), v) == pts.end()) pts.push_back(v);
    }
    const FrequencySet f(ManifoldSpec(ManifoldKind::Lattice, 1), 1, pts);
    const auto a = ones(f.size());
    const double exact = exact_even_norm(f, a, 4);
    const double energy = static_cast<double>(count_energy(f.lattice_data(), 1, 2));
    const double rel = std::abs(exact - energy) / energy;
    const MonteCarloEstimate mc = MonteCarloEngine(f).moment(a, 4.0, kMcSamples, t);
    const double z = (mc.mean - exact) / mc.std_error;
    worst_rel = std::max(worst_rel, rel);
    worst_z = std::max(worst_z, std::abs(z));
    o.table.rows.push_back({num(static_cast<std::size_t>(t)), num(f.size()), num(exact), num(energy), num(rel),
                            num(mc.mean), num(mc.std_error), num(z)});
  }
  o.pass = worst_rel <= kOracleRel && worst_z <= kOracleZ;
  o.detail = "max rel diff " + num(worst_rel) + ", max |z| " + fixed(worst_z, 2);
  return o;
}

Outcome dirichlet_scaling() {
  Outcome o;
  o.table.columns = {"p", "N", "bound", "method"};
  o.pass = true;
  for (double p : {4.0, 6.0}) {
    std::vector<std::pair<double, double>> pairs;
    for (std::int64_t N : {64, 128, 256, 512}) {
      KpConfig cfg;
      cfg.probes = {Probe::Constant};
      cfg.norm.method = NormMethod::ExactEven;
      const KpProbeReport r = estimate_kp(full_grid(ManifoldSpec(ManifoldKind::Lattice, 1), N), p, cfg).front();
      pairs.emplace_back(static_cast<double>(N), r.bound);
      o.table.rows.push_back({num(p), num(static_cast<double>(N)), num(r.bound), std::string(to_string(r.method))});
    }
    const double s = slope_of(pairs), want = 0.5 - 1.0 / p;
    o.pass = o.pass && std::abs(s - want) <= kSlopeTol;
    o.detail += (o.detail.empty() ? "" : ", ") + ("p=" + fixed(p, 0) + " slope " + fixed(s) + " (want " + fixed(want) + ")");
  }
  return o;
}

Outcome fullgrid_curvature() {
  Outcome o;
  o.table.columns = {"R", "size", "bound"};
  std::vector<std::pair<double, double>> pairs;
  for (std::int64_t R : {32, 64, 128, 256}) {
    const FrequencySet g = full_grid(ManifoldSpec(ManifoldKind::MomentCurve, 2), R);
    const double b = constant_bound(g, 6.0);
    pairs.emplace_back(static_cast<double>(R), b);
    o.table.rows.push_back({num(static_cast<double>(R)), num(g.size()), num(b)});
  }
  const double s = slope_of(pairs);
  o.pass = std::abs(s - 1.0 / 6.0) <= kC3Tol;
  o.detail = "slope " + fixed(s) + " (want 0.1667 +/- " + fixed(kC3Tol, 2) + ")";
  return o;
}

Outcome decoupling_flatness() {
  Outcome o;
  o.table.columns = {"R", "size", "constant", "random", "cap", "ascent", "best"};
  std::vector<std::pair<double, double>> pairs;
  double lo = INFINITY, hi = 0.0;
  for (std::int64_t R : {64, 144, 256, 576, 1024}) {
    const FrequencySet f = capwise_build(ManifoldSpec(ManifoldKind::MomentCurve, 2), R, 4);
    KpConfig cfg;
    cfg.probes = {Probe::Constant, Probe::Random, Probe::Cap, Probe::Ascent};
    cfg.seed = 4;
    const auto reps = estimate_kp(f, 6.0, cfg);
    double best = 0.0;
    std::vector<std::string> row{num(static_cast<double>(R)), num(f.size())};
    for (const auto& r : reps) {
      best = std::max(best, r.bound);
      row.push_back(num(r.bound));
    }
    row.push_back(num(best));
    o.table.rows.push_back(row);
    pairs.emplace_back(static_cast<double>(R), best);
    lo = std::min(lo, best);
    hi = std::max(hi, best);
  }
  const double s = slope_of(pairs);
  o.pass = std::abs(s) <= kFlatSlope && hi / lo <= kFlatRatio;
  o.detail = "slope " + fixed(s) + ", max/min " + fixed(hi / lo, 3);
  return o;
}

Outcome necessity_below_critical() {
  Outcome o;
  o.table.columns = {"R", "cap_size", "moment", "ratio", "method"};
  std::vector<std::pair<double, double>> pairs;
  for (std::int64_t R : {64, 128, 256, 512}) {
    const NecessityResult r = necessity_probe(full_grid(ManifoldSpec(ManifoldKind::MomentCurve, 2), R), 4.0, 0.5);
    pairs.emplace_back(static_cast<double>(R), r.ratio);
    o.table.rows.push_back({num(static_cast<double>(R)), num(r.cap_size), num(r.moment), num(r.ratio),
                            std::string(to_string(r.method))});
  }
  const double s = slope_of(pairs);
  o.pass = s >= kNecessitySlope;
  o.detail = "ratio slope " + fixed(s);
  return o;
}

Outcome squares_set() {
  Outcome o;
  o.table.columns = {"R", "size", "expected", "bound", "error", "method"};
  std::vector<std::pair<double, double>> pairs;
  bool sizes = true;
  for (std::int64_t R : {16, 81, 256}) {
    const FrequencySet s = squares_build(R);
    const auto r2 = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(R))));
    const auto r4 = static_cast<std::size_t>(std::llround(std::sqrt(std::sqrt(static_cast<double>(R)))));
    const std::size_t expected = (r2 - 1) * (r2 - 1) * (r4 - 1) * (r4 - 1);
    sizes = sizes && s.size() == expected;
    KpConfig cfg;
    cfg.probes = {Probe::Constant};
    cfg.norm.method = R == 256 ? NormMethod::MonteCarlo : NormMethod::ExactEven;
    cfg.norm.samples = kMcSamples;
    const KpProbeReport r = estimate_kp(s, 4.0, cfg).front();
    pairs.emplace_back(static_cast<double>(R), r.bound);
    o.table.rows.push_back({num(static_cast<double>(R)), num(s.size()), num(expected), num(r.bound), num(r.error),
                            std::string(to_string(r.method))});
  }
  const double s = slope_of(pairs);
  o.pass = sizes && s <= kSquaresSlope;
  o.detail = std::string(sizes ? "sizes exact" : "size mismatch") + ", slope " + fixed(s);
  return o;
}

Outcome hyperbolic_pipeline() {
  Outcome o;
  o.table.columns = {"member", "size", "bound"};
  const std::int64_t R = 64;
  const HyperbolicBuild hb = hyperbolic_build(R, 1);
  const DyadicCover cover = dyadic_cover(R);
  bool multiplicity = true;
  for (std::size_t i = 0; i < hb.set.size(); ++i) {
    const auto n = hb.set.lattice(i);
    multiplicity = multiplicity && cover.membership(n[0], n[1]).size() == 7;
  }
  for (const MemberProbe& m : hb.selection.table)
    o.table.rows.push_back({num(m.member), num(m.size), num(m.bound)});
  const double limit = 2.0 * std::log(64.0);
  const std::size_t n = hb.set.size();
  o.pass = hb.selection.success && hb.selection.draws <= kDefaultRetries && n >= 256 && n <= 768 && multiplicity &&
           hb.selection.worst <= limit;
  o.detail = "draws " + num(hb.selection.draws) + ", size " + num(n) + ", multiplicity " +
             (multiplicity ? "7" : "wrong") + ", worst " + fixed(hb.selection.worst, 3) + " <= " + fixed(limit, 3);
  return o;
}

Outcome chernoff_concentration() {
  Outcome o;
  o.table.columns = {"M", "delta", "trials", "inside_fraction"};
  const ConcentrationResult a = concentration_experiment(1000, 0.1, 10'000, 8);
  const ConcentrationResult b = concentration_experiment(250, 0.1, 10'000, 8);
  for (const auto* r : {&a, &b})
    o.table.rows.push_back({num(r->M), num(r->delta), num(r->sizes.size()), num(r->inside_fraction)});
  o.pass = a.inside_fraction >= 0.999 && b.inside_fraction >= 0.95;
  o.detail = "M=1000 " + fixed(a.inside_fraction) + ", M=250 " + fixed(b.inside_fraction);
  return o;
}

Outcome moment_bookkeeping() {
  Outcome o;
  o.table.columns = {"index", "n", "xi1"};
  const std::int64_t R = 4096;
  const FrequencySet g = moment_build(3, R, 9);
  const auto& window = g.provenance().params.at("window");
  const double lo = window[0].get<double>(), hi = window[1].get<double>();
  bool lattice = true;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::int64_t n = g.lattice(i)[0];
    const double s1 = g.frequency(i)[0];
    lattice = lattice && g.axis_exact(0) && g.axis_denominator(0) == 1 && s1 == static_cast<double>(n);
    o.table.rows.push_back({num(i), num(static_cast<double>(n)), num(s1 / static_cast<double>(R))});
  }
  const double target = g.provenance().params.at("total_target").get<double>();
  const auto size = static_cast<double>(g.size());
  o.pass = target == 64.0 && size >= lo && size <= hi && lattice;
  o.detail = "size " + num(g.size()) + " in [" + fixed(lo, 0) + ", " + fixed(hi, 0) + "], first coordinates " +
             (lattice ? "on the lattice" : "off the lattice");
  return o;
}

Outcome interference_floor() {
  Outcome o;
  o.table.columns = {"set", "d", "size", "min_ratio"};
  const std::vector<FrequencySet> grids{full_grid(ManifoldSpec(ManifoldKind::Lattice, 1), 512),
                                        full_grid(ManifoldSpec(ManifoldKind::MomentCurve, 2), 256),
                                        full_grid(ManifoldSpec(ManifoldKind::EllipticParaboloid, 3), 32)};
  double worst = INFINITY;
  for (std::uint64_t t = 0; t < 50; ++t) {
    const FrequencySet& g = grids[t % 3];
    const std::uint64_t seed = derive_seed(10, t);
    // A random box in lattice coordinates, then a random half of its points.
    std::vector<std::int64_t> lo(g.lattice(0).size()), hi(lo.size());
    for (std::size_t a = 0; a < lo.size(); ++a) {
      const double u = counter_uniform(seed, 2 * a), v = counter_uniform(seed, 2 * a + 1);
      lo[a] = static_cast<std::int64_t>(std::min(u, v) * static_cast<double>(g.R()));
      hi[a] = lo[a] + 1 + static_cast<std::int64_t>(std::abs(u - v) * static_cast<double>(g.R()));
    }
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto n = g.lattice(i);
      bool inside = true;
      for (std::size_t a = 0; a < lo.size(); ++a) inside = inside && n[a] >= lo[a] && n[a] < hi[a];
      if (inside && counter_uniform(seed, 100 + i) < 0.5) members.push_back(i);
    }
    if (members.empty()) members.push_back(0);
    const InterferenceResult r = interference_lower(g, members);
    worst = std::min(worst, r.min_ratio);
    o.table.rows.push_back({num(static_cast<std::size_t>(t)), num(static_cast<double>(g.d())), num(members.size()),
                            num(r.min_ratio)});
  }
  o.pass = worst >= kInterferenceFloor;
  o.detail = "min ratio " + fixed(worst) + " over 50 sets";
  return o;
}

void write_table(const fs::path& path, const Table& t) {
  std::ofstream out(path);
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path dir = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
  fs::create_directories(dir);

  const std::vector<Criterion> criteria{
      {"C1", "oracle equivalence", kC1Seconds, oracle_equivalence},
      {"C2", "Dirichlet scaling", kC2Seconds, dirichlet_scaling},
      {"C3", "full-grid curvature scaling", 0.0, fullgrid_curvature},
      {"C4", "tight-decoupling flatness", 0.0, decoupling_flatness},
      {"C5", "necessity below critical", 0.0, necessity_below_critical},
      {"C6", "squares set", 0.0, squares_set},
      {"C7", "hyperbolic pipeline", 0.0, hyperbolic_pipeline},
      {"C8", "Chernoff concentration", 0.0, chernoff_concentration},
      {"C9", "moment recursion bookkeeping", 0.0, moment_bookkeeping},
      {"C10", "interference floor", 0.0, interference_floor},
  };

  bool all = true;
  std::map<std::string, Table> first;
  for (const Criterion& c : criteria) {
    set_worker_count(1);
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("threw: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0.0 && seconds > c.limit_seconds) {
      o.pass = false;
      o.detail += ", over the " + fixed(c.limit_seconds, 0) + " s limit";
    }
    write_table(dir / (c.id + ".csv"), o.table);
    first[c.id] = o.table;
    all = all && o.pass;
    std::cout << c.id << ' ' << (o.pass ? "PASS" : "FAIL") << "  " << c.name << ": " << o.detail << " ["
              << fixed(seconds, 1) << " s]" << std::endl;
  }

  // Rerun under three workers and compare every CSV field.
  const auto start = std::chrono::steady_clock::now();
  set_worker_count(3);
  std::vector<std::string> differing;
  for (const Criterion& c : criteria) {
    Table again;
    try {
      again = c.run().table;
    } catch (const std::exception&) {
    }
    write_table(dir / (c.id + ".workers3.csv"), again);
    if (again.columns != first[c.id].columns || again.rows != first[c.id].rows) differing.push_back(c.id);
  }
  set_worker_count(0);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool same = differing.empty();
  all = all && same;
  std::string detail = "1 vs 3 workers, " + std::to_string(criteria.size()) + " CSVs ";
  if (same) {
    detail += "identical";
  } else {
    detail += "differ:";
    for (const auto& id : differing) detail += " " + id;
  }
  std::cout << "C11 " << (same ? "PASS" : "FAIL") << "  reproducibility: " << detail << " [" << fixed(seconds, 1)
            << " s]" << std::endl;
  return all ? 0 : 1;
}
