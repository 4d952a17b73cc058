#include "lambda_lab/kp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <tuple>

#include "lambda_lab/error.hpp"
#include "lambda_lab/parallel.hpp"
#include "lambda_lab/partition.hpp"
#include "lambda_lab/rng.hpp"

namespace lambda_lab {
namespace {

constexpr std::uint64_t kRandomTag = 0x52414e44ULL;
constexpr std::uint64_t kRestartTag = 0x41534345ULL;
constexpr double kMinStep = 1.0 / 64.0;

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

double denominator(std::span<const Complex> a, double p, Normalization normalization) {
  double s = 0.0;
  if (normalization == Normalization::L2) {
    for (const Complex& v : a) s += std::norm(v);
    return std::sqrt(s);
  }
  for (const Complex& v : a) s += std::pow(std::abs(v), p);
  const double n = static_cast<double>(a.size());
  return std::pow(n, 0.5 - 1.0 / p) * std::pow(s, 1.0 / p);
}

// Scales v to unit denominator in place; false for the zero vector.
bool normalize(std::vector<Complex>& v, double p, Normalization normalization) {
  const double den = denominator(v, p, normalization);
  if (!(den > 0.0) || !std::isfinite(den)) return false;
  for (Complex& x : v) x /= den;
  return true;
}

KpProbeReport base_report(const NormEngine& engine, Probe probe, Normalization normalization,
                          std::uint64_t seed) {
  KpProbeReport r;
  r.p = engine.p();
  r.probe = probe;
  r.normalization = normalization;
  r.seed = seed;
  r.method = engine.method();
  return r;
}

std::vector<KpProbeReport> estimate(const FrequencySet& fset, double p, const KpConfig& config,
                                    Normalization normalization) {
  if (fset.empty()) throw InvalidArgument("kp: empty frequency set");
  if (!(p >= 2.0)) throw InvalidArgument("kp: p must be >= 2");
  if (config.probes.empty()) throw InvalidArgument("kp: no probes requested");
  const NormEngine engine(fset, p, config.norm);
  const std::size_t n = fset.size();

  std::vector<KpProbeReport> out;
  std::vector<std::vector<Complex>> ascent_starts;
  for (Probe probe : config.probes) {
    const auto t0 = std::chrono::steady_clock::now();
    KpProbeReport r = base_report(engine, probe, normalization, config.seed);
    switch (probe) {
      case Probe::Constant: {
        r.witness.assign(n, Complex{1.0, 0.0});
        std::tie(r.bound, r.error) = kp_ratio(engine, r.witness, normalization);
        break;
      }
      case Probe::Random: {
        const std::size_t trials = std::max<std::size_t>(1, config.random_trials);
        std::vector<std::pair<double, double>> values(trials);
        parallel_for(trials, [&](std::size_t t) {
          const Coefficients c = Coefficients::steinhaus(n, derive_seed(config.seed, kRandomTag), t);
          values[t] = kp_ratio(engine, c.values, normalization);
        });
        std::size_t best = 0;
        for (std::size_t t = 1; t < trials; ++t)
          if (values[t].first > values[best].first) best = t;
        r.bound = values[best].first;
        r.error = values[best].second;
        r.trials = trials;
        r.witness = Coefficients::steinhaus(n, derive_seed(config.seed, kRandomTag), best).values;
        ascent_starts.push_back(r.witness);
        break;
      }
      case Probe::Cap: {
        const CapPartition caps = cap_partition(fset, config.cap_beta);
        const Cap& cap = caps.caps[caps.densest()];
        r.witness = Coefficients::indicator(n, cap.members).values;
        std::tie(r.bound, r.error) = kp_ratio(engine, r.witness, normalization);
        break;
      }
      case Probe::Ascent: {
        r = ascend_kp(engine, config, ascent_starts, normalization);
        break;
      }
    }
    r.wall_ms = elapsed_ms(t0);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::string_view to_string(Probe probe) {
  switch (probe) {
    case Probe::Constant: return "constant";
    case Probe::Random: return "random";
    case Probe::Cap: return "cap";
    case Probe::Ascent: return "ascent";
  }
  return "unknown";
}

std::string_view to_string(Normalization n) { return n == Normalization::L2 ? "l2" : "lp"; }

Probe parse_probe(std::string_view name) {
  if (name == "constant") return Probe::Constant;
  if (name == "random") return Probe::Random;
  if (name == "cap") return Probe::Cap;
  if (name == "ascent") return Probe::Ascent;
  throw InvalidArgument("unknown probe: " + std::string(name));
}

std::vector<Probe> parse_probes(std::string_view list) {
  std::vector<Probe> out;
  while (!list.empty()) {
    const auto comma = list.find(',');
    const auto item = list.substr(0, comma);
    if (!item.empty()) out.push_back(parse_probe(item));
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  if (out.empty()) throw InvalidArgument("empty probe list");
  return out;
}

std::pair<double, double> kp_ratio(const NormEngine& engine, std::span<const Complex> a,
                                   Normalization normalization) {
  const double den = denominator(a, engine.p(), normalization);
  if (!(den > 0.0)) throw InvalidArgument("kp: zero coefficient vector");
  const NormReport rep = engine.report(a);
  return {rep.value / den, rep.error / den};
}

std::vector<KpProbeReport> estimate_kp(const FrequencySet& fset, double p, const KpConfig& config) {
  return estimate(fset, p, config, Normalization::L2);
}

std::vector<KpProbeReport> estimate_kp_star(const FrequencySet& fset, double p,
                                            const KpConfig& config) {
  return estimate(fset, p, config, Normalization::Lp);
}

KpProbeReport ascend_kp(const FrequencySet& fset, double p, const KpConfig& config,
                        std::span<const std::vector<Complex>> starts, Normalization normalization) {
  if (fset.empty()) throw InvalidArgument("kp: empty frequency set");
  if (!(p >= 2.0) || p != std::floor(p) || static_cast<long>(p) % 2 != 0)
    throw InvalidArgument("ascent needs an even integer exponent");
  NormConfig nc = config.norm;
  if (nc.method == NormMethod::MonteCarlo)
    throw InvalidArgument("ascent needs exact-even or quadrature norms");
  const NormEngine engine(fset, p, nc);
  return ascend_kp(engine, config, starts, normalization);
}

KpProbeReport ascend_kp(const NormEngine& engine, const KpConfig& config,
                        std::span<const std::vector<Complex>> starts, Normalization normalization) {
  const double p = engine.p();
  if (p != std::floor(p) || static_cast<long>(p) % 2 != 0)
    throw InvalidArgument("ascent needs an even integer exponent");
  if (!engine.has_gradient())
    throw BudgetExceeded("ascent: no exact-even or quadrature rule fits the budget", 0.0, 0.0);
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = engine.size();
  // Direction map: l2 uses b/‖b‖₂; lp uses the dual map |b|^{p'-1} sign(b).
  const double dual = 1.0 / (p - 1.0);

  std::vector<std::vector<Complex>> inits;
  inits.emplace_back(n, Complex{1.0, 0.0});
  for (const auto& s : starts)
    if (s.size() == n) inits.push_back(s);
  const std::size_t total = std::max(config.restarts, inits.size());
  for (std::size_t r = inits.size(); r < total; ++r)
    inits.push_back(Coefficients::steinhaus(n, derive_seed(config.seed, kRestartTag), r).values);

  struct Result {
    double objective = -1.0;
    std::size_t iterations = 0;
    std::vector<Complex> a;
  };
  std::vector<Result> results(total);

  parallel_for(total, [&](std::size_t r) {
    std::vector<Complex> a = inits[r];
    if (!normalize(a, p, normalization)) return;
    std::vector<Complex> grad(n), cand(n), cgrad(n), dir(n);
    double obj = engine.moment_and_gradient(a, grad);
    std::size_t accepted = 0;
    for (std::size_t it = 0; it < config.iterations; ++it) {
      for (std::size_t i = 0; i < n; ++i) {
        const double m = std::abs(grad[i]);
        dir[i] = (normalization == Normalization::L2 || m == 0.0)
                     ? grad[i]
                     : grad[i] * (std::pow(m, dual) / m);
      }
      if (!normalize(dir, p, normalization)) break;
      bool moved = false;
      for (double t = 1.0; t >= kMinStep; t *= 0.5) {
        for (std::size_t i = 0; i < n; ++i) cand[i] = a[i] + t * (dir[i] - a[i]);
        if (!normalize(cand, p, normalization)) continue;
        const double c_obj = engine.moment_and_gradient(cand, cgrad);
        if (c_obj >= obj) {
          moved = c_obj > obj * (1.0 + 1e-13);
          a.swap(cand);
          grad.swap(cgrad);
          obj = c_obj;
          ++accepted;
          break;
        }
      }
      if (!moved) break;
    }
    results[r] = Result{obj, accepted, std::move(a)};
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < total; ++r)
    if (results[r].objective > results[best].objective) best = r;

  KpProbeReport rep = base_report(engine, Probe::Ascent, normalization, config.seed);
  rep.restarts = total;
  rep.iterations = results[best].iterations;
  rep.witness = results[best].a;
  // Final figure from the engine's reporting path so that its error contract applies.
  std::tie(rep.bound, rep.error) = kp_ratio(engine, rep.witness, normalization);
  rep.wall_ms = elapsed_ms(t0);
  return rep;
}

}  // namespace lambda_lab
