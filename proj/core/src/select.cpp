#include "lambda_lab/select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lambda_lab/error.hpp"
#include "lambda_lab/parallel.hpp"
#include "lambda_lab/rng.hpp"

namespace lambda_lab {
namespace {

constexpr std::uint64_t kDrawTag = 0x42455231ULL;
constexpr std::uint64_t kMemberTag = 0x4d454d42ULL;
constexpr std::uint64_t kTrialTag = 0x5452494cULL;

double nearest_rank(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
  return v[std::min(v.size() - 1, rank == 0 ? 0 : rank - 1)];
}

}  // namespace

double selection_density(double M, double kq, double q, double p) {
  if (!(q >= 2.0) || !(p >= q)) throw InvalidArgument("selection density needs 2 <= q <= p");
  if (!(kq >= 1.0)) throw InvalidArgument("K_q below 1 is impossible for an orthonormal system");
  if (!(M >= 1.0)) throw InvalidArgument("selection density needs M >= 1");
  const double delta = std::pow(kq, -2.0 * q / p) * std::pow(M, q / p - 1.0);
  return std::min(1.0, delta);
}

SelectionPlan make_selection_plan(std::size_t M, double kq, double q, double p,
                                  std::uint64_t seed, std::size_t retries,
                                  std::optional<double> kappa) {
  SelectionPlan plan;
  plan.M = M;
  plan.q = q;
  plan.p = p;
  plan.kq = kq;
  plan.delta = selection_density(static_cast<double>(M), kq, q, p);
  plan.target = static_cast<double>(M) * plan.delta;
  plan.seed = seed;
  plan.retry_budget = retries;
  plan.kappa = kappa;
  return plan;
}

std::pair<double, double> size_window(double M, double delta) {
  return {0.5 * M * delta, 1.5 * M * delta};
}

bool in_window(std::size_t size, double M, double delta) {
  const auto [lo, hi] = size_window(M, delta);
  const auto s = static_cast<double>(size);
  return s >= lo && s <= hi;
}

std::vector<std::size_t> bernoulli_draw(std::size_t M, double delta, std::uint64_t seed,
                                        std::uint64_t draw) {
  std::vector<std::size_t> out;
  if (delta >= 1.0) {
    out.resize(M);
    for (std::size_t i = 0; i < M; ++i) out[i] = i;
    return out;
  }
  out.reserve(static_cast<std::size_t>(1.5 * static_cast<double>(M) * delta) + 16);
  for (std::size_t i = 0; i < M; ++i)
    if (counter_uniform(seed, kDrawTag, draw, i) < delta) out.push_back(i);
  return out;
}

Selection bernoulli_indices(std::size_t M, double delta, std::uint64_t seed, std::size_t retries) {
  if (!(delta > 0.0 && delta <= 1.0)) throw InvalidArgument("selection density must lie in (0, 1]");
  if (static_cast<double>(M) * delta < 1.0) throw InvalidArgument("selection needs M·δ >= 1");
  Selection sel;
  for (std::size_t draw = 0; draw <= retries; ++draw) {
    auto idx = bernoulli_draw(M, delta, seed, draw);
    sel.size_history.push_back(idx.size());
    if (in_window(idx.size(), static_cast<double>(M), delta)) {
      sel.indices = std::move(idx);
      sel.draw = draw;
      return sel;
    }
  }
  const auto [lo, hi] = size_window(static_cast<double>(M), delta);
  throw RetryExhausted("bernoulli selection stayed outside [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "] after " + std::to_string(retries) + " retries",
                       sel.size_history);
}

FrequencySet bernoulli_select(const FrequencySet& fset, double delta, std::uint64_t seed,
                              std::size_t retries) {
  const Selection sel = bernoulli_indices(fset.size(), delta, seed, retries);
  Provenance prov = fset.provenance();
  prov.method = "bernoulli";
  prov.seed = seed;
  prov.params = {{"parent", fset.provenance().method},
                 {"delta", delta},
                 {"draw", sel.draw},
                 {"size_history", sel.size_history}};
  return fset.subset(sel.indices, prov);
}

FamilySelection family_select(const FrequencySet& fset,
                              const std::vector<std::vector<std::size_t>>& family, double p,
                              std::uint64_t seed, const FamilyValidator& validator,
                              std::size_t retries) {
  if (family.empty()) throw InvalidArgument("family_select: empty family");
  const std::size_t N = family.front().size();
  for (const auto& member : family)
    if (member.size() != N) throw InvalidArgument("family_select: member sizes differ");
  if (N < 2) throw InvalidArgument("family_select: members need at least 2 points");
  if (static_cast<double>(family.size()) > static_cast<double>(N) * static_cast<double>(N))
    throw InvalidArgument("family_select: more than N² members");
  if (!(p >= 2.0)) throw InvalidArgument("family_select: p must be >= 2");

  const std::size_t M = fset.size();
  FamilySelection best;
  best.member_size = N;
  best.delta = std::min(1.0, std::pow(static_cast<double>(N), 2.0 / p - 1.0));
  best.threshold = validator.C * std::log(static_cast<double>(N));
  best.worst = std::numeric_limits<double>::infinity();
  const bool validate = p > 2.0;

  KpConfig probes;
  probes.probes = {Probe::Constant, Probe::Random};
  probes.random_trials = validator.random_probes;
  probes.norm = validator.norm;
  if (p == 4.0) probes.norm.method = NormMethod::ExactEven;

  std::vector<std::size_t> history;
  std::pair<int, double> best_rank{2, 0.0};
  for (std::size_t draw = 0; draw <= retries; ++draw) {
    std::vector<std::size_t> g = bernoulli_draw(M, best.delta, seed, draw);
    history.push_back(g.size());
    const bool sized = in_window(g.size(), static_cast<double>(M), best.delta);

    std::vector<char> chosen(M, 0);
    for (std::size_t i : g) chosen[i] = 1;
    std::vector<MemberProbe> table(family.size());
    parallel_for(family.size(), [&](std::size_t s) {
      std::vector<std::size_t> inter;
      for (std::size_t i : family[s])
        if (chosen[i]) inter.push_back(i);
      MemberProbe row;
      row.member = s;
      row.size = inter.size();
      if (validate && !inter.empty()) {
        KpConfig cfg = probes;
        cfg.seed = derive_seed(seed, kMemberTag ^ draw, s);
        const FrequencySet sub = fset.subset(inter, fset.provenance());
        for (const KpProbeReport& r : estimate_kp(sub, p, cfg)) {
          row.bound = std::max(row.bound, r.bound);
          row.method = r.method;
        }
      } else if (!inter.empty()) {
        row.bound = 1.0;
      }
      table[s] = row;
    });
    double worst = 0.0;
    for (const MemberProbe& row : table) worst = std::max(worst, row.bound);

    const bool ok = sized && (!validate || worst <= best.threshold);
    // Keep the first passing draw, otherwise prefer sized draws, then the smallest worst bound.
    const std::pair<int, double> rank{sized ? 0 : 1, worst};
    if (ok || draw == 0 || rank < best_rank) {
      best_rank = rank;
      best.indices = std::move(g);
      best.accepted_draw = draw;
      best.worst = worst;
      best.table = std::move(table);
      best.success = ok;
    }
    if (ok) break;
  }
  best.draws = history.size();
  best.size_history = std::move(history);
  return best;
}

ConcentrationResult concentration_experiment(std::size_t M, double delta, std::size_t trials,
                                             std::uint64_t seed) {
  if (trials < 1) throw InvalidArgument("concentration experiment needs at least one trial");
  if (!(delta > 0.0 && delta <= 1.0)) throw InvalidArgument("selection density must lie in (0, 1]");
  ConcentrationResult res;
  res.M = M;
  res.delta = delta;
  res.seed = seed;
  res.sizes.resize(trials);
  constexpr std::size_t kBlock = 256;
  parallel_for((trials + kBlock - 1) / kBlock, [&](std::size_t b) {
    const std::size_t end = std::min(trials, (b + 1) * kBlock);
    for (std::size_t t = b * kBlock; t < end; ++t) {
      std::size_t count = 0;
      if (delta >= 1.0) {
        count = M;
      } else {
        for (std::size_t i = 0; i < M; ++i)
          if (counter_uniform(seed, kDrawTag, t, i) < delta) ++count;
      }
      res.sizes[t] = count;
    }
  });
  std::size_t inside = 0;
  res.inside.resize(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    res.inside[t] = in_window(res.sizes[t], static_cast<double>(M), delta);
    inside += res.inside[t] ? 1 : 0;
  }
  res.inside_fraction = static_cast<double>(inside) / static_cast<double>(trials);
  std::vector<std::size_t> sorted = res.sizes;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    if (i + 1 == sorted.size() || sorted[i + 1] != sorted[i])
      res.cdf.emplace_back(static_cast<double>(sorted[i]),
                           static_cast<double>(i + 1) / static_cast<double>(trials));
  return res;
}

TailExperiment kp_tail_experiment(const FrequencySet& fset, double q, double p,
                                  std::size_t trials, std::uint64_t seed, const KpConfig& probes,
                                  std::optional<double> kq) {
  if (trials < 30) throw InvalidArgument("tail experiment needs at least 30 trials");
  if (!(p > q)) throw InvalidArgument("tail experiment needs p > q");
  double k = 1.0;
  if (kq) {
    k = *kq;
  } else if (q != 2.0) {
    KpConfig cfg = probes;
    cfg.probes = {Probe::Constant, Probe::Random};
    cfg.seed = derive_seed(seed, kTrialTag, ~std::uint64_t{0});
    for (const KpProbeReport& r : estimate_kp(fset, q, cfg)) k = std::max(k, r.bound);
  }
  TailExperiment ex;
  ex.plan = make_selection_plan(fset.size(), k, q, p, seed);
  ex.trials.resize(trials);

  parallel_for(trials, [&](std::size_t t) {
    TailTrial row;
    row.trial = t;
    row.seed = derive_seed(seed, kTrialTag, t);
    const auto idx = bernoulli_draw(fset.size(), ex.plan.delta, row.seed, 0);
    row.size = idx.size();
    row.accepted = in_window(idx.size(), static_cast<double>(fset.size()), ex.plan.delta);
    if (!idx.empty()) {
      KpConfig cfg = probes;
      cfg.seed = row.seed;
      const FrequencySet sub = fset.subset(idx, fset.provenance());
      for (const KpProbeReport& r : estimate_kp(sub, p, cfg)) row.probe_max = std::max(row.probe_max, r.bound);
    }
    ex.trials[t] = row;
  });

  std::vector<double> values;
  values.reserve(trials);
  for (const TailTrial& row : ex.trials) values.push_back(row.probe_max);
  ex.min = *std::min_element(values.begin(), values.end());
  ex.max = *std::max_element(values.begin(), values.end());
  ex.median = nearest_rank(values, 0.5);
  ex.p95 = nearest_rank(values, 0.95);

  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(trials);
  for (std::size_t i = 0; i < sorted.size(); ++i)
    if (i == 0 || sorted[i] != sorted[i - 1])
      ex.exceedance.emplace_back(sorted[i], (n - static_cast<double>(i)) / n);

  // ln(fraction) against u²; a single distinct value gives a flat step.
  double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
  for (const auto& [u, frac] : ex.exceedance) {
    const double x = u * u, y = std::log(frac);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    m += 1.0;
  }
  const double den = m * sxx - sx * sx;
  ex.tail_slope = (m >= 2.0 && den > 0.0) ? (m * sxy - sx * sy) / den : 0.0;
  return ex;
}

}  // namespace lambda_lab
