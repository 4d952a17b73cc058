#include "lambda_lab/diagnose.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lambda_lab/error.hpp"
#include "lambda_lab/parallel.hpp"
#include "lambda_lab/partition.hpp"

namespace lambda_lab {

ScalingFit scaling_regression(std::span<const std::pair<double, double>> pairs) {
  if (pairs.size() < 3) throw InvalidArgument("scaling regression needs at least 3 pairs");
  ScalingFit fit;
  fit.pairs.assign(pairs.begin(), pairs.end());
  const auto n = static_cast<double>(pairs.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [r, v] : pairs) {
    if (!(r > 0.0) || !(v > 0.0)) throw InvalidArgument("scaling regression needs positive values");
    mx += std::log(r);
    my += std::log(v);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [r, v] : pairs) {
    const double dx = std::log(r) - mx, dy = std::log(v) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw InvalidArgument("scaling regression needs at least two distinct R");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  const double ssr = std::max(0.0, syy - fit.slope * sxy);
  fit.halfwidth = 2.0 * std::sqrt(ssr / (n - 2.0) / sxx);
  fit.r2 = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  return fit;
}

InterferenceResult interference_lower(const FrequencySet& fset, std::span<const std::size_t> members,
                                      std::size_t per_axis) {
  if (members.empty()) throw InvalidArgument("interference_lower: empty selection");
  if (per_axis < 1) throw InvalidArgument("interference_lower: need at least one sample per axis");
  const int d = fset.d();
  const auto ud = static_cast<std::size_t>(d);
  const Box box = enclosing_box(fset, members);
  const double R = static_cast<double>(fset.R());

  InterferenceResult res;
  res.analytic_floor = std::cos(2.0 * std::numbers::pi / 100.0);
  // In y = x/R the admissible region is |y_i| <= 1/(100·d·l_i), intersected with [0,1].
  std::vector<double> ymax(ud);
  for (std::size_t a = 0; a < ud; ++a) {
    ymax[a] = std::min(1.0, 1.0 / (100.0 * d * box.halfwidths[a]));
    if (!(ymax[a] > 0.0) || !std::isfinite(ymax[a]))
      throw InvalidArgument("interference_lower: degenerate polar region");
    res.region.push_back(ymax[a] * R);
  }

  std::size_t total = 1;
  for (std::size_t a = 0; a < ud; ++a) total *= per_axis;
  res.samples = total;
  std::vector<double> ratios(total);
  parallel_for(total, [&](std::size_t t) {
    std::vector<double> y(ud);
    std::size_t rest = t;
    for (std::size_t a = ud; a-- > 0;) {
      const std::size_t k = rest % per_axis;
      rest /= per_axis;
      y[a] = per_axis == 1 ? 0.0 : ymax[a] * static_cast<double>(k) / static_cast<double>(per_axis - 1);
    }
    Complex f{};
    for (std::size_t i : members) {
      const auto s = fset.frequency(i);
      // Phases relative to the box centre; the common factor does not change |F|.
      double turns = 0.0;
      for (std::size_t a = 0; a < ud; ++a) turns += (s[a] - box.center[a]) * y[a];
      f += std::polar(1.0, 2.0 * std::numbers::pi * turns);
    }
    ratios[t] = std::abs(f) / static_cast<double>(members.size());
  });
  res.min_ratio = *std::min_element(ratios.begin(), ratios.end());
  return res;
}

NecessityResult necessity_probe(const FrequencySet& fset, double p, double beta, const NormConfig& norm) {
  if (fset.empty()) throw InvalidArgument("necessity_probe: empty frequency set");
  const CapPartition caps = cap_partition(fset, beta);
  const Cap& cap = caps.caps[caps.densest()];
  // Frequencies outside the cap carry zero coefficients, so the norm only sees the cap.
  const FrequencySet sub = fset.subset(cap.members, fset.provenance());
  const Coefficients a = Coefficients::constant(sub.size());
  const NormReport rep = NormEngine(sub, p, norm).report(a.values);
  NecessityResult res;
  res.R = static_cast<double>(fset.R());
  res.p = p;
  res.beta = beta;
  res.cap_size = cap.members.size();
  res.moment = rep.moment;
  const double scale = std::pow(static_cast<double>(cap.members.size()), 0.5 * p);
  res.ratio = rep.moment / scale;
  res.ratio_error = rep.moment_error / scale;
  res.method = rep.method;
  return res;
}

BallCounts ball_counts(const FrequencySet& fset, std::span<const double> radii) {
  if (fset.empty()) throw InvalidArgument("ball_counts: empty frequency set");
  if (radii.empty()) throw InvalidArgument("ball_counts: no radii");
  for (double r : radii)
    if (!(r > 0.0)) throw InvalidArgument("ball_counts: radii must be positive");
  const std::size_t n = fset.size();
  const auto ud = static_cast<std::size_t>(fset.d());
  const double inv_r = 1.0 / static_cast<double>(fset.R());
  std::vector<double> r2(radii.size());
  for (std::size_t k = 0; k < radii.size(); ++k) r2[k] = radii[k] * radii[k];

  constexpr std::size_t kBlock = 64;
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<std::vector<std::size_t>> best(blocks, std::vector<std::size_t>(radii.size(), 0));
  parallel_for(blocks, [&](std::size_t b) {
    std::vector<std::size_t> counts(radii.size());
    const std::size_t end = std::min(n, (b + 1) * kBlock);
    for (std::size_t c = b * kBlock; c < end; ++c) {
      std::fill(counts.begin(), counts.end(), 0);
      const auto sc = fset.frequency(c);
      for (std::size_t j = 0; j < n; ++j) {
        const auto sj = fset.frequency(j);
        double dist2 = 0.0;
        for (std::size_t a = 0; a < ud; ++a) {
          const double diff = (sj[a] - sc[a]) * inv_r;
          dist2 += diff * diff;
        }
        for (std::size_t k = 0; k < r2.size(); ++k)
          if (dist2 <= r2[k]) ++counts[k];
      }
      for (std::size_t k = 0; k < r2.size(); ++k) best[b][k] = std::max(best[b][k], counts[k]);
    }
  });

  BallCounts out;
  out.radii.assign(radii.begin(), radii.end());
  out.max_fraction.assign(radii.size(), 0.0);
  for (const auto& row : best)
    for (std::size_t k = 0; k < radii.size(); ++k)
      out.max_fraction[k] = std::max(out.max_fraction[k], static_cast<double>(row[k]) / static_cast<double>(n));
  std::vector<std::pair<double, double>> pairs;
  for (std::size_t k = 0; k < radii.size(); ++k) pairs.emplace_back(out.radii[k], out.max_fraction[k]);
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end(),
                          [](const auto& x, const auto& y) { return x.first == y.first; }),
              pairs.end());
  if (pairs.size() >= 3) {
    const ScalingFit fit = scaling_regression(pairs);
    out.alpha = fit.slope;
    out.alpha_halfwidth = fit.halfwidth;
  }
  return out;
}

CapEquidistribution cap_equidistribution(const FrequencySet& fset, double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw InvalidArgument("cap_equidistribution: Δ must lie in (0, 1]");
  if (fset.empty()) throw InvalidArgument("cap_equidistribution: empty frequency set");
  CapEquidistribution res;
  res.delta = delta;
  res.cells_per_axis = std::max<std::int64_t>(1, std::llround(1.0 / delta));
  const CapPartition part = cap_grid(fset, res.cells_per_axis);
  res.predicted = static_cast<double>(fset.size()) *
                  std::pow(1.0 / static_cast<double>(res.cells_per_axis), fset.m());
  for (const Cap& c : part.caps) res.counts.push_back(c.members.size());
  std::vector<std::size_t> sorted = res.counts;
  std::sort(sorted.begin(), sorted.end());
  res.min = static_cast<double>(sorted.front());
  res.max = static_cast<double>(sorted.back());
  const std::size_t k = sorted.size();
  res.median = k % 2 ? static_cast<double>(sorted[k / 2])
                     : 0.5 * static_cast<double>(sorted[k / 2 - 1] + sorted[k / 2]);
  double mean = 0.0, var = 0.0;
  for (std::size_t c : sorted) mean += static_cast<double>(c);
  mean /= static_cast<double>(k);
  for (std::size_t c : sorted) var += (static_cast<double>(c) - mean) * (static_cast<double>(c) - mean);
  var /= static_cast<double>(k);
  res.dispersion = mean > 0.0 ? std::sqrt(var) / mean : 0.0;
  return res;
}

}  // namespace lambda_lab
