#include "lambda_lab/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lambda_lab/error.hpp"
#include "lambda_lab/parallel.hpp"
#include "lambda_lab/rng.hpp"

namespace lambda_lab {
namespace {

constexpr std::size_t kBlock = 4096;
constexpr std::uint64_t kSampleTag = 0x6d6f6e7465ULL;

struct Welford {
  double n = 0.0, mean = 0.0, m2 = 0.0;

  void add(double x) {
    n += 1.0;
    const double delta = x - mean;
    mean += delta / n;
    m2 += delta * (x - mean);
  }
  void merge(const Welford& o) {
    if (o.n == 0.0) return;
    const double total = n + o.n;
    const double delta = o.mean - mean;
    mean += delta * o.n / total;
    m2 += o.m2 + delta * delta * n * o.n / total;
    n = total;
  }
};

Complex unit(double turns) {
  const double t = turns - std::floor(turns);
  return std::polar(1.0, 2.0 * std::numbers::pi * t);
}

}  // namespace

MonteCarloEngine::MonteCarloEngine(const FrequencySet& fset) : n_(fset.size()), d_(fset.d()) {
  if (fset.empty()) throw InvalidArgument("monte-carlo: empty frequency set");
  const auto d = static_cast<std::size_t>(d_);
  axes_.resize(d);
  lo_idx_.assign(n_ * d, 0);
  hi_idx_.assign(n_ * d, 0);
  real_.assign(n_ * d, 0.0);
  for (int a = 0; a < d_; ++a) {
    Axis& ax = axes_[static_cast<std::size_t>(a)];
    ax.exact = fset.axis_exact(a);
    if (ax.exact) {
      std::int64_t mn = fset.numerator(0, a), mx = mn;
      for (std::size_t i = 1; i < n_; ++i) {
        mn = std::min(mn, fset.numerator(i, a));
        mx = std::max(mx, fset.numerator(i, a));
      }
      const double range = static_cast<double>(mx) - static_cast<double>(mn);
      if (range > 1e12) ax.exact = false;  // tables would be too large
      if (ax.exact) {
        ax.den = fset.axis_denominator(a);
        ax.base = mn;
        ax.step = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(std::sqrt(range + 1.0))));
        const std::int64_t span = mx - mn;
        ax.hi_size = static_cast<std::size_t>(span / ax.step + 1);
        for (std::size_t i = 0; i < n_; ++i) {
          const std::int64_t off = fset.numerator(i, a) - mn;
          lo_idx_[i * d + a] = static_cast<std::uint32_t>(off % ax.step);
          hi_idx_[i * d + a] = static_cast<std::uint32_t>(off / ax.step);
        }
      }
    }
    for (std::size_t i = 0; i < n_; ++i) real_[i * d + a] = fset.frequency(i)[a];
  }
}

void MonteCarloEngine::sample_point(std::uint64_t seed, std::uint64_t index,
                                    std::span<double> y) const {
  for (int a = 0; a < d_; ++a)
    y[static_cast<std::size_t>(a)] = counter_uniform(seed, kSampleTag, index, static_cast<std::uint64_t>(a));
}

MonteCarloEstimate MonteCarloEngine::moment(std::span<const Complex> a, double p,
                                            std::size_t samples, std::uint64_t seed) const {
  if (a.size() != n_) throw InvalidArgument("monte-carlo: coefficient length mismatch");
  if (!(p >= 2.0)) throw InvalidArgument("monte-carlo: p must be >= 2");
  if (samples < 2) throw InvalidArgument("monte-carlo: need at least 2 samples");
  const auto d = static_cast<std::size_t>(d_);
  const std::size_t blocks = (samples + kBlock - 1) / kBlock;
  std::vector<Welford> stats(blocks);

  parallel_for(blocks, [&](std::size_t b) {
    std::vector<double> y(d);
    std::vector<std::vector<Complex>> lo(d), hi(d);
    Welford w;
    const std::size_t end = std::min(samples, (b + 1) * kBlock);
    for (std::size_t s = b * kBlock; s < end; ++s) {
      sample_point(seed, s, y);
      // Exact axes: e((num-base)·y/den) = z^lo·Z^hi from two small tables; the
      // dropped factor e(base·y/den) is common to all points.
      for (std::size_t ax = 0; ax < d; ++ax) {
        const Axis& A = axes_[ax];
        if (!A.exact) continue;
        const double t = y[ax] / static_cast<double>(A.den);
        const Complex z = unit(t);
        const Complex big = unit(t * static_cast<double>(A.step));
        lo[ax].resize(static_cast<std::size_t>(A.step));
        hi[ax].resize(A.hi_size);
        lo[ax][0] = hi[ax][0] = 1.0;
        for (std::size_t r = 1; r < lo[ax].size(); ++r)
          lo[ax][r] = (r % 64 == 0) ? unit(t * static_cast<double>(r)) : lo[ax][r - 1] * z;
        for (std::size_t q = 1; q < hi[ax].size(); ++q)
          hi[ax][q] = (q % 64 == 0) ? unit(t * static_cast<double>(A.step) * static_cast<double>(q))
                                    : hi[ax][q - 1] * big;
      }
      Complex f{};
      for (std::size_t i = 0; i < n_; ++i) {
        Complex e{1.0, 0.0};
        double turns = 0.0;
        for (std::size_t ax = 0; ax < d; ++ax) {
          if (axes_[ax].exact) {
            e *= lo[ax][lo_idx_[i * d + ax]] * hi[ax][hi_idx_[i * d + ax]];
          } else {
            turns += real_[i * d + ax] * y[ax];
          }
        }
        if (turns != 0.0) e *= unit(turns);
        f += a[i] * e;
      }
      const double n2 = std::norm(f);
      w.add(std::pow(n2, 0.5 * p));
    }
    stats[b] = w;
  });

  Welford total;
  for (const Welford& w : stats) total.merge(w);
  MonteCarloEstimate out;
  out.samples = samples;
  out.mean = total.mean;
  out.std_error = std::sqrt(total.m2 / (total.n - 1.0) / total.n);
  return out;
}

}  // namespace lambda_lab
