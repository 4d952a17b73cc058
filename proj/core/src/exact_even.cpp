#include "lambda_lab/exact_even.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <unordered_map>

#include "lambda_lab/error.hpp"
#include "lambda_lab/parallel.hpp"

namespace lambda_lab {
namespace {

constexpr int kMaxDim = 6;
constexpr std::int64_t kTableLimit = std::int64_t{1} << 22;
constexpr double kMaxStoredEntries = 1.0e8;
constexpr std::size_t kGroupsPerBlock = 64;

using Key = std::array<std::int64_t, kMaxDim>;

struct KeyHash {
  std::size_t operator()(const Key& k) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (std::int64_t v : k) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h *= 0xff51afd7ed558ccdULL;
    }
    return static_cast<std::size_t>(h ^ (h >> 33));
  }
};

// ∫₀¹ e(u y) dy for u = r/D, r reduced into [0, 2D) for the phase.
Complex sinc_phase(double u_reduced, double u) {
  if (u == 0.0) return {1.0, 0.0};
  const double a = std::numbers::pi * u_reduced;
  const double s = std::sin(a);
  return Complex(std::cos(a), std::sin(a)) * (s / (std::numbers::pi * u));
}

}  // namespace

ExactEvenPlan::ExactEvenPlan(const FrequencySet& fset, int k, double budget)
    : n_(fset.size()), k_(k) {
  if (k < 1) throw InvalidArgument("exact-even: exponent 2k needs k >= 1");
  if (fset.empty()) throw InvalidArgument("exact-even: empty frequency set");
  const int d = fset.d();
  if (d > kMaxDim) throw InvalidArgument("exact-even: dimension above " + std::to_string(kMaxDim));
  if (n_ >= (std::size_t{1} << 31)) throw BudgetExceeded("exact-even: too many points", double(n_), budget);

  // Axis roles: integer axes select interacting groups, everything else goes
  // through the sinc kernel. Exact axes whose k-fold sums could overflow are
  // demoted to doubles.
  std::vector<bool> exact(static_cast<std::size_t>(d));
  std::vector<bool> grouping(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) {
    bool ex = fset.axis_exact(a);
    if (ex) {
      std::int64_t mx = 0;
      for (std::size_t i = 0; i < n_; ++i) mx = std::max(mx, std::abs(fset.numerator(i, a)));
      if (static_cast<double>(mx) * k >= 0x1.0p62) ex = false;
    }
    exact[static_cast<std::size_t>(a)] = ex;
    grouping[static_cast<std::size_t>(a)] = ex && fset.axis_denominator(a) == 1;
  }

  auto point_key = [&](std::size_t i) {
    Key key{};
    for (int a = 0; a < d; ++a) {
      if (exact[static_cast<std::size_t>(a)]) {
        key[static_cast<std::size_t>(a)] = fset.numerator(i, a);
      } else {
        key[static_cast<std::size_t>(a)] = std::bit_cast<std::int64_t>(fset.frequency(i)[a]);
      }
    }
    return key;
  };
  // Real-valued sums are carried alongside the keys; the key stores their bits.
  std::vector<Key> keys(n_);
  std::vector<double> real_sums(n_ * static_cast<std::size_t>(d), 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    keys[i] = point_key(i);
    for (int a = 0; a < d; ++a) real_sums[i * d + a] = fset.frequency(i)[a];
  }

  double work = 0.0, stored = 0.0;
  for (int j = 1; j < k; ++j) {
    const std::size_t prev = keys.size();
    work += static_cast<double>(prev) * static_cast<double>(n_);
    if (work > budget) throw BudgetExceeded("exact-even: convolution", work, budget);
    // Each stored triple costs 12 bytes plus its share of the hash index.
    stored += static_cast<double>(prev) * static_cast<double>(n_);
    if (stored > kMaxStoredEntries) throw BudgetExceeded("exact-even: stored entries", stored, kMaxStoredEntries);

    Level level;
    level.parent.reserve(prev * n_);
    level.point.reserve(prev * n_);
    level.target.reserve(prev * n_);
    std::unordered_map<Key, std::uint32_t, KeyHash> index;
    index.reserve(prev * std::min<std::size_t>(n_, 64));
    std::vector<Key> next_keys;
    std::vector<double> next_real;
    for (std::size_t e = 0; e < prev; ++e) {
      for (std::size_t s = 0; s < n_; ++s) {
        Key key{};
        std::array<double, kMaxDim> real{};
        for (int a = 0; a < d; ++a) {
          const auto ua = static_cast<std::size_t>(a);
          if (exact[ua]) {
            key[ua] = keys[e][ua] + fset.numerator(s, a);
          } else {
            real[ua] = real_sums[e * d + a] + fset.frequency(s)[a];
            key[ua] = std::bit_cast<std::int64_t>(real[ua]);
          }
        }
        auto [it, inserted] = index.try_emplace(key, static_cast<std::uint32_t>(next_keys.size()));
        if (inserted) {
          if (next_keys.size() >= (std::size_t{1} << 32) - 1)
            throw BudgetExceeded("exact-even: distinct sums", double(next_keys.size()), budget);
          next_keys.push_back(key);
          for (int a = 0; a < d; ++a) next_real.push_back(real[static_cast<std::size_t>(a)]);
        }
        level.parent.push_back(static_cast<std::uint32_t>(e));
        level.point.push_back(static_cast<std::uint32_t>(s));
        level.target.push_back(it->second);
      }
    }
    level.size = next_keys.size();
    levels_.push_back(std::move(level));
    keys = std::move(next_keys);
    real_sums = std::move(next_real);
  }
  terms_ = keys.size();

  // Group the top-level sums by their integer coordinates.
  order_.resize(terms_);
  std::iota(order_.begin(), order_.end(), 0u);
  auto group_less = [&](std::uint32_t x, std::uint32_t y) {
    for (int a = 0; a < d; ++a) {
      if (!grouping[static_cast<std::size_t>(a)]) continue;
      if (keys[x][a] != keys[y][a]) return keys[x][a] < keys[y][a];
    }
    return false;
  };
  std::stable_sort(order_.begin(), order_.end(), group_less);
  group_start_.push_back(0);
  for (std::size_t p = 1; p < terms_; ++p)
    if (group_less(order_[p - 1], order_[p])) group_start_.push_back(static_cast<std::uint32_t>(p));
  group_start_.push_back(static_cast<std::uint32_t>(terms_));

  for (int a = 0; a < d; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    if (grouping[ua]) continue;
    KernelAxis ax;
    ax.exact = exact[ua];
    ax.den = exact[ua] ? fset.axis_denominator(a) : 1;
    if (ax.exact && 2 * ax.den <= kTableLimit) {
      const std::int64_t period = 2 * ax.den;
      ax.table.resize(static_cast<std::size_t>(period));
      for (std::int64_t r = 0; r < period; ++r) {
        const double ang = std::numbers::pi * static_cast<double>(r) / static_cast<double>(ax.den);
        ax.table[static_cast<std::size_t>(r)] = Complex(std::cos(ang), std::sin(ang)) * std::sin(ang);
      }
    }
    kaxes_.push_back(std::move(ax));
  }
  const std::size_t nk = kaxes_.size();
  std::size_t n_exact = 0, n_real = 0;
  for (const auto& ax : kaxes_) (ax.exact ? n_exact : n_real)++;
  n_kexact_ = n_exact;
  n_kreal_ = n_real;
  knum_.resize(terms_ * n_exact);
  kreal_.resize(terms_ * n_real);
  for (std::size_t p = 0; p < terms_; ++p) {
    const std::uint32_t e = order_[p];
    std::size_t ie = 0, ir = 0;
    for (int a = 0; a < d; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      if (grouping[ua]) continue;
      if (exact[ua]) {
        knum_[p * n_exact + ie++] = keys[e][ua];
      } else {
        kreal_[p * n_real + ir++] = real_sums[e * d + a];
      }
    }
  }

  double pairs = 0.0;
  for (std::size_t g = 0; g + 1 < group_start_.size(); ++g) {
    const double sz = group_start_[g + 1] - group_start_[g];
    pairs += sz * sz;
  }
  work += static_cast<double>(nk == 0 ? terms_ : pairs * static_cast<double>(nk));
  if (work > budget) throw BudgetExceeded("exact-even: kernel pairs", work, budget);
  work_ = work;
}

Complex ExactEvenPlan::kernel(std::size_t pi, std::size_t pj) const {
  Complex out{1.0, 0.0};
  const std::size_t n_exact = n_kexact_, n_real = n_kreal_;
  std::size_t ie = 0, ir = 0;
  for (const auto& ax : kaxes_) {
    if (ax.exact) {
      const std::int64_t delta = knum_[pj * n_exact + ie] - knum_[pi * n_exact + ie];
      ++ie;
      if (delta == 0) continue;
      const std::int64_t period = 2 * ax.den;
      std::int64_t r = delta % period;
      if (r < 0) r += period;
      if (!ax.table.empty()) {
        out *= ax.table[static_cast<std::size_t>(r)] *
               (static_cast<double>(ax.den) / (std::numbers::pi * static_cast<double>(delta)));
      } else {
        const double dd = static_cast<double>(ax.den);
        out *= sinc_phase(static_cast<double>(r) / dd, static_cast<double>(delta) / dd);
      }
    } else {
      const double u = kreal_[pj * n_real + ir] - kreal_[pi * n_real + ir];
      ++ir;
      out *= sinc_phase(std::fmod(u, 2.0), u);
    }
  }
  return out;
}

void ExactEvenPlan::expand(std::span<const Complex> a, std::vector<Complex>& top,
                           std::vector<Complex>& below) const {
  top.assign(a.begin(), a.end());
  below.clear();
  for (const Level& level : levels_) {
    below.swap(top);
    top.assign(level.size, Complex{});
    for (std::size_t t = 0; t < level.parent.size(); ++t)
      top[level.target[t]] += below[level.parent[t]] * a[level.point[t]];
  }
}

double ExactEvenPlan::interact(const std::vector<Complex>& c, std::vector<Complex>* h) const {
  // h is indexed by entry id; partial moments are reduced in block order.
  const std::size_t groups = group_start_.size() - 1;
  const std::size_t blocks = (groups + kGroupsPerBlock - 1) / kGroupsPerBlock;
  std::vector<Complex> partial(blocks);
  if (h) h->assign(terms_, Complex{});
  parallel_for(blocks, [&](std::size_t b) {
    Complex acc{};
    const std::size_t g_end = std::min(groups, (b + 1) * kGroupsPerBlock);
    for (std::size_t g = b * kGroupsPerBlock; g < g_end; ++g) {
      const std::size_t lo = group_start_[g], hi = group_start_[g + 1];
      for (std::size_t pi = lo; pi < hi; ++pi) {
        Complex hv{};
        if (kaxes_.empty()) {
          hv = c[order_[pi]];
        } else {
          for (std::size_t pj = lo; pj < hi; ++pj) hv += c[order_[pj]] * kernel(pi, pj);
        }
        acc += std::conj(c[order_[pi]]) * hv;
        if (h) (*h)[order_[pi]] = hv;
      }
    }
    partial[b] = acc;
  });
  Complex total{};
  for (const Complex& p : partial) total += p;
  const double re = total.real();
  if (std::abs(total.imag()) > 1e-9 * std::max(1.0, std::abs(re)))
    throw std::logic_error("exact-even: imaginary residue " + std::to_string(total.imag()));
  return re;
}

double ExactEvenPlan::moment(std::span<const Complex> a) const {
  if (a.size() != n_) throw InvalidArgument("exact-even: coefficient length mismatch");
  std::vector<Complex> top, below;
  expand(a, top, below);
  return interact(top, nullptr);
}

double ExactEvenPlan::moment_and_gradient(std::span<const Complex> a,
                                          std::span<Complex> grad) const {
  if (a.size() != n_ || grad.size() != n_)
    throw InvalidArgument("exact-even: coefficient length mismatch");
  std::vector<Complex> top, below;
  expand(a, top, below);
  std::vector<Complex> h;
  const double m = interact(top, &h);
  std::fill(grad.begin(), grad.end(), Complex{});
  if (levels_.empty()) {
    std::copy(h.begin(), h.end(), grad.begin());
  } else {
    const Level& last = levels_.back();
    for (std::size_t t = 0; t < last.parent.size(); ++t)
      grad[last.point[t]] += std::conj(below[last.parent[t]]) * h[last.target[t]];
  }
  return m;
}

std::uint64_t count_energy(std::span<const std::int64_t> points, std::size_t dim, int k,
                           double budget) {
  if (k < 1) throw InvalidArgument("count_energy: k must be >= 1");
  if (dim == 0 || dim > static_cast<std::size_t>(kMaxDim) || points.size() % dim != 0)
    throw InvalidArgument("count_energy: bad point layout");
  const std::size_t n = points.size() / dim;
  if (n == 0) return 0;
  const double tuples = std::pow(static_cast<double>(n), k);
  if (tuples > budget) throw BudgetExceeded("count_energy: k-fold sums", tuples, budget);

  // Every ordered k-tuple contributes one to the multiplicity of its sum.
  std::unordered_map<Key, std::uint64_t, KeyHash> mult;
  mult.reserve(static_cast<std::size_t>(std::min(tuples, 1e8)));
  std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
  for (;;) {
    Key key{};
    for (std::size_t t : idx)
      for (std::size_t a = 0; a < dim; ++a) key[a] += points[t * dim + a];
    ++mult[key];
    std::size_t pos = 0;
    while (pos < idx.size() && ++idx[pos] == n) idx[pos++] = 0;
    if (pos == idx.size()) break;
  }
  std::uint64_t total = 0;
  for (const auto& [key, r] : mult) total += r * r;
  return total;
}

}  // namespace lambda_lab
