#include "lambda_lab/frequency_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "lambda_lab/error.hpp"

namespace lambda_lab {

__extension__ typedef __int128 i128;

namespace {

constexpr std::int64_t kDenominatorLimit = std::int64_t{1} << 53;

}  // namespace

FrequencySet::FrequencySet(ManifoldSpec spec, std::int64_t R, std::vector<std::int64_t> lattice,
                           Provenance provenance)
    : spec_(spec), R_(R), lattice_(std::move(lattice)), provenance_(std::move(provenance)) {
  if (R_ < 1) throw InvalidArgument("scale R must be a positive integer");
  const auto m = static_cast<std::size_t>(spec_.m());
  const auto d = static_cast<std::size_t>(spec_.d());
  if (lattice_.size() % m != 0) throw InvalidArgument("lattice data is not a multiple of m");
  size_ = lattice_.size() / m;

  // Distinct base vectors keep the system orthonormal.
  std::vector<std::size_t> order(size_);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto row_less = [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(lattice_.begin() + static_cast<std::ptrdiff_t>(a * m),
                                        lattice_.begin() + static_cast<std::ptrdiff_t>((a + 1) * m),
                                        lattice_.begin() + static_cast<std::ptrdiff_t>(b * m),
                                        lattice_.begin() + static_cast<std::ptrdiff_t>((b + 1) * m));
  };
  std::sort(order.begin(), order.end(), row_less);
  for (std::size_t i = 1; i < size_; ++i)
    if (!row_less(order[i - 1], order[i]))
      throw InvalidArgument("duplicate lattice vector in frequency set");

  axis_exact_.assign(d, true);
  axis_den_.assign(d, 1);
  const int tails = spec_.tail_dim();
  if (tails > 0) {
    for (int j = 0; j < tails; ++j) {
      const auto axis = m + static_cast<std::size_t>(j);
      if (!spec_.polynomial()) {
        axis_exact_[axis] = false;
        continue;
      }
      i128 den = 1;
      for (int e = 0; e < spec_.tail_denominator_exponent(j); ++e) {
        den *= R_;
        if (den > kDenominatorLimit) break;
      }
      if (den > kDenominatorLimit) {
        axis_exact_[axis] = false;
      } else {
        axis_den_[axis] = static_cast<std::int64_t>(den);
      }
    }
  }

  coords_.resize(size_ * d);
  numerators_.assign(size_ * d, 0);
  std::vector<double> eta(m);
  std::vector<double> tail(static_cast<std::size_t>(tails));
  for (std::size_t i = 0; i < size_; ++i) {
    auto n = this->lattice(i);
    if (!spec_.contains(n, R_))
      throw InvalidArgument("lattice vector outside the manifold's base domain");
    for (std::size_t a = 0; a < m; ++a) {
      coords_[i * d + a] = static_cast<double>(n[a]);
      numerators_[i * d + a] = n[a];
      eta[a] = static_cast<double>(n[a]) / static_cast<double>(R_);
    }
    if (tails == 0) continue;
    spec_.tail(eta, tail);
    for (int j = 0; j < tails; ++j) {
      const std::size_t axis = m + static_cast<std::size_t>(j);
      double value = static_cast<double>(R_) * tail[static_cast<std::size_t>(j)];
      if (axis_exact_[axis]) {
        auto num = spec_.exact_tail_numerator(n, j);
        if (!num) {
          axis_exact_[axis] = false;
        } else {
          numerators_[i * d + axis] = *num;
          value = static_cast<double>(static_cast<long double>(*num) /
                                      static_cast<long double>(axis_den_[axis]));
        }
      }
      if (!std::isfinite(value)) throw InvalidArgument("tail evaluation is not finite");
      coords_[i * d + axis] = value;
    }
  }
}

FrequencySet FrequencySet::subset(std::span<const std::size_t> indices,
                                  Provenance provenance) const {
  const auto m = static_cast<std::size_t>(spec_.m());
  std::vector<std::int64_t> lat;
  lat.reserve(indices.size() * m);
  for (std::size_t idx : indices) {
    if (idx >= size_) throw InvalidArgument("subset index out of range");
    auto n = lattice(idx);
    lat.insert(lat.end(), n.begin(), n.end());
  }
  return FrequencySet(spec_, R_, std::move(lat), std::move(provenance));
}

FrequencySet full_grid(const ManifoldSpec& spec, std::int64_t R) {
  if (R < 2) throw InvalidArgument("full grid requires R >= 2");
  const int m = spec.m();
  const BaseDomain dom = spec.domain();
  const double r = static_cast<double>(R);
  const auto lo = static_cast<std::int64_t>(std::max(0.0, std::ceil(dom.lo * r - 1e-9)));
  const auto hi = std::min<std::int64_t>(R, static_cast<std::int64_t>(std::ceil(dom.hi * r - 1e-9)));
  if (hi <= lo) throw InvalidArgument("domain contains no lattice points at this scale");

  double count = 1.0;
  for (int a = 0; a < m; ++a) count *= static_cast<double>(hi - lo);
  if (count > 5e7) throw InvalidArgument("full grid too large");

  std::vector<std::int64_t> lat;
  lat.reserve(static_cast<std::size_t>(count) * static_cast<std::size_t>(m));
  std::vector<std::int64_t> n(static_cast<std::size_t>(m), lo);
  for (;;) {
    if (spec.contains(n, R)) lat.insert(lat.end(), n.begin(), n.end());
    int a = m - 1;
    while (a >= 0 && ++n[static_cast<std::size_t>(a)] == hi) {
      n[static_cast<std::size_t>(a)] = lo;
      --a;
    }
    if (a < 0) break;
  }
  Provenance prov;
  prov.method = "fullgrid";
  prov.params = {{"R", R}};
  return FrequencySet(spec, R, std::move(lat), std::move(prov));
}

Box Box::polar() const {
  Box out;
  out.center.assign(halfwidths.size(), 0.0);
  out.halfwidths.reserve(halfwidths.size());
  for (double h : halfwidths) out.halfwidths.push_back(1.0 / std::max(h, kMinHalfwidth));
  return out;
}

Box enclosing_box(const FrequencySet& fset, std::span<const std::size_t> members) {
  if (members.empty()) throw InvalidArgument("enclosing box of an empty selection");
  const auto d = static_cast<std::size_t>(fset.d());
  std::vector<double> lo(d, std::numeric_limits<double>::infinity());
  std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
  for (std::size_t idx : members) {
    if (idx >= fset.size()) throw InvalidArgument("box member index out of range");
    auto s = fset.frequency(idx);
    for (std::size_t a = 0; a < d; ++a) {
      lo[a] = std::min(lo[a], s[a]);
      hi[a] = std::max(hi[a], s[a]);
    }
  }
  Box box;
  for (std::size_t a = 0; a < d; ++a) {
    box.center.push_back(0.5 * (lo[a] + hi[a]));
    box.halfwidths.push_back(std::max(0.5 * (hi[a] - lo[a]), kMinHalfwidth));
  }
  return box;
}

}  // namespace lambda_lab
