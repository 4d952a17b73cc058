#include "lambda_lab/manifolds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "lambda_lab/error.hpp"
#include "lambda_lab/partition.hpp"

namespace lambda_lab {

__extension__ typedef __int128 i128;

namespace {

constexpr i128 kNumeratorLimit = i128{1} << 62;

int base_dim(ManifoldKind kind, int d) {
  switch (kind) {
    case ManifoldKind::MomentCurve:
      return 1;
    case ManifoldKind::HyperbolicParaboloid:
      return 2;
    case ManifoldKind::Lattice:
      return d;
    default:
      return d - 1;
  }
}

}  // namespace

std::string_view to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::EllipticParaboloid:
      return "elliptic_paraboloid";
    case ManifoldKind::SphereGraph:
      return "sphere_graph";
    case ManifoldKind::HyperbolicParaboloid:
      return "hyperbolic_paraboloid";
    case ManifoldKind::MomentCurve:
      return "moment_curve";
    case ManifoldKind::ConeGraph:
      return "cone_graph";
    case ManifoldKind::Lattice:
      return "lattice";
  }
  return "unknown";
}

ManifoldKind parse_manifold_kind(std::string_view name) {
  if (name == "elliptic_paraboloid" || name == "paraboloid" || name == "parabola")
    return ManifoldKind::EllipticParaboloid;
  if (name == "sphere_graph" || name == "sphere") return ManifoldKind::SphereGraph;
  if (name == "hyperbolic_paraboloid" || name == "hyperbolic")
    return ManifoldKind::HyperbolicParaboloid;
  if (name == "moment_curve" || name == "momentcurve" || name == "moment")
    return ManifoldKind::MomentCurve;
  if (name == "cone_graph" || name == "cone") return ManifoldKind::ConeGraph;
  if (name == "lattice" || name == "torus") return ManifoldKind::Lattice;
  throw InvalidArgument("unknown manifold kind: " + std::string(name));
}

Rational make_rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw InvalidArgument("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  return {num / g, den / g};
}

ManifoldSpec::ManifoldSpec(ManifoldKind kind, int d) : kind_(kind), d_(d), m_(base_dim(kind, d)) {
  if (kind == ManifoldKind::Lattice) {
    if (d < 1) throw InvalidArgument("lattice dimension must be >= 1");
  } else if (d < 2) {
    throw InvalidArgument("ambient dimension must be >= 2");
  }
  if (kind == ManifoldKind::HyperbolicParaboloid && d != 3)
    throw InvalidArgument("hyperbolic paraboloid requires d = 3");
  if (kind == ManifoldKind::SphereGraph)
    domain_ = {0.0, 1.0 / (2.0 * std::sqrt(static_cast<double>(m_)))};
  if (kind == ManifoldKind::ConeGraph) domain_ = {0.25, 0.75};
}

bool ManifoldSpec::polynomial() const noexcept {
  return kind_ != ManifoldKind::SphereGraph && kind_ != ManifoldKind::ConeGraph;
}

int ManifoldSpec::tail_denominator_exponent(int j) const {
  if (!polynomial() || j < 0 || j >= tail_dim())
    throw InvalidArgument("no exact tail denominator for this axis");
  if (kind_ == ManifoldKind::MomentCurve) return j + 1;  // n^(j+2) / R^(j+1)
  return 1;
}

void ManifoldSpec::tail(std::span<const double> eta, std::span<double> out) const {
  double sq = 0.0;
  for (double v : eta) sq += v * v;
  switch (kind_) {
    case ManifoldKind::EllipticParaboloid:
      out[0] = sq;
      return;
    case ManifoldKind::SphereGraph:
      if (sq >= 1.0) throw InvalidArgument("sphere graph evaluated outside the unit ball");
      out[0] = 1.0 - std::sqrt(1.0 - sq);
      return;
    case ManifoldKind::HyperbolicParaboloid:
      out[0] = eta[0] * eta[1];
      return;
    case ManifoldKind::MomentCurve: {
      double power = eta[0];
      for (int j = 0; j < tail_dim(); ++j) {
        power *= eta[0];
        out[static_cast<std::size_t>(j)] = power;
      }
      return;
    }
    case ManifoldKind::ConeGraph:
      if (sq == 0.0) throw InvalidArgument("cone graph evaluated at its vertex");
      out[0] = std::sqrt(sq);
      return;
    case ManifoldKind::Lattice:
      return;
  }
}

std::optional<std::int64_t> ManifoldSpec::exact_tail_numerator(std::span<const std::int64_t> n,
                                                               int j) const {
  i128 v = 0;
  switch (kind_) {
    case ManifoldKind::EllipticParaboloid:
      for (std::int64_t x : n) v += static_cast<i128>(x) * x;
      break;
    case ManifoldKind::HyperbolicParaboloid:
      v = static_cast<i128>(n[0]) * n[1];
      break;
    case ManifoldKind::MomentCurve: {
      v = n[0];
      for (int q = 0; q <= j; ++q) {
        v *= n[0];
        if (v >= kNumeratorLimit || v <= -kNumeratorLimit) return std::nullopt;
      }
      break;
    }
    default:
      return std::nullopt;
  }
  if (v >= kNumeratorLimit || v <= -kNumeratorLimit) return std::nullopt;
  return static_cast<std::int64_t>(v);
}

bool ManifoldSpec::contains(std::span<const std::int64_t> n, std::int64_t R) const {
  if (kind_ == ManifoldKind::Lattice) return true;
  const double r = static_cast<double>(R);
  for (std::int64_t x : n) {
    if (x < 0 || x >= R) return false;
    const double v = static_cast<double>(x);
    if (v < domain_.lo * r - 1e-9 || v >= domain_.hi * r - 1e-9) return false;
  }
  return true;
}

Rational critical_exponent(const ManifoldSpec& spec) {
  const std::int64_t d = spec.d();
  switch (spec.kind()) {
    case ManifoldKind::EllipticParaboloid:
    case ManifoldKind::SphereGraph:
      return make_rational(2 * (d + 1), d - 1);
    case ManifoldKind::ConeGraph:
      if (d <= 2) throw InvalidArgument("cone critical exponent undefined for d = 2");
      return make_rational(2 * d, d - 2);
    case ManifoldKind::MomentCurve:
      return make_rational(d * (d + 1), 1);
    case ManifoldKind::HyperbolicParaboloid:
      return make_rational(4, 1);
    case ManifoldKind::Lattice:
      break;
  }
  throw InvalidArgument("no critical exponent for the flat lattice");
}

std::int64_t ceil_power(std::int64_t R, double beta) {
  const double v = std::pow(static_cast<double>(R), beta);
  const double r = std::round(v);
  if (std::abs(v - r) <= 1e-9 * std::max(1.0, v)) return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::ceil(v));
}

// ---------------------------------------------------------------------------
// Cap partitions

std::size_t CapPartition::densest() const {
  if (caps.empty()) throw InvalidArgument("empty cap partition");
  std::size_t best = 0;
  for (std::size_t i = 1; i < caps.size(); ++i)
    if (caps[i].members.size() > caps[best].members.size()) best = i;
  return best;
}

CapPartition cap_grid(const FrequencySet& fset, std::int64_t cells) {
  if (cells < 1) throw InvalidArgument("cap grid needs at least one cell per axis");
  const int m = fset.m();
  const std::int64_t R = fset.R();

  std::vector<std::pair<std::vector<std::int64_t>, std::size_t>> keyed;
  keyed.reserve(fset.size());
  for (std::size_t i = 0; i < fset.size(); ++i) {
    auto n = fset.lattice(i);
    std::vector<std::int64_t> cell(static_cast<std::size_t>(m));
    for (int a = 0; a < m; ++a) {
      const std::int64_t x = n[static_cast<std::size_t>(a)];
      if (x < 0 || x >= R) throw InvalidArgument("base point outside the unit cube");
      cell[static_cast<std::size_t>(a)] =
          static_cast<std::int64_t>(static_cast<i128>(x) * cells / R);
    }
    keyed.emplace_back(std::move(cell), i);
  }
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  CapPartition part;
  part.cells_per_axis = cells;
  const double side = 1.0 / static_cast<double>(cells);
  for (auto& [cell, idx] : keyed) {
    if (part.caps.empty() || part.caps.back().cell != cell) {
      Cap cap;
      cap.cell = cell;
      for (std::int64_t c : cell) {
        cap.lo.push_back(static_cast<double>(c) * side);
        cap.hi.push_back(static_cast<double>(c + 1) * side);
      }
      part.caps.push_back(std::move(cap));
    }
    part.caps.back().members.push_back(idx);
  }
  return part;
}

CapPartition cap_partition(const FrequencySet& fset, double beta) {
  if (!(beta > 0.0 && beta <= 1.0)) throw InvalidArgument("cap exponent beta must lie in (0, 1]");
  CapPartition part = cap_grid(fset, ceil_power(fset.R(), beta));
  part.beta = beta;
  return part;
}

// ---------------------------------------------------------------------------
// Dyadic cover

DyadicCover::DyadicCover(std::int64_t R) : R_(R), k_(0) {
  if (R < 2 || (R & (R - 1)) != 0)
    throw InvalidArgument("dyadic cover requires R = 2^k with k >= 1");
  while ((std::int64_t{1} << k_) < R) ++k_;
}

double DyadicCover::width(int level) const {
  return static_cast<double>(std::int64_t{1} << level) / static_cast<double>(R_);
}

double DyadicCover::height(int level) const {
  return 1.0 / static_cast<double>(std::int64_t{1} << level);
}

std::size_t DyadicCover::rectangle_of(int level, std::int64_t n1, std::int64_t n2) const {
  if (level < 0 || level > k_) throw InvalidArgument("dyadic level out of range");
  if (n1 < 0 || n1 >= R_ || n2 < 0 || n2 >= R_)
    throw InvalidArgument("base point outside the unit square");
  const std::int64_t span = std::int64_t{1} << level;  // lattice columns per rectangle
  const std::int64_t cols = R_ / span;
  const std::int64_t col = n1 / span;
  const std::int64_t row = n2 / cols;  // R/2^j rows of lattice per rectangle
  return static_cast<std::size_t>(level) * static_cast<std::size_t>(R_) +
         static_cast<std::size_t>(row * cols + col);
}

std::array<double, 4> DyadicCover::bounds(std::size_t id) const {
  const int level = static_cast<int>(id / static_cast<std::size_t>(R_));
  const auto local = static_cast<std::int64_t>(id % static_cast<std::size_t>(R_));
  const std::int64_t cols = R_ >> level;
  const std::int64_t col = local % cols;
  const std::int64_t row = local / cols;
  const double w = width(level);
  const double h = height(level);
  return {static_cast<double>(col) * w, static_cast<double>(col + 1) * w,
          static_cast<double>(row) * h, static_cast<double>(row + 1) * h};
}

std::vector<std::size_t> DyadicCover::membership(std::int64_t n1, std::int64_t n2) const {
  std::vector<std::size_t> ids;
  ids.reserve(static_cast<std::size_t>(levels()));
  for (int j = 0; j <= k_; ++j) ids.push_back(rectangle_of(j, n1, n2));
  return ids;
}

std::vector<std::vector<std::size_t>> DyadicCover::members(const FrequencySet& fset) const {
  if (fset.m() != 2) throw InvalidArgument("dyadic cover needs a two-dimensional base");
  if (fset.R() != R_) throw InvalidArgument("dyadic cover scale does not match the set");
  std::vector<std::vector<std::size_t>> out(rectangle_count());
  for (std::size_t i = 0; i < fset.size(); ++i) {
    auto n = fset.lattice(i);
    for (std::size_t id : membership(n[0], n[1])) out[id].push_back(i);
  }
  return out;
}

DyadicCover dyadic_cover(std::int64_t R) { return DyadicCover(R); }

}  // namespace lambda_lab
