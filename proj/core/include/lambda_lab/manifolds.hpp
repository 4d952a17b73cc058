#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace lambda_lab {

/// Graph manifolds {(η, Π(η))} plus the flat integer lattice (no graph part),
/// which hosts pure-lattice systems such as {e(nx): 0 <= n < N}.
enum class ManifoldKind {
  EllipticParaboloid,
  SphereGraph,
  HyperbolicParaboloid,
  MomentCurve,
  ConeGraph,
  Lattice,
};

std::string_view to_string(ManifoldKind kind);
/// Accepts canonical names and the CLI aliases (paraboloid, sphere, ...).
ManifoldKind parse_manifold_kind(std::string_view name);

/// Half-open cube [lo, hi)^m of admissible base points η.
struct BaseDomain {
  double lo = 0.0;
  double hi = 1.0;
};

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

Rational make_rational(std::int64_t num, std::int64_t den);

/// A graph manifold in R^d over an m-dimensional base.
///
/// MomentCurve: m = 1, Π(η) = (η², ..., η^d).
/// EllipticParaboloid: m = d-1, Π(η) = |η|².
/// SphereGraph: m = d-1, Π(η) = 1 - sqrt(1 - |η|²) on [0, 1/(2√m))^m.
/// HyperbolicParaboloid: d = 3, Π(η₁, η₂) = η₁η₂.
/// ConeGraph: m = d-1, Π(η) = |η| on [1/4, 3/4)^m.
/// Lattice: m = d, no tail; frequencies are arbitrary integer vectors.
class ManifoldSpec {
 public:
  ManifoldSpec(ManifoldKind kind, int d);

  ManifoldKind kind() const noexcept { return kind_; }
  int d() const noexcept { return d_; }
  int m() const noexcept { return m_; }
  int tail_dim() const noexcept { return d_ - m_; }
  const BaseDomain& domain() const noexcept { return domain_; }
  bool unit_cube_domain() const noexcept { return domain_.lo == 0.0 && domain_.hi == 1.0; }

  /// True when R·Π(n/R) is an exact rational with denominator R^e per axis.
  bool polynomial() const noexcept;

  /// Exponent e of the tail denominator R^e for tail axis j (polynomial kinds).
  int tail_denominator_exponent(int j) const;

  /// Π(η) into out (size tail_dim). Throws InvalidArgument outside the domain.
  void tail(std::span<const double> eta, std::span<double> out) const;

  /// Numerators of R^e·R·Π(n/R) per tail axis for polynomial kinds; nullopt on
  /// 64-bit overflow.
  std::optional<std::int64_t> exact_tail_numerator(std::span<const std::int64_t> n,
                                                   int j) const;

  /// n/R inside the recorded base domain (half-open per axis).
  bool contains(std::span<const std::int64_t> n, std::int64_t R) const;

  friend bool operator==(const ManifoldSpec& a, const ManifoldSpec& b) noexcept {
    return a.kind_ == b.kind_ && a.d_ == b.d_;
  }

 private:
  ManifoldKind kind_;
  int d_;
  int m_;
  BaseDomain domain_;
};

/// Threshold exponent below which maximal-size tight decoupling fails.
/// EllipticParaboloid/SphereGraph: 2(d+1)/(d-1); ConeGraph: 2d/(d-2);
/// MomentCurve: d(d+1); HyperbolicParaboloid: 4.
Rational critical_exponent(const ManifoldSpec& spec);

/// Rounds R^beta up, snapping values within 1e-9 relative of an integer.
std::int64_t ceil_power(std::int64_t R, double beta);

}  // namespace lambda_lab
