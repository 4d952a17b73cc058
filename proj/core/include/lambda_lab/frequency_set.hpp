#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "lambda_lab/manifolds.hpp"

namespace lambda_lab {

struct Provenance {
  std::string method = "manual";
  std::uint64_t seed = 0;
  nlohmann::json params = nlohmann::json::object();
};

/// Discrete system of frequencies s = (n, R·Π(n/R)) with distinct integer
/// base vectors n. The associated functions e(s·y) are orthonormal on
/// [0,1]^d, which is the same as averaging e((s/R)·x) over x in [0,R]^d.
///
/// Every axis carries an exactness flag: lattice axes are integers, tails of
/// polynomial manifolds are exact numerators over R^e, tails of the sphere and
/// cone graphs are plain doubles.
class FrequencySet {
 public:
  FrequencySet(ManifoldSpec spec, std::int64_t R, std::vector<std::int64_t> lattice,
               Provenance provenance = {});

  const ManifoldSpec& spec() const noexcept { return spec_; }
  std::int64_t R() const noexcept { return R_; }
  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }
  int d() const noexcept { return spec_.d(); }
  int m() const noexcept { return spec_.m(); }

  std::span<const std::int64_t> lattice(std::size_t i) const {
    return {lattice_.data() + i * static_cast<std::size_t>(m()), static_cast<std::size_t>(m())};
  }
  std::span<const std::int64_t> lattice_data() const noexcept { return lattice_; }

  /// Full frequency vector s (length d).
  std::span<const double> frequency(std::size_t i) const {
    return {coords_.data() + i * static_cast<std::size_t>(d()), static_cast<std::size_t>(d())};
  }
  /// Row-major N×d frequency coordinates.
  std::span<const double> coordinates() const noexcept { return coords_; }

  bool axis_exact(int axis) const { return axis_exact_[static_cast<std::size_t>(axis)]; }
  std::int64_t axis_denominator(int axis) const { return axis_den_[static_cast<std::size_t>(axis)]; }
  /// Exact numerator of coordinate `axis` of point i; valid when axis_exact(axis).
  std::int64_t numerator(std::size_t i, int axis) const {
    return numerators_[i * static_cast<std::size_t>(d()) + static_cast<std::size_t>(axis)];
  }

  const Provenance& provenance() const noexcept { return provenance_; }
  void set_provenance(Provenance p) { provenance_ = std::move(p); }

  /// Points at the given indices (in the given order).
  FrequencySet subset(std::span<const std::size_t> indices, Provenance provenance) const;

 private:
  ManifoldSpec spec_;
  std::int64_t R_;
  std::size_t size_ = 0;
  std::vector<std::int64_t> lattice_;
  std::vector<double> coords_;
  std::vector<std::int64_t> numerators_;
  std::vector<bool> axis_exact_;
  std::vector<std::int64_t> axis_den_;
  Provenance provenance_;
};

/// All lattice points n in [0,R)^m with n/R inside the spec's domain.
FrequencySet full_grid(const ManifoldSpec& spec, std::int64_t R);

/// Axis-parallel box in frequency units.
struct Box {
  std::vector<double> center;
  std::vector<double> halfwidths;

  /// Origin-centred box with reciprocal halfwidths (dual variable y = x/R).
  Box polar() const;
};

/// Halfwidths below this are clamped so the polar box stays finite.
inline constexpr double kMinHalfwidth = 0x1.0p-40;

/// Smallest axis-parallel box containing the selected frequencies.
Box enclosing_box(const FrequencySet& fset, std::span<const std::size_t> members);

}  // namespace lambda_lab
