#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lambda_lab/frequency_set.hpp"

namespace lambda_lab {

using Complex = std::complex<double>;

/// Exact evaluation of ∫_{[0,1]^d} |Σ a_s e(s·y)|^{2k} dy.
///
/// F^k is expanded as Σ_σ c_σ e(σ·y) over the distinct k-fold sums σ (built by
/// repeated sparse convolution with the point set), then
/// ∫|F^k|² = Σ_{σ,σ'} c_σ conj(c_σ') Π_axes ∫₀¹ e((σ−σ')_a y) dy.
/// Integer axes integrate to Kronecker deltas, so only sums that agree on
/// every integer axis interact; the remaining axes use the closed form
/// ∫₀¹ e(u y) dy = e(u/2)·sin(πu)/(πu).
///
/// The plan depends only on the frequencies, so it is built once and replayed
/// for any number of coefficient vectors.
class ExactEvenPlan {
 public:
  ExactEvenPlan(const FrequencySet& fset, int k, double budget = 2e9);

  int k() const noexcept { return k_; }
  std::size_t points() const noexcept { return n_; }
  /// Number of distinct k-fold sums.
  std::size_t terms() const noexcept { return terms_; }
  /// Tuple evaluations per replay (convolution triples plus interacting pairs).
  double work() const noexcept { return work_; }

  /// ∫|F|^{2k}.
  double moment(std::span<const Complex> a) const;

  /// ∫|F|^{2k}; grad_s = ∫ |F|^{2k-2} F conj(e(s·y)) dy.
  double moment_and_gradient(std::span<const Complex> a, std::span<Complex> grad) const;

 private:
  struct Level {
    std::vector<std::uint32_t> parent;
    std::vector<std::uint32_t> point;
    std::vector<std::uint32_t> target;
    std::size_t size = 0;
  };
  struct KernelAxis {
    bool exact = true;
    std::int64_t den = 1;
    std::vector<Complex> table;  // e(r/2D)·sin(πr/D), r in [0, 2D)
  };

  void expand(std::span<const Complex> a, std::vector<Complex>& top,
              std::vector<Complex>& below) const;
  double interact(const std::vector<Complex>& c, std::vector<Complex>* h) const;
  Complex kernel(std::size_t pos_i, std::size_t pos_j) const;

  std::size_t n_ = 0;
  int k_ = 1;
  std::size_t terms_ = 0;
  double work_ = 0.0;
  std::vector<Level> levels_;
  std::vector<std::uint32_t> order_;        // entry id at each grouped position
  std::vector<std::uint32_t> group_start_;  // group boundaries over positions
  std::vector<KernelAxis> kaxes_;
  std::size_t n_kexact_ = 0;
  std::size_t n_kreal_ = 0;
  std::vector<std::int64_t> knum_;  // position-major exact numerators of kernel axes
  std::vector<double> kreal_;       // position-major values of inexact kernel axes
};

/// Number of 2k-tuples (s_1..s_2k) with s_1+..+s_k = s_{k+1}+..+s_2k, counted
/// by hashing all ordered k-fold sums (meet in the middle).
/// `points` is row-major with `dim` integer coordinates per point.
std::uint64_t count_energy(std::span<const std::int64_t> points, std::size_t dim, int k,
                           double budget = 2e9);

}  // namespace lambda_lab
