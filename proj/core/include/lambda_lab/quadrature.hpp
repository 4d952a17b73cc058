#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "lambda_lab/frequency_set.hpp"

namespace lambda_lab {

using Complex = std::complex<double>;

/// Tensor-grid quadrature of ∫_{[0,1]^d} |Σ a_s e(s·y)|^p dy.
///
/// Integer axes are periodic: the trapezoid rule with Q samples is exact for
/// trigonometric polynomials of degree < Q, and the grid values come from one
/// multi-dimensional FFT per node of the remaining axes. Non-integer axes use
/// Gauss-Legendre nodes. `resolution` is the number of samples per unit
/// frequency width on every axis (at least 4). `refine` scales every node
/// count that is not forced by exactness; values below 1 give the coarse rule
/// used for error estimates.
class QuadratureEngine {
 public:
  QuadratureEngine(const FrequencySet& fset, double p, double resolution = 4.0,
                   double budget = 2.5e8, double refine = 1.0);
  ~QuadratureEngine();
  QuadratureEngine(const QuadratureEngine&) = delete;
  QuadratureEngine& operator=(const QuadratureEngine&) = delete;

  double p() const noexcept { return p_; }
  /// Total number of grid points.
  double nodes() const noexcept { return nodes_; }
  /// True when the rule integrates |F|^p without discretization error
  /// (even p, every axis periodic).
  bool exact() const noexcept { return exact_; }

  double moment(std::span<const Complex> a) const;
  /// grad_s = ∫ |F|^{p-2} F conj(e(s·y)) dy under the same rule.
  double moment_and_gradient(std::span<const Complex> a, std::span<Complex> grad) const;

 private:
  double run(std::span<const Complex> a, std::span<Complex> grad) const;

  struct Plans;
  std::size_t n_ = 0;
  double p_ = 2.0;
  double nodes_ = 0.0;
  bool exact_ = false;
  std::vector<int> dims_;                // periodic grid sizes
  std::size_t grid_ = 1;                 // product of dims_
  std::vector<std::size_t> slot_;        // grid slot of every point
  std::vector<std::vector<double>> ynodes_;  // aperiodic axes: nodes in [0,1]
  std::vector<std::vector<double>> yweights_;
  std::vector<double> offsets_;          // point-major shifted aperiodic coordinates
  std::size_t n_aperiodic_ = 0;
  std::size_t outer_ = 1;                // product of aperiodic node counts
  std::unique_ptr<Plans> plans_;
};

}  // namespace lambda_lab
