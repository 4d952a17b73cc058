#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lambda_lab/frequency_set.hpp"

namespace lambda_lab {

using Complex = std::complex<double>;

struct MonteCarloEstimate {
  double mean = 0.0;      // estimate of ∫|F|^p
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// Plain Monte-Carlo for ∫_{[0,1]^d} |F|^p with y drawn from a counter-based
/// generator keyed by (seed, sample index), so the estimate does not depend on
/// the worker count. Samples are processed in fixed blocks whose statistics
/// are merged in block order.
class MonteCarloEngine {
 public:
  explicit MonteCarloEngine(const FrequencySet& fset);

  MonteCarloEstimate moment(std::span<const Complex> a, double p, std::size_t samples,
                            std::uint64_t seed) const;

  /// Uniform sample point y (length d) for a sample index.
  void sample_point(std::uint64_t seed, std::uint64_t index, std::span<double> y) const;

 private:
  struct Axis {
    bool exact = false;
    std::int64_t den = 1;
    std::int64_t base = 0;   // minimum numerator
    std::int64_t step = 1;   // lo table size B
    std::size_t hi_size = 1;
  };

  std::size_t n_ = 0;
  int d_ = 0;
  std::vector<Axis> axes_;
  std::vector<std::uint32_t> lo_idx_;  // point-major per exact axis
  std::vector<std::uint32_t> hi_idx_;
  std::vector<double> real_;           // point-major per axis (inexact axes)
};

}  // namespace lambda_lab
