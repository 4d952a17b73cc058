#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "lambda_lab/expsum.hpp"
#include "lambda_lab/frequency_set.hpp"

namespace lambda_lab {

/// value ≈ C·R^slope by least squares on (ln R, ln value).
struct ScalingFit {
  std::vector<std::pair<double, double>> pairs;
  double slope = 0.0;
  double intercept = 0.0;
  double halfwidth = 0.0;  // two standard errors of the slope (0 for an exact fit)
  double r2 = 1.0;
};

/// Needs at least 3 pairs with positive R and value.
ScalingFit scaling_regression(std::span<const std::pair<double, double>> pairs);

struct InterferenceResult {
  double min_ratio = 1.0;           // min |Σ e(s·x)| / count over the samples
  std::vector<double> region;       // sampled halfwidth per axis in x units
  std::size_t samples = 0;
  double analytic_floor = 0.0;      // cos(2π/100)
};

/// Samples x on a grid with `per_axis` points per axis inside
/// ((1/(100d))·B°) ∩ [0,R]^d, B the enclosing box of the members.
InterferenceResult interference_lower(const FrequencySet& fset, std::span<const std::size_t> members,
                                      std::size_t per_axis = 3);

struct NecessityResult {
  double R = 0.0;
  double p = 0.0;
  double beta = 0.0;
  std::size_t cap_size = 0;
  double moment = 0.0;       // ∫|F|^p for the densest-cap indicator
  double ratio = 0.0;        // moment / |cap|^{p/2}
  double ratio_error = 0.0;
  NormMethod method = NormMethod::Auto;
};

/// Densest cap at β, indicator coefficients: ‖F‖_p^p / ‖a‖₂^p.
NecessityResult necessity_probe(const FrequencySet& fset, double p, double beta,
                                const NormConfig& norm = {});

struct BallCounts {
  std::vector<double> radii;
  std::vector<double> max_fraction;  // max over centres of ν(B_r)
  double alpha = 0.0;                // fitted exponent of ν(B_r) ≈ r^α
  double alpha_halfwidth = 0.0;
};

/// ν is the normalized counting measure of ξ = s/R, centres at the data points.
BallCounts ball_counts(const FrequencySet& fset, std::span<const double> radii);

struct CapEquidistribution {
  double delta = 0.0;
  std::int64_t cells_per_axis = 0;
  double predicted = 0.0;            // |P|·Δ^m for a full-measure cell
  std::vector<std::size_t> counts;   // nonempty cells in lexicographic order
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
  double dispersion = 0.0;           // standard deviation / mean of counts
};

/// Counts per base cell of side Δ (cells of side 1/round(1/Δ)).
CapEquidistribution cap_equidistribution(const FrequencySet& fset, double delta);

}  // namespace lambda_lab
