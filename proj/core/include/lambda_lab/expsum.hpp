#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "lambda_lab/exact_even.hpp"
#include "lambda_lab/frequency_set.hpp"
#include "lambda_lab/monte_carlo.hpp"
#include "lambda_lab/quadrature.hpp"

namespace lambda_lab {

using Complex = std::complex<double>;

/// Complex coefficients aligned index-for-index with a FrequencySet.
struct Coefficients {
  std::vector<Complex> values;

  static Coefficients constant(std::size_t n, Complex v = 1.0);
  static Coefficients indicator(std::size_t n, std::span<const std::size_t> members);
  /// Unit-modulus random phases keyed by (seed, trial, index).
  static Coefficients steinhaus(std::size_t n, std::uint64_t seed, std::uint64_t trial);

  std::size_t size() const noexcept { return values.size(); }
  double l2_norm() const;
  double lp_norm(double p) const;
};

enum class NormMethod { Auto, ExactEven, Quadrature, MonteCarlo };

std::string_view to_string(NormMethod method);
NormMethod parse_norm_method(std::string_view name);

struct NormConfig {
  NormMethod method = NormMethod::Auto;
  double resolution = 4.0;            // quadrature samples per unit frequency per axis
  std::size_t samples = 1'000'000;    // Monte-Carlo samples
  std::uint64_t seed = 0;             // Monte-Carlo stream
  double exact_budget = 2e9;          // tuple evaluations
  double quadrature_budget = 2.5e8;   // grid points
  bool estimate_error = true;         // second, coarser quadrature for the error bound
};

/// Normalized norm (∫_{[0,1]^d}|F|^p)^{1/p}, i.e. the average of |F|^p over
/// [0,R]^d in the spatial variable x = R·y.
struct NormReport {
  double p = 2.0;
  double value = 0.0;
  NormMethod method = NormMethod::Auto;
  double error = 0.0;          // absolute error bound on value (standard error for Monte-Carlo)
  double moment = 0.0;         // ∫|F|^p
  double moment_error = 0.0;
  double resolution = 0.0;
  std::size_t samples = 0;     // Monte-Carlo samples or quadrature grid points
  std::uint64_t seed = 0;
  double wall_ms = 0.0;
};

/// F(x_j) = Σ_s a_s e(s·x_j / R) for points x_j in [0,R]^d (row-major, d per point),
/// summed in index order.
std::vector<Complex> evaluate(const FrequencySet& fset, std::span<const Complex> a,
                              std::span<const double> x);

/// A norm evaluator bound to one set and exponent. The chosen method's setup
/// (convolution plan, FFT grid, phase tables) is reused across coefficient
/// vectors; the engine is safe to use from several threads.
class NormEngine {
 public:
  NormEngine(const FrequencySet& fset, double p, NormConfig config = {});
  ~NormEngine();
  NormEngine(NormEngine&&) noexcept;
  NormEngine& operator=(NormEngine&&) noexcept;

  double p() const noexcept { return p_; }
  NormMethod method() const noexcept { return method_; }
  const NormConfig& config() const noexcept { return config_; }
  std::size_t size() const noexcept { return n_; }
  bool has_gradient() const noexcept { return method_ != NormMethod::MonteCarlo; }

  NormReport report(std::span<const Complex> a) const;
  /// ∫|F|^p under the engine's rule.
  double moment(std::span<const Complex> a) const;
  /// ∫|F|^p and grad_s = ∫|F|^{p-2} F conj(e(s·y)); exact-even and quadrature only.
  double moment_and_gradient(std::span<const Complex> a, std::span<Complex> grad) const;

 private:
  std::size_t n_ = 0;
  double p_ = 2.0;
  NormConfig config_;
  NormMethod method_ = NormMethod::Auto;
  std::unique_ptr<ExactEvenPlan> exact_;
  std::unique_ptr<QuadratureEngine> quad_;
  std::unique_ptr<QuadratureEngine> coarse_;
  std::unique_ptr<MonteCarloEngine> mc_;
};

/// Refuses quadrature resolutions below 4 samples per unit frequency.
NormReport norm_lp(const FrequencySet& fset, std::span<const Complex> a, double p,
                   const NormConfig& config = {});

/// Exact ∫_{[0,1]^d}|F|^{2k} by expansion of the 2k-linear form.
double exact_even_norm(const FrequencySet& fset, std::span<const Complex> a, int exponent,
                       double budget = 2e9);

}  // namespace lambda_lab
