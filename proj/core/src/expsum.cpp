#include "lambda_lab/expsum.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <string>

#include "lambda_lab/error.hpp"
#include "lambda_lab/rng.hpp"

namespace lambda_lab {
namespace {

constexpr std::uint64_t kSteinhausTag = 0x5354454eULL;
constexpr double kRoundingRel = 1e-12;

bool is_even_integer(double p) { return p == std::floor(p) && static_cast<long>(p) % 2 == 0; }

}  // namespace

Coefficients Coefficients::constant(std::size_t n, Complex v) {
  return Coefficients{std::vector<Complex>(n, v)};
}

Coefficients Coefficients::indicator(std::size_t n, std::span<const std::size_t> members) {
  Coefficients c{std::vector<Complex>(n, Complex{})};
  for (std::size_t i : members) {
    if (i >= n) throw InvalidArgument("indicator: index out of range");
    c.values[i] = 1.0;
  }
  return c;
}

Coefficients Coefficients::steinhaus(std::size_t n, std::uint64_t seed, std::uint64_t trial) {
  Coefficients c;
  c.values.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    c.values.push_back(std::polar(1.0, 2.0 * std::numbers::pi * counter_uniform(seed, kSteinhausTag, trial, i)));
  return c;
}

double Coefficients::l2_norm() const {
  double s = 0.0;
  for (const Complex& v : values) s += std::norm(v);
  return std::sqrt(s);
}

double Coefficients::lp_norm(double p) const {
  if (!(p >= 1.0)) throw InvalidArgument("lp_norm: p must be >= 1");
  double s = 0.0;
  for (const Complex& v : values) s += std::pow(std::abs(v), p);
  return std::pow(s, 1.0 / p);
}

std::string_view to_string(NormMethod method) {
  switch (method) {
    case NormMethod::Auto: return "auto";
    case NormMethod::ExactEven: return "exact-even";
    case NormMethod::Quadrature: return "quadrature";
    case NormMethod::MonteCarlo: return "monte-carlo";
  }
  return "unknown";
}

NormMethod parse_norm_method(std::string_view name) {
  if (name == "auto") return NormMethod::Auto;
  if (name == "exact-even" || name == "exact") return NormMethod::ExactEven;
  if (name == "quadrature" || name == "quad") return NormMethod::Quadrature;
  if (name == "monte-carlo" || name == "mc") return NormMethod::MonteCarlo;
  throw InvalidArgument("unknown norm method: " + std::string(name));
}

std::vector<Complex> evaluate(const FrequencySet& fset, std::span<const Complex> a,
                              std::span<const double> x) {
  if (a.size() != fset.size()) throw InvalidArgument("evaluate: coefficient length mismatch");
  const auto d = static_cast<std::size_t>(fset.d());
  if (x.size() % d != 0) throw InvalidArgument("evaluate: point length not a multiple of d");
  const double inv_r = 1.0 / static_cast<double>(fset.R());
  std::vector<Complex> out(x.size() / d);
  for (std::size_t j = 0; j < out.size(); ++j) {
    Complex f{};
    for (std::size_t i = 0; i < fset.size(); ++i) {
      const auto s = fset.frequency(i);
      double turns = 0.0;
      for (std::size_t a_ = 0; a_ < d; ++a_) turns += s[a_] * (x[j * d + a_] * inv_r);
      turns -= std::floor(turns);
      f += a[i] * std::polar(1.0, 2.0 * std::numbers::pi * turns);
    }
    out[j] = f;
  }
  return out;
}

NormEngine::NormEngine(const FrequencySet& fset, double p, NormConfig config)
    : n_(fset.size()), p_(p), config_(config) {
  if (!(p >= 2.0)) throw InvalidArgument("norm: p must be >= 2");
  if (fset.empty()) throw InvalidArgument("norm: empty frequency set");
  const bool even = is_even_integer(p);

  auto try_exact = [&] {
    exact_ = std::make_unique<ExactEvenPlan>(fset, static_cast<int>(p) / 2, config_.exact_budget);
    method_ = NormMethod::ExactEven;
  };
  auto try_quadrature = [&] {
    quad_ = std::make_unique<QuadratureEngine>(fset, p, config_.resolution, config_.quadrature_budget);
    if (config_.estimate_error && !quad_->exact())
      coarse_ = std::make_unique<QuadratureEngine>(fset, p, config_.resolution,
                                                   config_.quadrature_budget, 0.75);
    method_ = NormMethod::Quadrature;
  };
  auto use_mc = [&] {
    mc_ = std::make_unique<MonteCarloEngine>(fset);
    method_ = NormMethod::MonteCarlo;
  };

  switch (config_.method) {
    case NormMethod::ExactEven:
      if (!even) throw InvalidArgument("exact-even needs an even integer exponent, got " + std::to_string(p));
      try_exact();
      break;
    case NormMethod::Quadrature:
      if (config_.resolution < 4.0)
        throw InvalidArgument("quadrature resolution below 4 samples per unit frequency");
      try_quadrature();
      break;
    case NormMethod::MonteCarlo:
      use_mc();
      break;
    case NormMethod::Auto:
      if (even) {
        try {
          try_exact();
          break;
        } catch (const BudgetExceeded&) {
        }
      }
      try {
        try_quadrature();
      } catch (const BudgetExceeded&) {
        use_mc();
      }
      break;
  }
}

NormEngine::~NormEngine() = default;
NormEngine::NormEngine(NormEngine&&) noexcept = default;
NormEngine& NormEngine::operator=(NormEngine&&) noexcept = default;

double NormEngine::moment(std::span<const Complex> a) const {
  if (a.size() != n_) throw InvalidArgument("norm: coefficient length mismatch");
  switch (method_) {
    case NormMethod::ExactEven: return exact_->moment(a);
    case NormMethod::Quadrature: return quad_->moment(a);
    default: return mc_->moment(a, p_, config_.samples, config_.seed).mean;
  }
}

double NormEngine::moment_and_gradient(std::span<const Complex> a, std::span<Complex> grad) const {
  switch (method_) {
    case NormMethod::ExactEven: return exact_->moment_and_gradient(a, grad);
    case NormMethod::Quadrature: return quad_->moment_and_gradient(a, grad);
    default: throw InvalidArgument("norm: Monte-Carlo engine has no gradient");
  }
}

NormReport NormEngine::report(std::span<const Complex> a) const {
  if (a.size() != n_) throw InvalidArgument("norm: coefficient length mismatch");
  const auto t0 = std::chrono::steady_clock::now();
  NormReport r;
  r.p = p_;
  r.method = method_;
  switch (method_) {
    case NormMethod::ExactEven:
      r.moment = exact_->moment(a);
      r.moment_error = kRoundingRel * std::abs(r.moment);
      break;
    case NormMethod::Quadrature:
      r.moment = quad_->moment(a);
      r.moment_error = kRoundingRel * std::abs(r.moment);
      if (coarse_) r.moment_error += std::abs(r.moment - coarse_->moment(a));
      r.resolution = config_.resolution;
      r.samples = static_cast<std::size_t>(quad_->nodes());
      break;
    default: {
      const MonteCarloEstimate est = mc_->moment(a, p_, config_.samples, config_.seed);
      r.moment = est.mean;
      r.moment_error = est.std_error;
      r.samples = est.samples;
      r.seed = config_.seed;
      break;
    }
  }
  r.moment = std::max(r.moment, 0.0);
  r.value = std::pow(r.moment, 1.0 / p_);
  // First-order propagation through the p-th root; falls back to the crude
  // bound when the moment is too small for the linearization.
  if (r.moment > 0.0 && r.moment_error < r.moment) {
    r.error = r.moment_error / (p_ * std::pow(r.moment, 1.0 - 1.0 / p_));
  } else {
    r.error = std::pow(r.moment_error, 1.0 / p_);
  }
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

NormReport norm_lp(const FrequencySet& fset, std::span<const Complex> a, double p,
                   const NormConfig& config) {
  if (config.method == NormMethod::Quadrature && config.resolution < 4.0)
    throw InvalidArgument("quadrature resolution below 4 samples per unit frequency");
  return NormEngine(fset, p, config).report(a);
}

double exact_even_norm(const FrequencySet& fset, std::span<const Complex> a, int exponent,
                       double budget) {
  if (exponent < 2 || exponent % 2 != 0)
    throw InvalidArgument("exact_even_norm: exponent must be a positive even integer");
  return ExactEvenPlan(fset, exponent / 2, budget).moment(a);
}

}  // namespace lambda_lab
