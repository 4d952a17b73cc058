#include "lambda_lab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include <fftw3.h>
#include <gsl/gsl_integration.h>

#include "lambda_lab/error.hpp"
#include "lambda_lab/parallel.hpp"

namespace lambda_lab {
namespace {

constexpr std::size_t kMaxBlocks = 64;

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool smooth(std::int64_t n) {
  for (std::int64_t f : {2, 3, 5, 7})
    while (n % f == 0) n /= f;
  return n == 1;
}

std::int64_t next_smooth(std::int64_t n) {
  while (!smooth(n)) ++n;
  return n;
}

double abs_pow(double norm2, double p, bool even) {
  if (even) {
    double r = 1.0;
    for (int i = static_cast<int>(p) / 2; i > 0; --i) r *= norm2;
    return r;
  }
  return std::pow(norm2, 0.5 * p);
}

}  // namespace

struct QuadratureEngine::Plans {
  fftw_plan backward = nullptr;
  fftw_plan forward = nullptr;
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (backward) fftw_destroy_plan(backward);
    if (forward) fftw_destroy_plan(forward);
  }
};

QuadratureEngine::QuadratureEngine(const FrequencySet& fset, double p, double resolution,
                                   double budget, double refine)
    : n_(fset.size()), p_(p) {
  if (!(p >= 2.0)) throw InvalidArgument("quadrature: p must be >= 2");
  if (!(resolution >= 1.0)) throw InvalidArgument("quadrature: resolution must be >= 1");
  if (fset.empty()) throw InvalidArgument("quadrature: empty frequency set");
  const int d = fset.d();
  const bool even = p == std::floor(p) && static_cast<long>(p) % 2 == 0;

  std::vector<int> periodic, aperiodic;
  for (int a = 0; a < d; ++a) {
    if (fset.axis_exact(a) && fset.axis_denominator(a) == 1) {
      periodic.push_back(a);
    } else {
      aperiodic.push_back(a);
    }
  }

  // Periodic axes: shift to start at zero; Q > (p/2)·W keeps even powers alias free.
  std::vector<std::int64_t> lo(periodic.size()), width(periodic.size());
  for (std::size_t t = 0; t < periodic.size(); ++t) {
    std::int64_t mn = fset.numerator(0, periodic[t]), mx = mn;
    for (std::size_t i = 1; i < n_; ++i) {
      mn = std::min(mn, fset.numerator(i, periodic[t]));
      mx = std::max(mx, fset.numerator(i, periodic[t]));
    }
    lo[t] = mn;
    width[t] = mx - mn;
    const double w = static_cast<double>(width[t]);
    double q = std::max(std::ceil(refine * resolution * w), std::floor(std::ceil(0.5 * p) * w) + 1.0);
    if (width[t] == 0) q = 1.0;
    if (q > 1e9) throw BudgetExceeded("quadrature: periodic axis size", q, budget);
    dims_.push_back(static_cast<int>(next_smooth(static_cast<std::int64_t>(q))));
  }
  grid_ = 1;
  for (int q : dims_) grid_ *= static_cast<std::size_t>(q);

  slot_.resize(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    std::size_t s = 0;
    for (std::size_t t = 0; t < periodic.size(); ++t)
      s = s * static_cast<std::size_t>(dims_[t]) +
          static_cast<std::size_t>(fset.numerator(i, periodic[t]) - lo[t]);
    slot_[i] = s;
  }

  // Aperiodic axes: centre the coordinates, Gauss-Legendre in y.
  n_aperiodic_ = aperiodic.size();
  offsets_.resize(n_ * n_aperiodic_);
  outer_ = 1;
  exact_ = even;
  for (std::size_t t = 0; t < aperiodic.size(); ++t) {
    const int a = aperiodic[t];
    double mn = fset.frequency(0)[a], mx = mn;
    for (std::size_t i = 1; i < n_; ++i) {
      mn = std::min(mn, fset.frequency(i)[a]);
      mx = std::max(mx, fset.frequency(i)[a]);
    }
    const double c = 0.5 * (mn + mx);
    const double w = mx - mn;
    for (std::size_t i = 0; i < n_; ++i) offsets_[i * n_aperiodic_ + t] = fset.frequency(i)[a] - c;
    std::vector<double> nodes, weights;
    if (w == 0.0) {
      nodes = {0.5};
      weights = {1.0};
    } else {
      exact_ = false;
      const double want =
          std::ceil(refine * std::max(resolution * w, 1.1 * std::numbers::pi * p * w / 4.0)) + 24.0;
      if (want > 1e7) throw BudgetExceeded("quadrature: aperiodic axis size", want, budget);
      const auto n = static_cast<std::size_t>(want);
      gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(n);
      if (!table) throw std::bad_alloc();
      nodes.resize(n);
      weights.resize(n);
      for (std::size_t j = 0; j < n; ++j)
        gsl_integration_glfixed_point(0.0, 1.0, j, &nodes[j], &weights[j], table);
      gsl_integration_glfixed_table_free(table);
    }
    outer_ *= nodes.size();
    ynodes_.push_back(std::move(nodes));
    yweights_.push_back(std::move(weights));
  }

  nodes_ = static_cast<double>(grid_) * static_cast<double>(outer_);
  if (nodes_ > budget) throw BudgetExceeded("quadrature: grid points", nodes_, budget);

  plans_ = std::make_unique<Plans>();
  if (grid_ > 1) {
    std::lock_guard lock(planner_mutex());
    auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * grid_));
    if (!buf) throw std::bad_alloc();
    const int rank = static_cast<int>(dims_.size());
    plans_->backward = fftw_plan_dft(rank, dims_.data(), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    plans_->forward = fftw_plan_dft(rank, dims_.data(), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_free(buf);
    if (!plans_->backward || !plans_->forward) throw std::runtime_error("quadrature: FFTW planning failed");
  }
}

QuadratureEngine::~QuadratureEngine() = default;

double QuadratureEngine::moment(std::span<const Complex> a) const {
  if (a.size() != n_) throw InvalidArgument("quadrature: coefficient length mismatch");
  return run(a, {});
}

double QuadratureEngine::moment_and_gradient(std::span<const Complex> a,
                                             std::span<Complex> grad) const {
  if (a.size() != n_ || grad.size() != n_)
    throw InvalidArgument("quadrature: coefficient length mismatch");
  return run(a, grad);
}

double QuadratureEngine::run(std::span<const Complex> a, std::span<Complex> grad) const {
  const bool want_grad = !grad.empty();
  const bool even = p_ == std::floor(p_) && static_cast<long>(p_) % 2 == 0;
  const std::size_t blocks = std::min(outer_, kMaxBlocks);
  std::vector<double> partial(blocks, 0.0);
  std::vector<std::vector<Complex>> gpart(want_grad ? blocks : 0);
  const double inv_grid = 1.0 / static_cast<double>(grid_);

  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t o_lo = outer_ * b / blocks, o_hi = outer_ * (b + 1) / blocks;
    auto* raw = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * grid_));
    if (!raw) throw std::bad_alloc();
    auto* buf = reinterpret_cast<Complex*>(raw);
    std::vector<Complex> phase(n_);
    std::vector<double> y(n_aperiodic_);
    std::vector<Complex> g;
    if (want_grad) g.assign(n_, Complex{});
    double acc = 0.0;

    for (std::size_t o = o_lo; o < o_hi; ++o) {
      double w = 1.0;
      std::size_t rest = o;
      for (std::size_t t = n_aperiodic_; t-- > 0;) {
        const std::size_t sz = ynodes_[t].size();
        y[t] = ynodes_[t][rest % sz];
        w *= yweights_[t][rest % sz];
        rest /= sz;
      }
      std::fill(buf, buf + grid_, Complex{});
      for (std::size_t i = 0; i < n_; ++i) {
        double arg = 0.0;
        for (std::size_t t = 0; t < n_aperiodic_; ++t) arg += offsets_[i * n_aperiodic_ + t] * y[t];
        phase[i] = n_aperiodic_ ? std::polar(1.0, 2.0 * std::numbers::pi * arg) : Complex{1.0, 0.0};
        buf[slot_[i]] += a[i] * phase[i];
      }
      if (grid_ > 1) fftw_execute_dft(plans_->backward, raw, raw);

      double sum = 0.0;
      for (std::size_t j = 0; j < grid_; ++j) {
        const double n2 = std::norm(buf[j]);
        const double v = abs_pow(n2, p_, even);
        sum += v;
        if (want_grad) buf[j] *= (n2 > 0.0 ? v / n2 : 0.0) * w * inv_grid;
      }
      acc += w * sum * inv_grid;
      if (want_grad) {
        if (grid_ > 1) fftw_execute_dft(plans_->forward, raw, raw);
        for (std::size_t i = 0; i < n_; ++i) g[i] += buf[slot_[i]] * std::conj(phase[i]);
      }
    }
    fftw_free(raw);
    partial[b] = acc;
    if (want_grad) gpart[b] = std::move(g);
  });

  double total = 0.0;
  for (double v : partial) total += v;
  if (want_grad) {
    std::fill(grad.begin(), grad.end(), Complex{});
    for (const auto& g : gpart)
      for (std::size_t i = 0; i < n_; ++i) grad[i] += g[i];
  }
  return total;
}

}  // namespace lambda_lab
