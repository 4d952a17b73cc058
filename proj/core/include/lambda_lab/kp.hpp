#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "lambda_lab/expsum.hpp"
#include "lambda_lab/frequency_set.hpp"

namespace lambda_lab {

enum class Probe { Constant, Random, Cap, Ascent };
enum class Normalization { L2, Lp };

std::string_view to_string(Probe probe);
std::string_view to_string(Normalization n);
Probe parse_probe(std::string_view name);
/// Comma-separated probe list.
std::vector<Probe> parse_probes(std::string_view list);

/// Lower bound for K_p (l2 normalization) or K_p* (lp normalization) from one
/// family of test vectors.
struct KpProbeReport {
  double p = 2.0;
  Probe probe = Probe::Constant;
  Normalization normalization = Normalization::L2;
  double bound = 0.0;
  double error = 0.0;          // norm error carried through the denominator
  std::size_t iterations = 0;  // accepted ascent steps of the best restart
  std::size_t restarts = 0;
  std::size_t trials = 0;      // random probes evaluated
  std::uint64_t seed = 0;
  NormMethod method = NormMethod::Auto;
  double wall_ms = 0.0;
  std::vector<Complex> witness;  // coefficient vector attaining the bound
};

struct KpConfig {
  std::vector<Probe> probes{Probe::Constant, Probe::Random};
  std::size_t random_trials = 64;
  double cap_beta = 0.5;
  std::size_t iterations = 50;
  std::size_t restarts = 8;
  NormConfig norm;
  std::uint64_t seed = 0;
};

/// ‖F_a‖_p / ‖a‖₂, or ‖F_a‖_p / (N^{1/2-1/p}‖a‖_p), with the norm error scaled alike.
std::pair<double, double> kp_ratio(const NormEngine& engine, std::span<const Complex> a,
                                   Normalization normalization);

/// One report per requested probe, in request order.
std::vector<KpProbeReport> estimate_kp(const FrequencySet& fset, double p, const KpConfig& config);
std::vector<KpProbeReport> estimate_kp_star(const FrequencySet& fset, double p,
                                            const KpConfig& config);

/// Nonlinear power iteration a ← b/‖b‖ with b_s = ∫|F|^{p-2}F conj(e(s·y)).
/// Restarts: the constant vector, every vector in `starts`, then Steinhaus
/// vectors until `config.restarts` is reached. A step that lowers the
/// objective is halved (a + t(b/‖b‖ - a), renormalized) until it is accepted
/// or t < 1/64. Needs even p.
KpProbeReport ascend_kp(const FrequencySet& fset, double p, const KpConfig& config,
                        std::span<const std::vector<Complex>> starts = {},
                        Normalization normalization = Normalization::L2);
KpProbeReport ascend_kp(const NormEngine& engine, const KpConfig& config,
                        std::span<const std::vector<Complex>> starts = {},
                        Normalization normalization = Normalization::L2);

}  // namespace lambda_lab
