#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "lambda_lab/expsum.hpp"
#include "lambda_lab/frequency_set.hpp"
#include "lambda_lab/kp.hpp"

namespace lambda_lab {

inline constexpr std::size_t kDefaultRetries = 32;

struct SelectionPlan {
  std::size_t M = 0;
  double q = 2.0;
  double p = 2.0;
  double kq = 1.0;
  double delta = 1.0;
  double target = 0.0;  // M·δ
  std::uint64_t seed = 0;
  std::size_t retry_budget = kDefaultRetries;
  std::optional<double> kappa;  // recorded for the q = p branch, never checked
};

/// δ = min(1, K_q^{-2q/p}·M^{q/p-1}).
double selection_density(double M, double kq, double q, double p);
SelectionPlan make_selection_plan(std::size_t M, double kq, double q, double p,
                                  std::uint64_t seed, std::size_t retries = kDefaultRetries,
                                  std::optional<double> kappa = std::nullopt);

/// Size window [Mδ/2, 3Mδ/2] used by every Bernoulli selection.
std::pair<double, double> size_window(double M, double delta);
bool in_window(std::size_t size, double M, double delta);

/// One i.i.d. draw over [0, M): index i is kept when u(seed, draw, i) < δ.
std::vector<std::size_t> bernoulli_draw(std::size_t M, double delta, std::uint64_t seed,
                                        std::uint64_t draw);

struct Selection {
  std::vector<std::size_t> indices;
  std::size_t draw = 0;                  // accepted draw index
  std::vector<std::size_t> size_history;  // sizes of every draw, accepted last
};

/// Redraws until the size lands in the window; throws RetryExhausted with the
/// size history after `retries` redraws.
Selection bernoulli_indices(std::size_t M, double delta, std::uint64_t seed,
                            std::size_t retries = kDefaultRetries);
FrequencySet bernoulli_select(const FrequencySet& fset, double delta, std::uint64_t seed,
                              std::size_t retries = kDefaultRetries);

struct FamilyValidator {
  double C = 2.0;                  // threshold C·ln N
  std::size_t random_probes = 16;
  NormConfig norm;                 // exact-even is forced for p = 4
};

struct MemberProbe {
  std::size_t member = 0;
  std::size_t size = 0;  // |G ∩ S|
  double bound = 0.0;    // best probe lower bound for K_p(G ∩ S)
  NormMethod method = NormMethod::Auto;
};

struct FamilySelection {
  std::vector<std::size_t> indices;  // G
  bool success = false;
  std::size_t draws = 0;
  std::size_t accepted_draw = 0;     // draw index of the returned G
  std::size_t member_size = 0;       // N
  double delta = 1.0;
  double threshold = 0.0;
  double worst = 0.0;                // max bound over members
  std::vector<std::size_t> size_history;
  std::vector<MemberProbe> table;    // one row per family member
};

/// Bernoulli(N^{2/p-1}) selection validated on every member S of an
/// overlapping family with constant member size N. A draw is rejected when
/// |G| leaves its window or some probe of G ∩ S exceeds C·ln N; after the
/// retry budget the best draw comes back with success = false.
FamilySelection family_select(const FrequencySet& fset,
                              const std::vector<std::vector<std::size_t>>& family, double p,
                              std::uint64_t seed, const FamilyValidator& validator = {},
                              std::size_t retries = kDefaultRetries);

struct ConcentrationResult {
  std::size_t M = 0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> sizes;  // per trial
  std::vector<bool> inside;
  double inside_fraction = 0.0;
  std::vector<std::pair<double, double>> cdf;  // (size, fraction of trials <= size)
};

ConcentrationResult concentration_experiment(std::size_t M, double delta, std::size_t trials,
                                             std::uint64_t seed);

struct TailTrial {
  std::size_t trial = 0;
  std::size_t size = 0;
  bool accepted = false;  // size inside the window
  double probe_max = 0.0;
  std::uint64_t seed = 0;
};

struct TailExperiment {
  SelectionPlan plan;
  std::vector<TailTrial> trials;
  double min = 0.0;
  double median = 0.0;
  double p95 = 0.0;
  double max = 0.0;
  std::vector<std::pair<double, double>> exceedance;  // (u, fraction of trials >= u)
  double tail_slope = 0.0;  // least-squares slope of ln(exceedance) against u²
};

/// Draws Ψ(ω) at the plan density for each trial and records the best probe
/// lower bound for K_p(Ψ(ω)). K_q is 1 for q = 2, otherwise taken from `kq`
/// or estimated with the configured probes.
TailExperiment kp_tail_experiment(const FrequencySet& fset, double q, double p,
                                  std::size_t trials, std::uint64_t seed,
                                  const KpConfig& probes = {}, std::optional<double> kq = {});

}  // namespace lambda_lab
