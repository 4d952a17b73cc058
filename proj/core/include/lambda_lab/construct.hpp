#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <utility>

#include <json.hpp>

#include "lambda_lab/frequency_set.hpp"
#include "lambda_lab/manifolds.hpp"
#include "lambda_lab/select.hpp"

namespace lambda_lab {

enum class ConstructionMethod { Capwise, Squares, Hyperbolic, Moment, Smallcap, FullgridSelect, Fullgrid };

std::string_view to_string(ConstructionMethod method);
ConstructionMethod parse_construction_method(std::string_view name);

/// Inputs of a build plus the derived sizes recorded for audit. Targets are
/// real numbers; no rounding happens before the Bernoulli draw.
struct ConstructionParams {
  ConstructionMethod method = ConstructionMethod::Capwise;
  ManifoldKind kind = ManifoldKind::EllipticParaboloid;
  int d = 3;
  std::int64_t R = 64;
  double p = 4.0;
  std::uint64_t seed = 0;
  std::size_t retries = kDefaultRetries;

  double per_cap_target = 0.0;
  double total_target = 0.0;
  std::pair<double, double> window{0.0, 0.0};
  nlohmann::json audit = nlohmann::json::object();

  nlohmann::json to_json() const;
};

/// Hypersurface cap-wise assembly: Bernoulli subsets of N_cap^{2/p_d} points in
/// every cap of side R^{-1/2}, with p_d = 2(d+1)/(d-1). R must be a square.
FrequencySet capwise_build(const ManifoldSpec& spec, std::int64_t R, std::uint64_t seed,
                           std::size_t retries = kDefaultRetries);

/// Deterministic set with base points (i/√R + n²/R, j/√R + k²/R),
/// 0 <= i,j < √R-1, 1 <= n,k < R^{1/4}; needs R^{1/4} integral.
FrequencySet squares_build(std::int64_t R,
                           const ManifoldSpec& spec = ManifoldSpec(ManifoldKind::EllipticParaboloid, 3));

struct HyperbolicBuild {
  FrequencySet set;
  FamilySelection selection;
};

/// family_select on the full hyperbolic-paraboloid grid against the dyadic
/// cover, p = 4. Check `selection.success` before trusting the set.
HyperbolicBuild hyperbolic_build(std::int64_t R, std::uint64_t seed,
                                 const FamilyValidator& validator = {},
                                 std::size_t retries = kDefaultRetries);

/// Dimension recursion on the moment curve Γ^d (2 <= d <= 4): select
/// N^{1/3} points per arc of length R^{-1/2}, then for j = 3..d union the
/// selections inside each arc of length R^{-1/j} and thin the union S to
/// |S|^{γ_{j-1}/γ_j}, γ_j = j(j+1).
FrequencySet moment_build(int d, std::int64_t R, std::uint64_t seed,
                          std::size_t retries = kDefaultRetries);

/// Small-cap sets: d = 2 with 4 <= p < 6 (arcs R^{-β}, β = 2/(p-2), N^{2/p}
/// per arc) or d = 3 with 10 <= p < 12 (β = 2/(p-6), moment recursion inside
/// each arc, thinned to |S|^{6/p}).
FrequencySet smallcap_build(int d, std::int64_t R, double p, std::uint64_t seed,
                            std::size_t retries = kDefaultRetries);

/// Bernoulli(|Φ|^{2/p-1}) subset of the full grid.
FrequencySet fullgrid_select(const ManifoldSpec& spec, std::int64_t R, double p, std::uint64_t seed,
                             std::size_t retries = kDefaultRetries);

/// Dispatches on params.method. Hyperbolic failures throw ValidationFailure.
FrequencySet build(const ConstructionParams& params);

}  // namespace lambda_lab
