#include "lambda_lab/construct.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "lambda_lab/error.hpp"
#include "lambda_lab/parallel.hpp"
#include "lambda_lab/partition.hpp"
#include "lambda_lab/rng.hpp"

namespace lambda_lab {
namespace {

constexpr std::uint64_t kCapTag = 0x43415053ULL;
constexpr std::uint64_t kArcTag = 0x41524353ULL;
constexpr std::uint64_t kThinTag = 0x5448494eULL;
constexpr std::uint64_t kAttemptTag = 0x41545054ULL;

std::int64_t exact_root(std::int64_t R, int k) {
  const auto r = static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(R), 1.0 / k)));
  std::int64_t pw = 1;
  for (int i = 0; i < k; ++i) pw *= r;
  return pw == R ? r : -1;
}

// Bernoulli subset of `pool` with expected size `target`, size-window retries.
std::vector<std::size_t> select_within(const std::vector<std::size_t>& pool, double target,
                                       std::uint64_t seed, std::size_t retries) {
  if (pool.empty()) return {};
  const double delta = std::min(1.0, target / static_cast<double>(pool.size()));
  const Selection sel = bernoulli_indices(pool.size(), delta, seed, retries);
  std::vector<std::size_t> out;
  out.reserve(sel.indices.size());
  for (std::size_t i : sel.indices) out.push_back(pool[i]);
  return out;
}

FrequencySet finish(const FrequencySet& parent, std::vector<std::size_t> indices,
                    const ConstructionParams& params) {
  std::sort(indices.begin(), indices.end());
  Provenance prov;
  prov.method = std::string(to_string(params.method));
  prov.seed = params.seed;
  prov.params = params.to_json();
  return parent.subset(indices, std::move(prov));
}

void check_total(std::size_t size, const ConstructionParams& params) {
  const auto s = static_cast<double>(size);
  if (s < params.window.first || s > params.window.second)
    throw ValidationFailure(std::string(to_string(params.method)) + ": size " + std::to_string(size) +
                            " outside [" + std::to_string(params.window.first) + ", " +
                            std::to_string(params.window.second) + "]");
}

bool inside(std::size_t size, const std::pair<double, double>& w) {
  const auto s = static_cast<double>(size);
  return s >= w.first && s <= w.second;
}

// Points of `arc` (indices into a moment-curve grid whose lattice value equals
// the index) grouped by floor(n·cells/R), in increasing order.
std::vector<std::vector<std::size_t>> split_arcs(const std::vector<std::size_t>& arc,
                                                 std::int64_t cells, std::int64_t R) {
  std::map<std::int64_t, std::vector<std::size_t>> groups;
  for (std::size_t n : arc) groups[static_cast<std::int64_t>(n) * cells / R].push_back(n);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [key, v] : groups) out.push_back(std::move(v));
  return out;
}

std::int64_t arc_cells(std::int64_t R, int j) {
  return std::max<std::int64_t>(1, std::llround(std::pow(static_cast<double>(R), 1.0 / j)));
}

double gamma(int j) { return static_cast<double>(j * (j + 1)); }

struct MomentRecursion {
  std::int64_t R;
  std::uint64_t seed;
  std::size_t retries;

  std::vector<std::size_t> build(int dcur, const std::vector<std::size_t>& arc) const {
    if (arc.empty()) return {};
    const std::uint64_t key = arc.front();
    if (dcur == 2) {
      const double target = std::cbrt(static_cast<double>(arc.size()));
      return select_within(arc, target, derive_seed(seed, kArcTag + 2, key), retries);
    }
    std::vector<std::size_t> uni;
    for (const auto& sub : split_arcs(arc, arc_cells(R, dcur - 1), R)) {
      auto part = build(dcur - 1, sub);
      uni.insert(uni.end(), part.begin(), part.end());
    }
    if (uni.empty()) return {};
    const double target = std::pow(static_cast<double>(uni.size()), gamma(dcur - 1) / gamma(dcur));
    return select_within(uni, target, derive_seed(seed, kThinTag + static_cast<std::uint64_t>(dcur), key),
                         retries);
  }
};

}  // namespace

std::string_view to_string(ConstructionMethod method) {
  switch (method) {
    case ConstructionMethod::Capwise: return "capwise";
    case ConstructionMethod::Squares: return "squares";
    case ConstructionMethod::Hyperbolic: return "hyperbolic";
    case ConstructionMethod::Moment: return "moment";
    case ConstructionMethod::Smallcap: return "smallcap";
    case ConstructionMethod::FullgridSelect: return "fullgrid-select";
    case ConstructionMethod::Fullgrid: return "fullgrid";
  }
  return "unknown";
}

ConstructionMethod parse_construction_method(std::string_view name) {
  if (name == "capwise") return ConstructionMethod::Capwise;
  if (name == "squares") return ConstructionMethod::Squares;
  if (name == "hyperbolic") return ConstructionMethod::Hyperbolic;
  if (name == "moment") return ConstructionMethod::Moment;
  if (name == "smallcap") return ConstructionMethod::Smallcap;
  if (name == "fullgrid-select") return ConstructionMethod::FullgridSelect;
  if (name == "fullgrid") return ConstructionMethod::Fullgrid;
  throw InvalidArgument("unknown construction method: " + std::string(name));
}

nlohmann::json ConstructionParams::to_json() const {
  return {{"method", to_string(method)},
          {"manifold", to_string(kind)},
          {"d", d},
          {"R", R},
          {"p", p},
          {"seed", seed},
          {"retries", retries},
          {"per_cap_target", per_cap_target},
          {"total_target", total_target},
          {"window", {window.first, window.second}},
          {"audit", audit}};
}

FrequencySet capwise_build(const ManifoldSpec& spec, std::int64_t R, std::uint64_t seed,
                           std::size_t retries) {
  if (spec.m() != spec.d() - 1 || spec.kind() == ManifoldKind::Lattice)
    throw InvalidArgument("capwise_build needs a hypersurface");
  const std::int64_t root = exact_root(R, 2);
  if (root < 1) throw InvalidArgument("capwise_build needs R to be a perfect square");
  const double pd = 2.0 * (spec.d() + 1) / (spec.d() - 1);
  const FrequencySet grid = full_grid(spec, R);
  const CapPartition caps = cap_grid(grid, root);

  ConstructionParams params;
  params.method = ConstructionMethod::Capwise;
  params.kind = spec.kind();
  params.d = spec.d();
  params.R = R;
  params.p = pd;
  params.seed = seed;
  params.retries = retries;
  std::vector<double> targets(caps.caps.size());
  for (std::size_t c = 0; c < caps.caps.size(); ++c) {
    targets[c] = std::pow(static_cast<double>(caps.caps[c].members.size()), 2.0 / pd);
    params.total_target += targets[c];
  }
  params.per_cap_target = std::pow(static_cast<double>(R), (spec.d() - 1) / pd);
  params.window = {0.5 * params.total_target, 1.5 * params.total_target};
  params.audit = {{"caps", caps.caps.size()}, {"cap_side", 1.0 / static_cast<double>(root)}};

  for (std::size_t attempt = 0; attempt <= retries; ++attempt) {
    const std::uint64_t s = attempt == 0 ? seed : derive_seed(seed, kAttemptTag, attempt);
    std::vector<std::vector<std::size_t>> picked(caps.caps.size());
    parallel_for(caps.caps.size(), [&](std::size_t c) {
      picked[c] = select_within(caps.caps[c].members, targets[c], derive_seed(s, kCapTag, c), retries);
    });
    std::vector<std::size_t> all;
    for (const auto& v : picked) all.insert(all.end(), v.begin(), v.end());
    if (inside(all.size(), params.window)) {
      params.audit["attempt"] = attempt;
      return finish(grid, std::move(all), params);
    }
  }
  throw ValidationFailure("capwise_build: total size never entered its window");
}

FrequencySet squares_build(std::int64_t R, const ManifoldSpec& spec) {
  if (spec.m() != 2 || !spec.unit_cube_domain())
    throw InvalidArgument("squares_build needs a 2-dimensional base on the unit square");
  const std::int64_t r2 = exact_root(R, 2);
  const std::int64_t r4 = exact_root(R, 4);
  if (r2 < 2 || r4 < 2) throw InvalidArgument("squares_build needs R^{1/4} to be an integer >= 2");

  std::vector<std::int64_t> lat;
  for (std::int64_t i = 0; i < r2 - 1; ++i)
    for (std::int64_t n = 1; n < r4; ++n)
      for (std::int64_t j = 0; j < r2 - 1; ++j)
        for (std::int64_t k = 1; k < r4; ++k) {
          lat.push_back(i * r2 + n * n);
          lat.push_back(j * r2 + k * k);
        }
  ConstructionParams params;
  params.method = ConstructionMethod::Squares;
  params.kind = spec.kind();
  params.d = spec.d();
  params.R = R;
  params.p = 4.0;
  params.total_target = static_cast<double>((r2 - 1) * (r2 - 1) * (r4 - 1) * (r4 - 1));
  params.window = {params.total_target, params.total_target};
  Provenance prov;
  prov.method = "squares";
  prov.params = params.to_json();
  FrequencySet out(spec, R, std::move(lat), std::move(prov));
  check_total(out.size(), params);
  return out;
}

HyperbolicBuild hyperbolic_build(std::int64_t R, std::uint64_t seed, const FamilyValidator& validator,
                                 std::size_t retries) {
  const ManifoldSpec spec(ManifoldKind::HyperbolicParaboloid, 3);
  const DyadicCover cover(R);
  const FrequencySet grid = full_grid(spec, R);
  const auto family = cover.members(grid);
  FamilySelection sel = family_select(grid, family, 4.0, seed, validator, retries);

  ConstructionParams params;
  params.method = ConstructionMethod::Hyperbolic;
  params.kind = spec.kind();
  params.d = 3;
  params.R = R;
  params.p = 4.0;
  params.seed = seed;
  params.retries = retries;
  params.per_cap_target = std::sqrt(static_cast<double>(R));
  params.total_target = static_cast<double>(grid.size()) * sel.delta;
  params.window = {0.5 * params.total_target, 1.5 * params.total_target};
  nlohmann::json bounds = nlohmann::json::array();
  nlohmann::json sizes = nlohmann::json::array();
  for (const MemberProbe& row : sel.table) {
    bounds.push_back(row.bound);
    sizes.push_back(row.size);
  }
  params.audit = {{"success", sel.success},
                  {"draws", sel.draws},
                  {"accepted_draw", sel.accepted_draw},
                  {"size_history", sel.size_history},
                  {"threshold", sel.threshold},
                  {"worst", sel.worst},
                  {"rectangles", family.size()},
                  {"levels", cover.levels()},
                  {"rectangle_sizes", sizes},
                  {"rectangle_bounds", bounds}};
  FrequencySet set = finish(grid, sel.indices, params);
  return {std::move(set), std::move(sel)};
}

FrequencySet moment_build(int d, std::int64_t R, std::uint64_t seed, std::size_t retries) {
  if (d < 2 || d > 4) throw InvalidArgument("moment_build supports 2 <= d <= 4");
  const ManifoldSpec spec(ManifoldKind::MomentCurve, d);
  const FrequencySet grid = full_grid(spec, R);
  for (int j = 2; j <= d; ++j)
    if (R / arc_cells(R, j) < 1) throw InvalidArgument("moment_build: arcs would be empty");

  ConstructionParams params;
  params.method = ConstructionMethod::Moment;
  params.kind = spec.kind();
  params.d = d;
  params.R = R;
  params.p = gamma(d);
  params.seed = seed;
  params.retries = retries;
  params.total_target = std::pow(static_cast<double>(R), 2.0 * d / gamma(d));
  params.per_cap_target = std::pow(static_cast<double>(R), 2.0 * d / gamma(d) - 1.0 / d);
  params.window = {0.5 * params.total_target, 1.5 * params.total_target};
  nlohmann::json arcs = nlohmann::json::array();
  for (int j = 2; j <= d; ++j) arcs.push_back(arc_cells(R, j));
  params.audit = {{"arcs_per_level", arcs}};

  // Grid index equals the lattice value n for the moment curve.
  std::vector<std::size_t> all(grid.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto top = split_arcs(all, arc_cells(R, d), R);

  for (std::size_t attempt = 0; attempt <= retries; ++attempt) {
    const std::uint64_t s = attempt == 0 ? seed : derive_seed(seed, kAttemptTag, attempt);
    const MomentRecursion rec{R, s, retries};
    std::vector<std::vector<std::size_t>> picked(top.size());
    parallel_for(top.size(), [&](std::size_t t) { picked[t] = rec.build(d, top[t]); });
    std::vector<std::size_t> uni;
    for (const auto& v : picked) uni.insert(uni.end(), v.begin(), v.end());
    if (inside(uni.size(), params.window)) {
      params.audit["attempt"] = attempt;
      return finish(grid, std::move(uni), params);
    }
  }
  throw ValidationFailure("moment_build: total size never entered its window");
}

FrequencySet smallcap_build(int d, std::int64_t R, double p, std::uint64_t seed, std::size_t retries) {
  double beta = 0.0;
  if (d == 2) {
    if (!(p >= 4.0 && p < 6.0)) throw InvalidArgument("smallcap d=2 needs 4 <= p < 6");
    beta = 2.0 / (p - 2.0);
  } else if (d == 3) {
    if (!(p >= 10.0 && p < 12.0)) throw InvalidArgument("smallcap d=3 needs 10 <= p < 12");
    beta = 2.0 / (p - 6.0);
  } else {
    throw InvalidArgument("smallcap_build supports d = 2 or 3");
  }
  const ManifoldSpec spec(ManifoldKind::MomentCurve, d);
  const FrequencySet grid = full_grid(spec, R);
  const CapPartition arcs = cap_partition(grid, beta);

  ConstructionParams params;
  params.method = ConstructionMethod::Smallcap;
  params.kind = spec.kind();
  params.d = d;
  params.R = R;
  params.p = p;
  params.seed = seed;
  params.retries = retries;
  params.total_target = std::pow(static_cast<double>(R), 2.0 * d / p);
  params.per_cap_target = d == 2 ? std::pow(std::pow(static_cast<double>(R), 1.0 - beta), 2.0 / p)
                                 : std::pow(std::pow(static_cast<double>(R), 2.0 / 3.0 - beta), 6.0 / p);
  params.window = {0.5 * params.total_target, 1.5 * params.total_target};
  params.audit = {{"beta", beta}, {"arcs", arcs.caps.size()}};

  for (std::size_t attempt = 0; attempt <= retries; ++attempt) {
    const std::uint64_t s = attempt == 0 ? seed : derive_seed(seed, kAttemptTag, attempt);
    std::vector<std::vector<std::size_t>> picked(arcs.caps.size());
    parallel_for(arcs.caps.size(), [&](std::size_t c) {
      const auto& members = arcs.caps[c].members;
      const std::uint64_t cs = derive_seed(s, kCapTag, c);
      if (d == 2) {
        picked[c] = select_within(members, std::pow(static_cast<double>(members.size()), 2.0 / p), cs, retries);
        return;
      }
      const MomentRecursion rec{R, cs, retries};
      std::vector<std::size_t> uni;
      for (const auto& sub : split_arcs(members, arc_cells(R, 2), R)) {
        auto part = rec.build(2, sub);
        uni.insert(uni.end(), part.begin(), part.end());
      }
      if (uni.empty()) return;
      picked[c] = select_within(uni, std::pow(static_cast<double>(uni.size()), 6.0 / p),
                                derive_seed(cs, kThinTag), retries);
    });
    std::vector<std::size_t> all;
    for (const auto& v : picked) all.insert(all.end(), v.begin(), v.end());
    if (inside(all.size(), params.window)) {
      params.audit["attempt"] = attempt;
      return finish(grid, std::move(all), params);
    }
  }
  throw ValidationFailure("smallcap_build: total size never entered its window");
}

FrequencySet fullgrid_select(const ManifoldSpec& spec, std::int64_t R, double p, std::uint64_t seed,
                             std::size_t retries) {
  if (!(p >= 2.0)) throw InvalidArgument("fullgrid_select needs p >= 2");
  const FrequencySet grid = full_grid(spec, R);
  const double M = static_cast<double>(grid.size());
  ConstructionParams params;
  params.method = ConstructionMethod::FullgridSelect;
  params.kind = spec.kind();
  params.d = spec.d();
  params.R = R;
  params.p = p;
  params.seed = seed;
  params.retries = retries;
  const double delta = selection_density(M, 1.0, 2.0, p);
  params.total_target = M * delta;
  params.window = size_window(M, delta);
  const Selection sel = bernoulli_indices(grid.size(), delta, seed, retries);
  params.audit = {{"delta", delta}, {"draw", sel.draw}, {"size_history", sel.size_history}};
  return finish(grid, sel.indices, params);
}

FrequencySet build(const ConstructionParams& params) {
  const ManifoldSpec spec(params.kind, params.d);
  switch (params.method) {
    case ConstructionMethod::Capwise:
      return capwise_build(spec, params.R, params.seed, params.retries);
    case ConstructionMethod::Squares:
      return squares_build(params.R, spec);
    case ConstructionMethod::Hyperbolic: {
      HyperbolicBuild hb = hyperbolic_build(params.R, params.seed, {}, params.retries);
      if (!hb.selection.success)
        throw ValidationFailure("hyperbolic_build: no draw passed validation (worst probe " +
                                std::to_string(hb.selection.worst) + ", threshold " +
                                std::to_string(hb.selection.threshold) + ")");
      return std::move(hb.set);
    }
    case ConstructionMethod::Moment:
      return moment_build(params.d, params.R, params.seed, params.retries);
    case ConstructionMethod::Smallcap:
      return smallcap_build(params.d, params.R, params.p, params.seed, params.retries);
    case ConstructionMethod::FullgridSelect:
      return fullgrid_select(spec, params.R, params.p, params.seed, params.retries);
    case ConstructionMethod::Fullgrid:
      return full_grid(spec, params.R);
  }
  throw InvalidArgument("unknown construction method");
}

}  // namespace lambda_lab
