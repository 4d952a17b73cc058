#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "lambda_lab/construct.hpp"
#include "lambda_lab/error.hpp"
#include "lambda_lab/partition.hpp"

using namespace lambda_lab;

namespace {

void check_on_lattice(const FrequencySet& f) {
  const ManifoldSpec& spec = f.spec();
  std::set<std::vector<std::int64_t>> seen;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto n = f.lattice(i);
    CHECK(spec.contains(n, f.R()));
    for (int a = 0; a < f.m(); ++a) CHECK(f.frequency(i)[static_cast<std::size_t>(a)] == static_cast<double>(n[static_cast<std::size_t>(a)]));
    CHECK(seen.insert({n.begin(), n.end()}).second);
  }
}

bool same_points(const FrequencySet& a, const FrequencySet& b) {
  if (a.size() != b.size()) return false;
  return std::equal(a.lattice_data().begin(), a.lattice_data().end(), b.lattice_data().begin());
}

double window_lo(const FrequencySet& f) { return f.provenance().params.at("window")[0].get<double>(); }
double window_hi(const FrequencySet& f) { return f.provenance().params.at("window")[1].get<double>(); }

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]) / static_cast<double>(x.size());
    my += std::log(y[i]) / static_cast<double>(x.size());
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

}  // namespace

TEST_CASE("capwise: paraboloid d=3 R=64 targets 64 caps of 8") {
  const ManifoldSpec spec(ManifoldKind::EllipticParaboloid, 3);
  const FrequencySet f = capwise_build(spec, 64, 1);
  const auto& params = f.provenance().params;
  CHECK(params.at("per_cap_target").get<double>() == doctest::Approx(8.0));
  CHECK(params.at("total_target").get<double>() == doctest::Approx(512.0));
  CHECK(params.at("audit").at("caps") == 64);
  CHECK(f.size() >= 256);
  CHECK(f.size() <= 768);
  check_on_lattice(f);
  CHECK(f.provenance().method == "capwise");
}

TEST_CASE("capwise: small examples") {
  const FrequencySet arcs = capwise_build(ManifoldSpec(ManifoldKind::EllipticParaboloid, 2), 64, 2);
  CHECK(arcs.provenance().params.at("total_target").get<double>() == doctest::Approx(16.0));
  CHECK(arcs.size() >= 8);
  CHECK(arcs.size() <= 24);

  const FrequencySet tiny = capwise_build(ManifoldSpec(ManifoldKind::EllipticParaboloid, 3), 4, 3);
  CHECK(tiny.provenance().params.at("audit").at("caps") == 4);
  CHECK(tiny.provenance().params.at("total_target").get<double>() == doctest::Approx(8.0));
  CHECK(tiny.size() >= 4);
  CHECK(tiny.size() <= 12);

  CHECK_THROWS_AS(capwise_build(ManifoldSpec(ManifoldKind::EllipticParaboloid, 3), 50, 0), InvalidArgument);
  CHECK_THROWS_AS(capwise_build(ManifoldSpec(ManifoldKind::MomentCurve, 3), 64, 0), InvalidArgument);
}

TEST_CASE("capwise: base selection does not depend on the tail") {
  const FrequencySet ell = capwise_build(ManifoldSpec(ManifoldKind::EllipticParaboloid, 3), 64, 17);
  const FrequencySet hyp = capwise_build(ManifoldSpec(ManifoldKind::HyperbolicParaboloid, 3), 64, 17);
  CHECK(same_points(ell, hyp));
}

TEST_CASE("capwise: per-cap counts stay near the per-cap target") {
  const FrequencySet f = capwise_build(ManifoldSpec(ManifoldKind::EllipticParaboloid, 3), 256, 5);
  const CapPartition caps = cap_grid(f, 16);
  CHECK(caps.caps.size() <= 256);
  for (const Cap& c : caps.caps) {
    CHECK(c.members.size() >= 8);   // target 16, window [8, 24]
    CHECK(c.members.size() <= 24);
  }
}

TEST_CASE("squares: exact sizes and deterministic output") {
  const FrequencySet s16 = squares_build(16);
  CHECK(s16.size() == 9);
  const FrequencySet s81 = squares_build(81);
  CHECK(s81.size() == 256);
  CHECK(same_points(s81, squares_build(81)));
  check_on_lattice(s81);
  for (std::int64_t R : {16, 81, 256, 625}) {
    const FrequencySet s = squares_build(R);
    const auto r2 = static_cast<std::size_t>(std::llround(std::sqrt(R)));
    const auto r4 = static_cast<std::size_t>(std::llround(std::sqrt(std::sqrt(R))));
    CHECK(s.size() == (r2 - 1) * (r2 - 1) * (r4 - 1) * (r4 - 1));
    for (std::int64_t v : s.lattice_data()) CHECK(v < R);
  }
  // R = 16: i, j in {0,1,2}, n = m = 1 gives base points 4i + 1.
  std::set<std::int64_t> xs;
  for (std::size_t i = 0; i < s16.size(); ++i) xs.insert(s16.lattice(i)[0]);
  CHECK(xs == std::set<std::int64_t>{1, 5, 9});
  CHECK_THROWS_AS(squares_build(64), InvalidArgument);
}

TEST_CASE("moment: sizes at R = 4096 and lattice exactness") {
  const FrequencySet g2 = moment_build(2, 4096, 1);
  CHECK(g2.provenance().params.at("total_target").get<double>() == doctest::Approx(256.0));
  CHECK(g2.size() >= 128);
  CHECK(g2.size() <= 384);
  check_on_lattice(g2);

  const FrequencySet g3 = moment_build(3, 4096, 1);
  CHECK(g3.provenance().params.at("total_target").get<double>() == doctest::Approx(64.0));
  CHECK(g3.provenance().params.at("per_cap_target").get<double>() == doctest::Approx(4.0));
  CHECK(g3.size() >= 32);
  CHECK(g3.size() <= 96);
  check_on_lattice(g3);
  for (std::size_t i = 0; i < g3.size(); ++i) {
    const double n = static_cast<double>(g3.lattice(i)[0]);
    CHECK(g3.frequency(i)[1] == doctest::Approx(n * n / 4096.0));
    CHECK(g3.frequency(i)[2] == doctest::Approx(n * n * n / (4096.0 * 4096.0)));
  }
  CHECK(same_points(g3, moment_build(3, 4096, 1)));
  CHECK_THROWS_AS(moment_build(5, 4096, 0), InvalidArgument);
}

TEST_CASE("smallcap: d = 2 examples") {
  const FrequencySet full = smallcap_build(2, 64, 4.0, 0);
  CHECK(full.size() == 64);
  CHECK(full.provenance().params.at("audit").at("arcs") == 64);

  const FrequencySet f = smallcap_build(2, 4096, 5.0, 3);
  CHECK(f.provenance().params.at("audit").at("arcs") == 256);
  CHECK(f.provenance().params.at("total_target").get<double>() == doctest::Approx(std::pow(4096.0, 0.8)));
  CHECK(static_cast<double>(f.size()) >= window_lo(f));
  CHECK(static_cast<double>(f.size()) <= window_hi(f));
  check_on_lattice(f);
  CHECK_THROWS_AS(smallcap_build(2, 64, 6.0, 0), InvalidArgument);
  CHECK_THROWS_AS(smallcap_build(3, 64, 9.0, 0), InvalidArgument);
  CHECK_THROWS_AS(smallcap_build(4, 64, 10.0, 0), InvalidArgument);
}

TEST_CASE("smallcap: size exponent 2d/p over three scales") {
  std::vector<double> Rs{512, 4096, 32768}, sizes;
  for (double R : Rs) sizes.push_back(static_cast<double>(smallcap_build(2, static_cast<std::int64_t>(R), 5.0, 21).size()));
  CHECK(std::abs(loglog_slope(Rs, sizes) - 0.8) <= 0.05);
}

TEST_CASE("smallcap: d = 3 stays in its window") {
  const FrequencySet f = smallcap_build(3, 4096, 11.0, 4);
  CHECK(static_cast<double>(f.size()) >= window_lo(f));
  CHECK(static_cast<double>(f.size()) <= window_hi(f));
  check_on_lattice(f);
}

TEST_CASE("hyperbolic: R = 16 build, multiplicity and audit") {
  const HyperbolicBuild hb = hyperbolic_build(16, 2);
  const auto& audit = hb.set.provenance().params.at("audit");
  CHECK(audit.at("levels") == 5);
  CHECK(audit.at("rectangles") == 80);
  CHECK(audit.at("rectangle_bounds").size() == 80);
  CHECK(hb.selection.table.size() == 80);
  CHECK(hb.set.provenance().params.at("total_target").get<double>() == doctest::Approx(64.0));
  const DyadicCover cover = dyadic_cover(16);
  for (std::size_t i = 0; i < hb.set.size(); ++i) {
    const auto n = hb.set.lattice(i);
    CHECK(cover.membership(n[0], n[1]).size() == 5);
  }
  if (hb.selection.success) {
    CHECK(hb.set.size() >= 32);
    CHECK(hb.set.size() <= 96);
  }
}

TEST_CASE("build: dispatch and determinism") {
  ConstructionParams p;
  p.method = ConstructionMethod::FullgridSelect;
  p.kind = ManifoldKind::EllipticParaboloid;
  p.d = 3;
  p.R = 32;
  p.p = 4.0;
  p.seed = 8;
  const FrequencySet a = build(p);
  const FrequencySet b = build(p);
  CHECK(same_points(a, b));
  CHECK(a.provenance().params.at("audit").at("delta").get<double>() == doctest::Approx(1.0 / 32));
  check_on_lattice(a);

  p.seed = 9;
  CHECK_FALSE(same_points(a, build(p)));

  p.method = ConstructionMethod::Fullgrid;
  CHECK(build(p).size() == 1024);
  p.method = ConstructionMethod::Squares;
  p.R = 81;
  CHECK(build(p).size() == 256);
  p.method = ConstructionMethod::Capwise;
  p.R = 64;
  CHECK(same_points(build(p), capwise_build(ManifoldSpec(ManifoldKind::EllipticParaboloid, 3), 64, 9)));

  CHECK(parse_construction_method("fullgrid-select") == ConstructionMethod::FullgridSelect);
  CHECK_THROWS_AS(parse_construction_method("rudin"), InvalidArgument);
  const auto j = p.to_json();
  CHECK(j.at("method") == "capwise");
  CHECK(j.at("R") == 64);
}
