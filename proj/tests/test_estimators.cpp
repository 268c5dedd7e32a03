#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bmc/bandwidth_rot.hpp"
#include "bmc/bar_model.hpp"
#include "bmc/error.hpp"
#include "bmc/estimators.hpp"
#include "bmc/io.hpp"
#include "bmc/kernel.hpp"
#include "bmc/rng.hpp"
#include "test_support.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

using namespace bmc;
using testsupport::gauss;

namespace {

const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

TriangleColumns
columns_of(const std::vector<Triangle>& ts)
{
  TriangleColumns c;
  for (const auto& t : ts)
    c.push_back(t);
  return c;
}

// Naive left-to-right sums, the brute-force reference for the estimators.
double
naive_mu(const std::vector<Triangle>& ts, double h, double x)
{
  double s = 0.0;
  for (const auto& t : ts)
    s += gauss((x - t.parent) / h, 0, 1);
  return s / (static_cast<double>(ts.size()) * h);
}

double
naive_mu_tri(const std::vector<Triangle>& ts, const BandwidthTriple& bw, double x, double x0,
             double x1)
{
  double s = 0.0;
  for (const auto& t : ts)
    s += gauss((x - t.parent) / bw.h, 0, 1) * gauss((x0 - t.child0) / bw.h0, 0, 1) *
         gauss((x1 - t.child1) / bw.h1, 0, 1);
  return s / (static_cast<double>(ts.size()) * bw.product());
}

std::vector<Triangle>
random_triangles(std::size_t n, std::uint64_t seed)
{
  CounterStream rng(seed);
  std::vector<Triangle> ts(n);
  for (auto& t : ts) {
    t.parent = rng.normal_pair().first;
    t.child0 = 0.5 * t.parent + rng.normal_pair().first;
    t.child1 = 0.5 * t.parent + rng.normal_pair().first;
  }
  return ts;
}

} // namespace

TEST_CASE("kernel constants")
{
  CHECK(GaussianKernel::value(0.0) == doctest::Approx(inv_sqrt_2pi).epsilon(1e-15));
  CHECK(GaussianKernel::l2_norm_squared() == doctest::Approx(0.5 / std::sqrt(std::numbers::pi)));
  const double l2 = testsupport::simpson(
    [](double t) { return GaussianKernel::value(t) * GaussianKernel::value(t); }, -20, 20, 4000);
  CHECK(l2 == doctest::Approx(GaussianKernel::l2_norm_squared()).epsilon(1e-12));
  const double k2 = testsupport::simpson(
    [](double t) { return t * t * GaussianKernel::value(t); }, -20, 20, 4000);
  CHECK(k2 == doctest::Approx(GaussianKernel::second_moment()).epsilon(1e-12));
  // Self-convolution against direct quadrature at a few offsets.
  for (double t : { 0.0, 0.7, -2.3 }) {
    const double conv = testsupport::simpson(
      [&](double s) { return GaussianKernel::value(s) * GaussianKernel::value(t - s); }, -20, 20,
      4000);
    CHECK(GaussianKernel::self_convolution(t) == doctest::Approx(conv).epsilon(1e-12));
  }
}

TEST_CASE("single-point values")
{
  TriangleEstimator one(columns_of({ { 0.3, -0.1, 0.9 } }));
  CHECK(one.mu_hat(0.4, 0.3) == doctest::Approx(inv_sqrt_2pi / 0.4).epsilon(1e-15));
  TriangleEstimator origin(columns_of({ { 0.0, 0.0, 0.0 } }));
  CHECK(origin.mu_tri_hat({ 1, 1, 1 }, 0, 0, 0) ==
        doctest::Approx(std::pow(2.0 * std::numbers::pi, -1.5)).epsilon(1e-15));
}

TEST_CASE("estimators match brute force")
{
  const auto ts = random_triangles(300, 7);
  TriangleEstimator est(columns_of(ts));
  const BandwidthTriple bw{ 0.3, 0.45, 0.6 };
  for (double x : { -1.0, 0.0, 0.4 })
    for (double x0 : { -0.5, 0.2 })
      for (double x1 : { 0.0, 1.3 }) {
        CHECK(est.mu_hat(0.35, x) == doctest::Approx(naive_mu(ts, 0.35, x)).epsilon(1e-13));
        const double tri = naive_mu_tri(ts, bw, x, x0, x1);
        CHECK(est.mu_tri_hat(bw, x, x0, x1) == doctest::Approx(tri).epsilon(1e-13));
        CHECK(est.p_hat(bw, 0.35, x, x0, x1) ==
              doctest::Approx(tri / naive_mu(ts, 0.35, x)).epsilon(1e-13));
      }
}

TEST_CASE("normalisation equivalence")
{
  // (1 / (N h^(1/2))) sum K_h with K_h = h^(-1/2) K0(./h) is the usual 1/(N h) form.
  const auto ts = random_triangles(64, 3);
  TriangleEstimator est(columns_of(ts));
  CounterStream rng(99);
  for (int rep = 0; rep < 20; ++rep) {
    const double h = 0.05 + rng.uniform();
    const double x = 3.0 * (rng.uniform() - 0.5);
    double s = 0.0;
    for (const auto& t : ts)
      s += std::pow(h, -0.5) * GaussianKernel::value((x - t.parent) / h);
    const double scaled = s / (static_cast<double>(ts.size()) * std::sqrt(h));
    CHECK(est.mu_hat(h, x) == doctest::Approx(scaled).epsilon(1e-14));
  }
}

TEST_CASE("estimators carry unit mass")
{
  const auto ts = random_triangles(40, 11);
  TriangleEstimator est(columns_of(ts));
  const double m1 =
    testsupport::simpson([&](double x) { return est.mu_hat(0.4, x); }, -12, 12, 4000);
  CHECK(m1 == doctest::Approx(1.0).epsilon(1e-8));
  const BandwidthTriple bw{ 0.5, 0.6, 0.7 };
  const double m3 = testsupport::simpson3(
    [&](double x, double y, double z) { return est.mu_tri_hat(bw, x, y, z); }, -9, 9, 90);
  CHECK(m3 == doctest::Approx(1.0).epsilon(1e-5));
  for (double x : { -3.0, 0.0, 2.0 })
    CHECK(est.mu_hat(0.2, x) >= 0.0);
}

TEST_CASE("vector bandwidth specialises to the scalar one")
{
  const auto ts = random_triangles(50, 5);
  TriangleEstimator est(columns_of(ts));
  const double h = 0.37;
  double s = 0.0;
  for (const auto& t : ts)
    s += GaussianKernel::value((0.1 - t.parent) / h) * GaussianKernel::value((0.2 - t.child0) / h) *
         GaussianKernel::value((-0.3 - t.child1) / h);
  const double scalar = s / (static_cast<double>(ts.size()) * h * h * h);
  CHECK(est.mu_tri_hat(BandwidthTriple::uniform(h), 0.1, 0.2, -0.3) ==
        doctest::Approx(scalar).epsilon(1e-14));
}

TEST_CASE("quotient of identical triangles")
{
  const double c = 0.8;
  TriangleEstimator est(columns_of({ { c, c, c }, { c, c, c } }));
  const BandwidthTriple bw{ 0.3, 0.4, 0.5 };
  const double hd = 0.6;
  const double num = 2.0 * std::pow(2.0 * std::numbers::pi, -1.5) / (2.0 * 0.3 * 0.4 * 0.5);
  const double den = 2.0 * inv_sqrt_2pi / (2.0 * hd);
  CHECK(est.mu_tri_hat(bw, c, c, c) == doctest::Approx(num).epsilon(1e-15));
  CHECK(est.mu_hat(hd, c) == doctest::Approx(den).epsilon(1e-15));
  CHECK(est.p_hat(bw, hd, c, c, c) == doctest::Approx(num / den).epsilon(1e-15));
}

TEST_CASE("degenerate denominator gives zero")
{
  TriangleEstimator est(columns_of({ { 0.0, 0.0, 0.0 } }));
  CHECK(est.mu_hat(1.0, 1e3) == 0.0);
  CHECK(est.p_hat({ 1e3, 1e3, 1e3 }, 1.0, 1e3, 0.0, 0.0) == 0.0);
  CHECK(est.p_hat({ 1, 1, 1 }, 1.0, 0.0, 0.0, 0.0) > 0.0);
}

TEST_CASE("argument checks")
{
  TriangleEstimator est(columns_of({ { 0.0, 0.0, 0.0 } }));
  CHECK_THROWS_AS(est.mu_hat(0.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(est.mu_hat(-1.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(est.mu_tri_hat({ 1, INFINITY, 1 }, 0, 0, 0), InvalidArgument);
  TriangleEstimator empty{ TriangleColumns{} };
  CHECK_THROWS_AS(empty.mu_hat(1.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(empty.mu_tri_hat({ 1, 1, 1 }, 0, 0, 0), InvalidArgument);
  CHECK(parse_estimator_kind("mu_tri") == EstimatorKind::mu_triangle);
  CHECK_THROWS_AS(parse_estimator_kind("nope"), InvalidArgument);
}

TEST_CASE("linearity over disjoint populations")
{
  const auto a = random_triangles(30, 1);
  const auto b = random_triangles(70, 2);
  auto ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  TriangleEstimator ea(columns_of(a)), eb(columns_of(b)), eab(columns_of(ab));
  for (double x : { -0.7, 0.5 }) {
    const double mix = (30.0 * ea.mu_hat(0.3, x) + 70.0 * eb.mu_hat(0.3, x)) / 100.0;
    CHECK(eab.mu_hat(0.3, x) == doctest::Approx(mix).epsilon(1e-14));
    const BandwidthTriple bw{ 0.4, 0.4, 0.4 };
    const double mix3 =
      (30.0 * ea.mu_tri_hat(bw, x, 0.1, 0.2) + 70.0 * eb.mu_tri_hat(bw, x, 0.1, 0.2)) / 100.0;
    CHECK(eab.mu_tri_hat(bw, x, 0.1, 0.2) == doctest::Approx(mix3).epsilon(1e-14));
  }
}

TEST_CASE("quotient is invariant to a common weight on every triangle")
{
  // Duplicating every triangle doubles both kernel sums and leaves the quotient alone.
  const auto a = random_triangles(45, 9);
  auto twice = a;
  twice.insert(twice.end(), a.begin(), a.end());
  TriangleEstimator e1(columns_of(a)), e2(columns_of(twice));
  const BandwidthTriple bw{ 0.3, 0.5, 0.4 };
  for (double x : { -0.4, 0.9 })
    CHECK(e2.p_hat(bw, 0.6, x, 0.3, -0.2) ==
          doctest::Approx(e1.p_hat(bw, 0.6, x, 0.3, -0.2)).epsilon(1e-14));
}

TEST_CASE("tree-level wrappers")
{
  const TreeSample s = simulate({ 0.7, 0.5, 0, 0, 1, 0 }, 4, InitSpec::dirac(0.0), 3);
  const auto gen = triangles(s, Population::generation);
  const auto all = triangles(s, Population::tree);
  CHECK(mu_hat(s, Population::generation, 0.5, 0.1) ==
        doctest::Approx(naive_mu(gen, 0.5, 0.1)).epsilon(1e-14));
  CHECK(mu_hat(s, Population::tree, 0.5, 0.1) ==
        doctest::Approx(naive_mu(all, 0.5, 0.1)).epsilon(1e-14));
  const BandwidthTriple bw{ 0.5, 0.6, 0.7 };
  CHECK(mu_tri_hat(s, Population::tree, bw, 0.1, 0.2, 0.3) ==
        doctest::Approx(naive_mu_tri(all, bw, 0.1, 0.2, 0.3)).epsilon(1e-14));
  CHECK(p_hat(s, Population::generation, bw, 0.4, 0.1, 0.2, 0.3) ==
        doctest::Approx(naive_mu_tri(gen, bw, 0.1, 0.2, 0.3) / naive_mu(gen, 0.4, 0.1))
          .epsilon(1e-14));
}

TEST_CASE("grid evaluation equals pointwise calls")
{
  const TreeSample s = simulate({ 0.7, 0.5, 0, 0, 1, 0 }, 12, InitSpec::dirac(0.0), 21);
  TriangleEstimator est(s, Population::generation);
  EstimatorSpec spec;
  spec.numerator = { 0.2, 0.25, 0.3 };
  spec.denominator_h = 0.22;

  const auto one = evaluate_on_grid(est, spec, { { 0.1, 0.2, 0.3 } });
  REQUIRE(one.values.size() == 1);
  CHECK(one.values[0] == est.p_hat(spec.numerator, spec.denominator_h, 0.1, 0.2, 0.3));
  CHECK(one.sample_size == 4096);

  const std::vector<GridPoint> three{ { 1, 0, 0 }, { -1, 0.5, 0 }, { 0, 0, 0 } };
  for (EstimatorKind kind :
       { EstimatorKind::mu, EstimatorKind::mu_triangle, EstimatorKind::transition }) {
    spec.kind = kind;
    const auto r = evaluate_on_grid(est, spec, three, 3);
    for (std::size_t i = 0; i < 3; ++i) {
      const auto& p = three[i];
      const double expect = kind == EstimatorKind::mu ? est.mu_hat(0.22, p[0])
                            : kind == EstimatorKind::mu_triangle
                              ? est.mu_tri_hat(spec.numerator, p[0], p[1], p[2])
                              : est.p_hat(spec.numerator, 0.22, p[0], p[1], p[2]);
      CHECK(r.values[i] == expect);
      CHECK(r.points[i] == p);
    }
  }

  // 51^3 grid over [-3, 3]^3, spot checked at random points.
  spec.kind = EstimatorKind::transition;
  std::vector<GridPoint> big;
  for (int i = 0; i < 51; ++i)
    for (int j = 0; j < 51; ++j)
      for (int k = 0; k < 51; ++k)
        big.push_back({ -3.0 + 0.12 * i, -3.0 + 0.12 * j, -3.0 + 0.12 * k });
  const auto r = evaluate_on_grid(est, spec, big, 4);
  REQUIRE(r.values.size() == big.size());
  CounterStream rng(5);
  for (int t = 0; t < 10; ++t) {
    const std::size_t i = rng.below(big.size());
    const auto& p = big[i];
    CHECK(r.values[i] == est.p_hat(spec.numerator, 0.22, p[0], p[1], p[2]));
  }
  CHECK_THROWS_AS(evaluate_on_grid(est, spec, {}), InvalidArgument);
}

TEST_CASE("density estimate files")
{
  TriangleEstimator est(columns_of({ { 0, 0, 0 }, { 1, 1, 1 } }));
  EstimatorSpec spec;
  spec.kind = EstimatorKind::mu;
  spec.denominator_h = 0.5;
  const auto r = evaluate_on_grid(est, spec, { { 0.25, 0, 0 }, { 0.5, 0, 0 } });
  const auto dir = std::filesystem::temp_directory_path();
  const std::string csv = (dir / "bmc_est.csv").string();
  const std::string json = (dir / "bmc_est.json").string();
  write_density_estimate(r, csv, json);
  const std::string text = io::read_file(csv);
  CHECK(text.rfind("x,value\n0.25,", 0) == 0);
  CHECK(io::read_file(json).find("\"sample_size\": 2") != std::string::npos);
  std::remove(csv.c_str());
  std::remove(json.c_str());
}

TEST_CASE("stationary density estimate improves with depth")
{
  const SymmetricBarParams sym{ 0.5, 1.0 };
  auto sup_error = [&](int n) {
    double total = 0.0;
    for (std::uint64_t s = 0; s < 5; ++s) {
      const TreeSample tree = simulate(sym.lift(), n, InitSpec::stationary(), derive_seed(77, s));
      TriangleEstimator est(tree, Population::generation);
      const double h = std::pow(2.0, -0.2 * n);
      double worst = 0.0;
      for (int i = 0; i <= 60; ++i) {
        const double x = -3.0 + 0.1 * i;
        worst = std::max(worst, std::abs(est.mu_hat(h, x) - stationary_mu(sym, x)));
      }
      total += worst;
    }
    return total / 5.0;
  };
  const double e10 = sup_error(10);
  const double e14 = sup_error(14);
  MESSAGE("mean sup error n=10: ", e10, ", n=14: ", e14);
  CHECK(e14 < e10);
}

TEST_CASE("transition estimate near the truth with rule-of-thumb bandwidths")
{
  const SymmetricBarParams sym{ 0.5, 1.0 };
  const double truth = transition_density_p(sym.lift(), 0, 0, 0);
  double total = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const TreeSample tree = simulate(sym.lift(), 14, InitSpec::stationary(), derive_seed(5, s));
    const RotSelection sel = rot_select(tree);
    total += p_hat(tree, Population::generation, sel.numerator(), sel.h_D_hat, 0, 0, 0);
  }
  const double avg = total / 10.0;
  MESSAGE("average P_hat(0,0,0) = ", avg, ", truth = ", truth);
  CHECK(std::abs(avg - truth) <= 0.15 * truth);
}
