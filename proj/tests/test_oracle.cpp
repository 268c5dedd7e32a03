#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bmc/bar_model.hpp"
#include "bmc/error.hpp"
#include "bmc/oracle.hpp"
#include "bmc/quadrature.hpp"
#include "bmc/rng.hpp"
#include "test_support.hpp"

#include <cmath>
#include <numbers>

using namespace bmc;

namespace {

const BarParams sym05{ 0.5, 0.5, 0.0, 0.0, 1.0, 0.0 };
const RealFn identity = [](double y) { return y; };
const RealFn one = [](double) { return 1.0; };
const RealFn square = [](double y) { return y * y; };

double
generation_sum(const TreeSample& s, int k, const RealFn& f)
{
  double acc = 0.0;
  for (double v : s.level(k))
    acc += f(v);
  return acc;
}

struct McResult
{
  double mean;
  double se;
};

template<typename Obs>
McResult
monte_carlo(const BarParams& p, double x, int depth, std::size_t trees, std::uint64_t seed, Obs obs)
{
  std::vector<double> v(trees);
  for (std::size_t t = 0; t < trees; ++t)
    v[t] = obs(simulate(p, depth, InitSpec::dirac(x), derive_seed(seed, t)));
  const double m = testsupport::mean(v);
  return { m, std::sqrt(testsupport::sample_variance(v) / static_cast<double>(trees)) };
}

} // namespace

TEST_CASE("gauss-hermite rule")
{
  const auto& r = cached_gauss_hermite(64);
  REQUIRE(r.nodes.size() == 64);
  double w = 0.0, m2 = 0.0, m4 = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    w += r.weights[i];
    m2 += r.weights[i] * r.nodes[i] * r.nodes[i];
    m4 += r.weights[i] * std::pow(r.nodes[i], 4);
  }
  const double sp = std::sqrt(std::numbers::pi);
  CHECK(w == doctest::Approx(sp).epsilon(1e-14));
  CHECK(m2 == doctest::Approx(sp / 2).epsilon(1e-13));
  CHECK(m4 == doctest::Approx(3 * sp / 4).epsilon(1e-13));
  CHECK_THROWS_AS(gauss_hermite(0), InvalidArgument);
  CHECK_THROWS_AS(gauss_hermite(129), InvalidArgument);
  CHECK(&cached_gauss_hermite(64) == &r);
}

TEST_CASE("grid function interpolation")
{
  const auto g = GridFunction::sample([](double x) { return std::sin(x); }, -3.0, 3.0, 401);
  for (double x = -2.9; x < 2.9; x += 0.0137)
    CHECK(std::abs(g(x) - std::sin(x)) < 1e-8);
  CHECK(g(-10.0) == g.values().front());
  CHECK(g(10.0) == g.values().back());
  CHECK_THROWS_AS(GridFunction({ 0.0, 0.0, 1.0 }, { 1.0, 2.0, 3.0 }), InvalidArgument);
  CHECK_THROWS_AS(GridFunction({ 0.0, 1.0 }, { 1.0 }), InvalidArgument);
  CHECK(integrate_adaptive([](double x) { return std::exp(-x * x); }, -10, 10) ==
        doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("apply_q on constants and low moments")
{
  const auto f1 = apply_q(sym05, tabulate(sym05, one));
  CHECK_FALSE(f1.tail_warning);
  const auto fy = apply_q(sym05, tabulate(sym05, identity));
  const auto fy2 = apply_q(sym05, tabulate(sym05, square));
  for (double x : { -4.0, -1.3, 0.0, 0.7, 2.5, 4.0 }) {
    CHECK(std::abs(f1(x) - 1.0) <= 1e-10);
    CHECK(std::abs(fy(x) - 0.5 * x) <= 1e-8);
    CHECK(std::abs(fy2(x) - (0.25 * x * x + 1.0)) <= 1e-8);
    // Independent dense trapezoid over the transition density.
    const double trap = testsupport::simpson(
      [&](double y) { return y * y * q_density(sym05, x, y); }, 0.5 * x - 14, 0.5 * x + 14, 20000);
    CHECK(std::abs(apply_q_at(sym05, square, x) - trap) <= 1e-8);
  }
}

TEST_CASE("apply_q contracts the identity by a per step")
{
  for (double a : { 0.3, 0.8 }) {
    const BarParams p{ a, a, 0, 0, 1, 0 };
    GridFunction g = tabulate(p, identity);
    for (int k = 1; k <= 5; ++k) {
      g = apply_q(p, g);
      for (double x : { -3.0, -0.5, 1.0, 3.0 })
        CHECK(std::abs(g(x) - std::pow(a, k) * x) <= 1e-8);
    }
  }
}

TEST_CASE("apply_q preserves positivity")
{
  const auto g = apply_q(sym05, tabulate(sym05, oracle_bump));
  for (double v : g.values())
    CHECK(v > 0.0);
}

TEST_CASE("narrow support raises the tail warning")
{
  OracleOptions narrow;
  narrow.support_sds = 2.0;
  const auto g = apply_q(sym05, tabulate(sym05, one, narrow));
  CHECK(g.tail_warning);
  bool warn = false;
  expected_generation_sum(sym05, one, 0.0, 2, narrow, &warn);
  CHECK(warn);
  warn = true;
  expected_generation_sum(sym05, one, 0.0, 2, {}, &warn);
  CHECK_FALSE(warn);
}

TEST_CASE("expected generation sum")
{
  for (int n = 0; n <= 8; ++n)
    CHECK(expected_generation_sum(sym05, one, 0.3, n) ==
          doctest::Approx(std::ldexp(1.0, n)).epsilon(1e-10));
  CHECK(expected_generation_sum(sym05, identity, 1.0, 3) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(expected_generation_sum(sym05, one, 0.0, 9), InvalidArgument);
  CHECK_THROWS_AS(expected_generation_sum(sym05, one, 0.0, -1), InvalidArgument);
}

TEST_CASE("expected generation sum of a bump against Monte Carlo")
{
  const double q = expected_generation_sum(sym05, oracle_bump, 1.0, 4);
  const auto mc = monte_carlo(sym05, 1.0, 3, 10000, 11,
                              [](const TreeSample& s) { return generation_sum(s, 4, oracle_bump); });
  MESSAGE("Q1 bump n=4: quadrature " << q << ", MC " << mc.mean << " +- " << mc.se);
  CHECK(std::abs(mc.mean - q) <= 3.0 * mc.se);
}

TEST_CASE("second moment identities")
{
  for (double x : { -1.0, 0.0, 2.0 }) {
    CHECK(second_moment_generation_sum(sym05, oracle_bump, x, 0) ==
          doctest::Approx(oracle_bump(x) * oracle_bump(x)).epsilon(1e-14));
    for (int n = 0; n <= 5; ++n)
      CHECK(second_moment_generation_sum(sym05, one, x, n) ==
            doctest::Approx(std::ldexp(1.0, 2 * n)).epsilon(1e-9));
  }
  CHECK_THROWS_AS(second_moment_generation_sum(sym05, one, 0.0, 6), InvalidArgument);
}

TEST_CASE("second moment against Monte Carlo")
{
  const double q = second_moment_generation_sum(sym05, identity, 0.0, 2);
  const auto mc = monte_carlo(sym05, 0.0, 1, 100000, 12, [](const TreeSample& s) {
    const double m = generation_sum(s, 2, [](double y) { return y; });
    return m * m;
  });
  MESSAGE("Q2 identity n=2: quadrature " << q << ", MC " << mc.mean << " +- " << mc.se);
  CHECK(std::abs(mc.mean - q) <= 3.0 * mc.se);
}

TEST_CASE("mixed moment identities")
{
  for (int n = 0; n <= 5; ++n) {
    CHECK(mixed_moment(sym05, oracle_bump, oracle_bump, 0.4, n, n) ==
          doctest::Approx(second_moment_generation_sum(sym05, oracle_bump, 0.4, n)).epsilon(1e-10));
    for (int m = 0; m <= n; ++m)
      CHECK(mixed_moment(sym05, oracle_bump, one, 0.4, n, m) ==
            doctest::Approx(std::ldexp(expected_generation_sum(sym05, oracle_bump, 0.4, n), m))
              .epsilon(1e-9));
  }
  CHECK_THROWS_AS(mixed_moment(sym05, one, one, 0.0, 2, 3), InvalidArgument);
  CHECK_THROWS_AS(mixed_moment(sym05, one, one, 0.0, 6, 1), InvalidArgument);
}

TEST_CASE("mixed moment against Monte Carlo")
{
  const double q = mixed_moment(sym05, identity, identity, 0.0, 2, 1);
  const auto mc = monte_carlo(sym05, 0.0, 1, 100000, 13, [](const TreeSample& s) {
    const auto id = [](double y) { return y; };
    return generation_sum(s, 2, id) * generation_sum(s, 1, id);
  });
  MESSAGE("Q2-bis identity (2,1): quadrature " << q << ", MC " << mc.mean << " +- " << mc.se);
  CHECK(std::abs(mc.mean - q) <= 3.0 * mc.se);
}

TEST_CASE("quadrature is invariant under doubling the node count")
{
  OracleOptions base, doubled;
  doubled.gh_nodes = 128;
  const BarParams asym{ 0.6, -0.3, 0.2, -0.1, 0.8, 0.4 };
  for (const BarParams& p : { sym05, asym }) {
    for (int n : { 1, 3 }) {
      CHECK(std::abs(expected_generation_sum(p, oracle_bump, 0.5, n, base) -
                     expected_generation_sum(p, oracle_bump, 0.5, n, doubled)) <= 1e-9);
      CHECK(std::abs(second_moment_generation_sum(p, oracle_bump, 0.5, n, base) -
                     second_moment_generation_sum(p, oracle_bump, 0.5, n, doubled)) <= 1e-9);
    }
    CHECK(std::abs(mixed_moment(p, oracle_bump, identity, 0.5, 3, 2, base) -
                   mixed_moment(p, oracle_bump, identity, 0.5, 3, 2, doubled)) <= 1e-9);
  }
  CHECK(std::abs(apply_q_at(sym05, oracle_bump, 0.7, 64) - apply_q_at(sym05, oracle_bump, 0.7, 128)) <=
        1e-9);
}

TEST_CASE("bivariate transition integral")
{
  const BarParams p{ 0.7, 0.5, 0.1, -0.2, 1.0, 0.6 };
  const RealFn g = [](double y) { return std::cos(y); };
  const RealFn h = [](double y) { return y * y; };
  for (double x : { -1.0, 0.5 }) {
    const double brute = testsupport::simpson2(
      [&](double y, double z) { return g(y) * h(z) * transition_density_p(p, x, y, z); }, -9.0,
      9.0, 400);
    CHECK(apply_p_at(p, g, h, x, false) == doctest::Approx(brute).epsilon(1e-8));
    const double swapped = apply_p_at(p, h, g, x, false);
    CHECK(apply_p_at(p, g, h, x, true) == doctest::Approx(0.5 * (brute + swapped)).epsilon(1e-8));
  }
}

TEST_CASE("kernel norm and asymptotic variances")
{
  const double l2 =
    testsupport::simpson([](double t) { return std::pow(std::exp(-0.5 * t * t), 2) / (2 * std::numbers::pi); },
                         -12, 12, 2000);
  CHECK(kernel_l2_norm_pow6() == doctest::Approx(l2 * l2 * l2).epsilon(1e-12));
  CHECK(kernel_l2_norm_pow6() == doctest::Approx(0.022446).epsilon(1e-4));

  const SymmetricBarParams sym{ 0.5, 1.0 };
  const double q00 = q_density(sym.lift(), 0.0, 0.0);
  const double expected = kernel_l2_norm_pow6() * q00 * q00 / stationary_mu(sym, 0.0);
  const double v = true_variance_clt(sym, 0, 0, 0, CltStatistic::transition, Population::generation);
  CHECK(v == doctest::Approx(expected).epsilon(1e-14));
  CHECK(v == doctest::Approx(0.010341).epsilon(1e-4));
  CHECK(true_variance_clt(sym, 0, 0, 0, CltStatistic::transition, Population::tree) == v);

  const double mg =
    true_variance_clt(sym, 0.3, -0.2, 0.5, CltStatistic::mu_triangle_fluctuation, Population::generation);
  CHECK(mg == doctest::Approx(kernel_l2_norm_pow6() * mu_triangle(sym, 0.3, -0.2, 0.5)).epsilon(1e-14));
  CHECK(true_variance_clt(sym, 0.3, -0.2, 0.5, CltStatistic::mu_triangle_fluctuation,
                          Population::tree) == doctest::Approx(2.0 * mg).epsilon(1e-15));
  CHECK(true_variance_clt(sym, 0.3, -0.2, 0.5, CltStatistic::mu_triangle, Population::tree) ==
        doctest::Approx(mg).epsilon(1e-15));
  CHECK(parse_clt_statistic(to_string(CltStatistic::mu_triangle)) == CltStatistic::mu_triangle);
  CHECK_THROWS_AS(parse_clt_statistic("nope"), InvalidArgument);
}

TEST_CASE("oracle check table")
{
  OracleCheckSpec spec;
  spec.trees = 2000;
  spec.max_depth = 3;
  const auto rows = run_oracle_check(spec, 1);
  CHECK(rows.size() == 2 * (3 + 3 + 3));
  for (const auto& r : rows) {
    CHECK(std::isfinite(r.z));
    CHECK(r.standard_error > 0.0);
    CHECK(r.pass == (std::abs(r.z) <= spec.z_limit));
  }
  const auto again = run_oracle_check(spec, 3);
  REQUIRE(again.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    CHECK(again[i].mc_estimate == rows[i].mc_estimate);
  const std::string csv = oracle_rows_csv(rows);
  CHECK(csv.rfind("formula,function,n,m,", 0) == 0);
  spec.max_depth = 6;
  CHECK_THROWS_AS(run_oracle_check(spec), InvalidArgument);
}
