#pragma once

#include "bmc/bar_model.hpp"
#include "bmc/quadrature.hpp"
#include "bmc/tree.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace bmc {

using RealFn = std::function<double(double)>;

struct OracleOptions
{
  int gh_nodes = 64;           //!< per Gaussian component
  int grid_nodes = 512;
  double support_sds = 10.0;   //!< half-width of the support in invariant standard deviations
};

//! [-w, w] with w = support_sds * sigma / sqrt(1 - (a0^2 + a1^2) / 2), widened by the intercepts.
std::pair<double, double> default_support(const BarParams& params, double support_sds = 10.0);

GridFunction tabulate(const BarParams& params, const RealFn& f, const OracleOptions& options = {});

//! (Qf)(x) at every node of f. Sets tail_warning when Q(x, .) leaks more
//! than 1e-10 of its mass past the support for a node in the inner half.
GridFunction apply_q(const BarParams& params, const GridFunction& f, int gh_nodes = 64);

double apply_q_at(const BarParams& params, const RealFn& f, double x, int gh_nodes = 64);

//! P(g (x) h)(x) = E[g(X_u0) h(X_u1) | X_u = x]; with `symmetric`, the
//! average of P(g (x) h) and P(h (x) g).
double apply_p_at(const BarParams& params, const RealFn& g, const RealFn& h, double x,
                  bool symmetric, int gh_nodes = 64);

//! E_x[M_Gn(f)] = 2^n (Q^n f)(x). Needs 0 <= n <= 8.
double expected_generation_sum(const BarParams& params, const RealFn& f, double x, int n,
                               const OracleOptions& options = {}, bool* tail_warning = nullptr);

//! E_x[M_Gn(f)^2]. Needs 0 <= n <= 5.
double second_moment_generation_sum(const BarParams& params, const RealFn& f, double x, int n,
                                     const OracleOptions& options = {},
                                     bool* tail_warning = nullptr);

//! E_x[M_Gn(f) M_Gm(g)]. Needs 0 <= m <= n <= 5.
double mixed_moment(const BarParams& params, const RealFn& f, const RealFn& g, double x, int n,
                    int m, const OracleOptions& options = {}, bool* tail_warning = nullptr);

//! ||K0||_2^6 = (2 sqrt(pi))^-3 for the Gaussian kernel.
double kernel_l2_norm_pow6();

enum class CltStatistic
{
  transition,               //!< P_hat, either population
  mu_triangle,              //!< mu_tri_hat under its own |A_n| normalisation
  mu_triangle_fluctuation,  //!< mu_tri_hat fluctuation scaled by |G_n|; doubled for the tree
};

const char* to_string(CltStatistic s);
CltStatistic parse_clt_statistic(const std::string& text);

//! Asymptotic variance of the centred, rescaled estimator at (x, x0, x1).
double true_variance_clt(const SymmetricBarParams& params, double x, double x0, double x1,
                         CltStatistic statistic, Population population);

struct OracleCheckSpec
{
  SymmetricBarParams model{ 0.5, 1.0 };
  double x = 1.0;          //!< root value of every simulated tree
  int max_depth = 4;
  std::size_t trees = 10000;
  std::uint64_t seed = 1;
  double z_limit = 3.0;
  OracleOptions options;
};

struct OracleCheckRow
{
  std::string formula;   //!< Q1, Q2 or Q2-bis
  std::string function;  //!< identity or bump
  int n = 0;
  int m = 0;
  double quadrature = 0.0;
  double mc_estimate = 0.0;
  double standard_error = 0.0;
  double z = 0.0;
  bool pass = false;
};

//! The Gaussian bump exp(-(y - 0.5)^2 / 2) used by the check.
double oracle_bump(double y);

//! Monte Carlo means of M_Gn(f), M_Gn(f)^2 and M_Gn(f) M_Gm(f) against quadrature.
std::vector<OracleCheckRow> run_oracle_check(const OracleCheckSpec& spec, unsigned threads = 1);

std::string oracle_rows_csv(const std::vector<OracleCheckRow>& rows);

} // namespace bmc
