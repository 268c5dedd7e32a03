#pragma once

#include "bmc/estimators.hpp"
#include "bmc/tree.hpp"

#include <array>
#include <optional>
#include <span>

namespace bmc {

/// Constants of the asymptotic error bounds for the symmetric Gaussian
/// reference model with rate a and noise level sigma.
///
/// The b_i are the reference closed forms; the identities tying them to the
/// c's are checked separately (see ratio_identities).
struct RotConstants
{
  double a = 0.0;
  double sigma = 0.0;
  double sigma_a = 0.0;
  double kappa2 = 1.0;

  double c1 = 0.0;         //!< 4 ||K0||_2^2
  double c2 = 0.0;         //!< (1/2) kappa2^2 int mu''^2
  double C_a_sigma = 0.0;
  double M_a_sigma = 0.0;  //!< negative when 2a^2 < 1; only used behind 1{2a^2 > 1}

  double c_tri = 0.0;      //!< (1/2) kappa2^2 int (d^2 mu_tri / dx^2)^2
  double c0_tri = 0.0;
  double c1_tri = 0.0;
  double c2_tri = 0.0;     //!< 6 ||K0||_2^6
  double C_tri_a_sigma = 0.0;
  double M_tri_a_sigma = 0.0;

  //! int (d^2 mu_tri / dx_i^2)(d^2 mu_tri / dx_j^2), coordinates (x, x0, x1).
  std::array<std::array<double, 3>, 3> hessian_gram{};

  double b1 = 0.0;
  double b2 = 0.0;
  double b3 = 0.0;
  double b4 = 0.0;
  double b5 = 0.0;
};

//! Needs a in (0, 1) and sigma > 0.
RotConstants rot_constants(double a, double sigma);

//! Left- and right-hand sides of the five ratio identities, in order
//! c1/(4c2) = b1 s^5, c1/M = b2 s^2, c2^/(4c^) = b3 s^7, c2^/(4c0^) = b4 s^7,
//! c2^/M^ = b5 s^4 (s = sigma_a).
struct RatioIdentity
{
  double lhs = 0.0;
  double rhs = 0.0;
};
std::array<RatioIdentity, 5> ratio_identities(const RotConstants& c);

//! G(h) = c2 h^4 + c1 / (2^n h) + M a^(2n) 1{2a^2 > 1}.
double score_G(double h, int n, const RotConstants& c);

//! G^(h, h0, h1) = (1/2) kappa2^2 int (h^T H h)^2 + c2^ / (2^n h h0 h1) + M^ a^(2n) 1{2a^2 > 1}.
double score_G_tri(double h, double h0, double h1, int n, const RotConstants& c);

//! Closed-form optimal denominator bandwidth with the exact constants.
double optimal_h_den(const RotConstants& c, int n);

//! Closed-form optimal numerator bandwidths (h_N, h_0N, h_1N) with the exact constants.
BandwidthTriple optimal_h_num(const RotConstants& c, int n);

//! Sample standard deviation with denominator N - 1. Needs N >= 2.
double sigma_hat_a(std::span<const double> values);

//! Default lag parameter floor(n/2) + 1.
inline int default_rate_lag(int n) { return n / 2 + 1; }

/// Ergodic-rate estimator from tree covariances at lag m - 1 between
/// generation n - m + 1 and generation n, taken to the power 1/m.
///
/// The ratio is clamped to [1e-12, 1] before the root and the result to at
/// most 0.999. Needs n >= m >= 1; throws if every level-n value is equal.
double a_hat(const TreeSample& sample, std::optional<int> m = std::nullopt);

struct RotSelection
{
  double h_D_hat = 0.0;
  double h_N_hat = 0.0;
  double h_0N_hat = 0.0;
  double h_1N_hat = 0.0;
  double a_hat = 0.0;
  std::array<double, 3> sigma_hats{};  //!< from X_u, X_u0, X_u1 over u in G_n
  int n = 0;
  int m = 0;

  BandwidthTriple numerator() const { return {h_N_hat, h_0N_hat, h_1N_hat}; }
};

//! Practical bandwidths from plug-in estimates of a and sigma_a.
RotSelection rot_bandwidths(double a_hat, const std::array<double, 3>& sigma_hats, int n);

//! Full rule-of-thumb selection on a sample of depth >= 2.
RotSelection rot_select(const TreeSample& sample, std::optional<int> m = std::nullopt);

} // namespace bmc
