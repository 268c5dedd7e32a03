#pragma once

#include "bmc/tree.hpp"

#include <cstdint>
#include <string>

namespace bmc {

/// Gaussian bifurcating autoregressive model
///
///   X_u0 = a0 X_u + b0 + e_u0,   X_u1 = a1 X_u + b1 + e_u1,
///
/// with (e_u0, e_u1) ~ N(0, [[sigma^2, rho], [rho, sigma^2]]) i.i.d. over u.
struct BarParams
{
  double a0 = 0.0;
  double a1 = 0.0;
  double b0 = 0.0;
  double b1 = 0.0;
  double sigma = 1.0;
  double rho = 0.0;

  //! Throws InvalidArgument unless sigma > 0, |rho| < sigma^2 and all finite.
  void validate() const;

  //! a0 == a1, b0 == b1 == 0 and rho == 0.
  bool is_symmetric() const;
};

//! Symmetric reference model: a0 = a1 = a, no intercepts, independent noise.
struct SymmetricBarParams
{
  double a = 0.0;
  double sigma = 1.0;

  void validate() const;
  //! Standard deviation of the invariant law, sigma / sqrt(1 - a^2).
  double sigma_a() const;
  BarParams lift() const { return {a, a, 0.0, 0.0, sigma, 0.0}; }
};

//! Throws unless `params` is symmetric with |a| < 1.
SymmetricBarParams as_symmetric(const BarParams& params);

//! Law of X_root: a point mass at x0 or the invariant law (symmetric only).
struct InitSpec
{
  enum class Kind
  {
    dirac,
    stationary
  };
  Kind kind = Kind::dirac;
  double x0 = 0.0;

  static InitSpec dirac(double x) { return {Kind::dirac, x}; }
  static InitSpec stationary() { return {Kind::stationary, 0.0}; }
};

/// Draws a depth-n sample (generations 0..n+1).
///
/// Node (k, r) draws its children's noise from its own counter stream keyed
/// by (seed, k, r); the stationary root draw uses a reserved key. Output is
/// therefore bit-identical for every `threads` value.
TreeSample simulate(const BarParams& params, int n, const InitSpec& init, std::uint64_t seed,
                    unsigned threads = 1);

//! Joint density of (X_u0, X_u1) = (y, z) given X_u = x.
double transition_density_p(const BarParams& params, double x, double y, double z);

//! Density of a uniformly chosen daughter: (N(a0 x + b0, s^2)(y) + N(a1 x + b1, s^2)(y)) / 2.
double q_density(const BarParams& params, double x, double y);

//! Invariant density N(0, sigma_a^2).
double stationary_mu(const SymmetricBarParams& params, double x);

//! Stationary triangle density mu(x) Q(x, y) Q(x, z).
double mu_triangle(const SymmetricBarParams& params, double x, double y, double z);

//! Normal density with mean `mean` and standard deviation `sd`.
double normal_pdf(double x, double mean, double sd);

} // namespace bmc
