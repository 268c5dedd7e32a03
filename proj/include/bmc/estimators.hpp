#pragma once

#include "bmc/tree.hpp"

#include <array>
#include <string>
#include <vector>

namespace bmc {

//! Denominator of the quotient estimator is treated as zero below this.
inline constexpr double degeneracy_threshold = 1e-300;

//! Per-coordinate bandwidths (parent, first daughter, second daughter).
struct BandwidthTriple
{
  double h = 1.0;
  double h0 = 1.0;
  double h1 = 1.0;

  static BandwidthTriple uniform(double h) { return {h, h, h}; }
  void validate() const;
  double product() const { return h * h0 * h1; }
};

/// Kernel estimators over a fixed set of observed triangles.
///
/// Holds the triangles of one population so repeated evaluations do not
/// re-gather them from the tree.
class TriangleEstimator
{
public:
  TriangleEstimator(const TreeSample& sample, Population population);
  explicit TriangleEstimator(TriangleColumns columns);

  std::size_t size() const { return data_.size(); }
  const TriangleColumns& columns() const { return data_; }

  //! (1 / (N h)) sum K0((x - X_u) / h) over the parents X_u.
  double mu_hat(double h, double x) const;

  //! (1 / (N h h0 h1)) sum K0((x-X_u)/h) K0((x0-X_u0)/h0) K0((x1-X_u1)/h1).
  double mu_tri_hat(const BandwidthTriple& bw, double x, double x0, double x1) const;

  //! mu_tri_hat / mu_hat with separate bandwidths; 0 when mu_hat is degenerate.
  double p_hat(const BandwidthTriple& numerator, double h_denominator, double x, double x0,
               double x1) const;

private:
  TriangleColumns data_;
};

double mu_hat(const TreeSample& sample, Population population, double h, double x);
double mu_tri_hat(const TreeSample& sample, Population population, const BandwidthTriple& bw,
                  double x, double x0, double x1);
double p_hat(const TreeSample& sample, Population population, const BandwidthTriple& numerator,
             double h_denominator, double x, double x0, double x1);

enum class EstimatorKind
{
  mu,
  mu_triangle,
  transition
};

const char* to_string(EstimatorKind kind);
EstimatorKind parse_estimator_kind(const std::string& text);

struct EstimatorSpec
{
  EstimatorKind kind = EstimatorKind::transition;
  Population population = Population::generation;
  BandwidthTriple numerator;   //!< used by mu_triangle and transition
  double denominator_h = 1.0;  //!< used by mu and transition
};

using GridPoint = std::array<double, 3>;

struct DensityEstimate
{
  EstimatorSpec spec;
  std::vector<GridPoint> points;  //!< only x is meaningful for EstimatorKind::mu
  std::vector<double> values;
  std::size_t sample_size = 0;
};

//! Evaluates the estimator at every grid point; identical to pointwise calls.
DensityEstimate evaluate_on_grid(const TreeSample& sample, const EstimatorSpec& spec,
                                 const std::vector<GridPoint>& grid, unsigned threads = 1);
DensityEstimate evaluate_on_grid(const TriangleEstimator& estimator, const EstimatorSpec& spec,
                                 const std::vector<GridPoint>& grid, unsigned threads = 1);

//! Writes `<csv_path>` with columns x[,x0,x1],value and a JSON sidecar with the metadata.
void write_density_estimate(const DensityEstimate& estimate, const std::string& csv_path,
                            const std::string& json_path);

} // namespace bmc
