#pragma once

#include "bmc/tree.hpp"

#include <cstdint>
#include <vector>

namespace bmc {

//! Balanced random partition of G_n into K folds.
struct FoldPartition
{
  int n = 0;
  int folds = 0;
  std::vector<int> assignment;  //!< fold of each u in G_n, by rank

  std::vector<std::size_t> members(int k) const;
  std::size_t fold_size(int k) const;
};

//! Seeded uniform partition; fold sizes differ by at most one. Needs 2 <= K <= 2^n.
FoldPartition make_folds(int n, int folds, std::uint64_t seed);

/// Least-squares cross-validation score of the denominator for fold k:
///   int mu_hat_{-k}^2 - (2 / |F_k|) sum_{u in F_k} mu_hat_{-k}(X_u),
/// with the first integral in closed form through the Gaussian self-convolution.
double j_hat_den(const TreeSample& sample, const FoldPartition& partition, int k, double h);

//! Three-dimensional analogue over triangles, the same h on every coordinate.
double j_hat_num(const TreeSample& sample, const FoldPartition& partition, int k, double h);

struct CvResult
{
  std::vector<double> grid;
  std::vector<double> scores_den;  //!< fold-averaged j_hat_den per grid value
  std::vector<double> scores_num;  //!< fold-averaged j_hat_num per grid value
  double h_D_hat = 0.0;
  double h_N_hat = 0.0;
  int folds = 0;
  std::uint64_t seed = 0;
};

/// Per-fold scores for every grid value, scores[j][k].
///
/// All folds and bandwidths share one pass over the O(N^2) pairs of G_n.
struct CvFoldScores
{
  std::vector<std::vector<double>> den;
  std::vector<std::vector<double>> num;
};
CvFoldScores cv_fold_scores(const TreeSample& sample, const FoldPartition& partition,
                            const std::vector<double>& grid, unsigned threads = 1);

/// K-fold selection over `grid` (nonempty, strictly increasing, in (0, 1]).
/// Ties resolve to the smallest bandwidth.
CvResult cv_select(const TreeSample& sample, int folds, const std::vector<double>& grid,
                   std::uint64_t seed, unsigned threads = 1);

//! `count` log-spaced values from 2^(-0.33 n) to 1.
std::vector<double> default_cv_grid(int n, int count = 32);

inline constexpr int default_cv_folds = 5;

} // namespace bmc
