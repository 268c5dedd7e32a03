#pragma once

#include "bmc/bar_model.hpp"
#include "bmc/estimators.hpp"
#include "bmc/tree.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bmc {

enum class SelectorKind
{
  fixed,
  cv,
  rot
};

const char* to_string(SelectorKind kind);
SelectorKind parse_selector_kind(const std::string& text);

struct Selector
{
  SelectorKind kind = SelectorKind::fixed;
  double gamma = 0.2;        //!< fixed: h = 2^(-n gamma), gamma in (0, 1/3)
  int folds = 5;             //!< cv
  std::vector<double> grid;  //!< cv; empty means default_cv_grid(n)

  void validate() const;
};

struct ExperimentSpec
{
  BarParams model{ 0.5, 0.5, 0.0, 0.0, 1.0, 0.0 };
  std::vector<int> n_list{ 12 };
  std::size_t replications = 500;
  GridPoint point{ 0.0, 0.0, 0.0 };
  Population population = Population::generation;
  Selector selector;
  std::uint64_t seed = 1;

  void validate() const;
};

struct ExperimentRow
{
  std::uint64_t seed = 0;
  std::size_t replication = 0;
  int n = 0;
  double h_used = 0.0;       //!< numerator bandwidth h (parent coordinate)
  double h_product = 0.0;    //!< h h0 h1 of the numerator
  double h_denominator = 0.0;
  double estimate = 0.0;
  double standardized = 0.0;
};

struct ExperimentSummary
{
  int n = 0;
  std::size_t count = 0;
  double truth = 0.0;
  double sigma2 = 0.0;  //!< asymptotic variance used for standardisation
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double ks_distance = 0.0;
  double median_abs_error = 0.0;  //!< median of |estimate - truth|
};

struct ExperimentReport
{
  std::string statistic;  //!< "p" or "mu_tri"
  ExperimentSpec spec;
  std::vector<ExperimentRow> rows;  //!< ordered by n, then replication
  std::vector<ExperimentSummary> summaries;
};

/// Replicated CLT experiment for P_hat at spec.point.
///
/// Replication r simulates from the invariant law with seed
/// derive_seed(spec.seed, r) and reports Z = sqrt(|A_n| h h0 h1) (P_hat - P) / sigma.
/// Symmetric models only. Output does not depend on `threads`.
ExperimentReport run_clt_p_hat(const ExperimentSpec& spec, unsigned threads = 1);

//! As run_clt_p_hat for mu_tri_hat with sigma^2 = ||K0||_2^6 mu_tri.
ExperimentReport run_clt_mu_tri(const ExperimentSpec& spec, unsigned threads = 1);

//! Moments and Kolmogorov-Smirnov distance to N(0, 1) of `z`.
ExperimentSummary summarize(const std::vector<double>& z);

void write_report_csv(const ExperimentReport& report, const std::string& path);
void write_report_json(const ExperimentReport& report, const std::string& path);
std::string report_json(const ExperimentReport& report);

enum class FigureCase
{
  case1,
  case2
};

//! case 1: (0.7, 0.5, 0, 0, 1, 0); case 2: (1.2, 0.7, 0, 0, 1, 0).
BarParams figure_case_params(FigureCase c);
FigureCase parse_figure_case(const std::string& text);
const char* to_string(FigureCase c);

struct FigureSpec
{
  FigureCase figure_case = FigureCase::case1;
  SelectorKind selector = SelectorKind::rot;
  std::vector<int> n_list{ 10, 12, 14 };
  std::size_t seeds = 3;
  std::uint64_t seed = 1;
  double x = 0.0;        //!< fixed parent value of the slice
  double lo = -3.0;      //!< (x0, x1) range
  double hi = 3.0;
  int grid_points = 31;  //!< per axis
  int folds = 5;
  std::vector<double> cv_grid;  //!< empty means default_cv_grid(n)
  double root = 0.0;     //!< Dirac initial value

  void validate() const;
};

struct FigureSlice
{
  int n = 0;
  std::uint64_t seed = 0;
  BandwidthTriple numerator;
  double h_denominator = 0.0;
  std::vector<GridPoint> points;
  std::vector<double> estimate;
  std::vector<double> truth;
  double sup_error = 0.0;
};

struct FigureResult
{
  FigureSpec spec;
  std::vector<FigureSlice> slices;      //!< ordered by n, then seed index
  std::vector<double> mean_sup_error;   //!< per entry of spec.n_list
};

FigureResult run_figure_reproduction(const FigureSpec& spec, unsigned threads = 1);

/// Writes <prefix>_n<k>.csv per depth plus <prefix>_summary.json; with
/// `gnuplot`, also <prefix>_n<k>.gp drawing estimate and truth surfaces.
std::vector<std::string> write_figure_outputs(const FigureResult& result, const std::string& prefix,
                                              bool gnuplot);

} // namespace bmc
