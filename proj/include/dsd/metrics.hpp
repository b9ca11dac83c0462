// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dsd/errors.hpp"

namespace dsd {

// Ranking convention throughout: lower score is better (docking scores).

// Indices of the k = ceil(f*n) smallest scores, ties broken by ascending
// original index. Returned in ascending index order.
std::vector<std::size_t> top_fraction(const std::vector<double>& scores,
                                      double fraction);

// R_{sigma,zeta}: fraction of the true top-zeta set recovered inside the
// predicted top-sigma set. Denominator ceil(zeta*n).
double recall_at(const std::vector<double>& y_true,
                 const std::vector<double>& y_pred, double sigma, double zeta);

struct ResSurface {
  std::vector<double> sigma_grid, zeta_grid;  // log-spaced in [1e-3, 1]
  std::vector<double> recall;  // [sigma-major] G*G normalized recalls
  double res_score = 0.0;      // mean over the grid
};

// Normalized recall surface: each cell |top_ks(pred) & top_kz(true)| divided
// by min(ks, kz), so a perfect predictor scores 1 everywhere.
ResSurface res_surface(const std::vector<double>& y_true,
                       const std::vector<double>& y_pred,
                       std::size_t grid_points_per_axis = 50);

struct RtcCurve {
  std::vector<double> sigma;   // log-spaced grid
  std::vector<double> recall;  // normalized as in res_surface
};

RtcCurve rtc(const std::vector<double>& y_true,
             const std::vector<double>& y_pred, double zeta,
             std::size_t grid_points = 50);

// Trapezoidal integral of the curve over log10(sigma), divided by the
// log-range width; lands in [0,1].
double aurtc(const RtcCurve& curve);

struct ClassificationMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double auroc = 0.0;  // midrank AUROC, sigma-independent
};

ClassificationMetrics classification_metrics(const std::vector<double>& y_true,
                                             const std::vector<double>& y_pred,
                                             double sigma, double zeta);

struct MetricCell {
  double sigma = 0.0, zeta = 0.0;
  std::size_t k_sigma = 0, k_zeta = 0;
  double recall = 0.0, precision = 0.0, f1 = 0.0;
};

struct MetricReport {
  std::size_t n = 0;
  double res_score = 0.0;
  std::vector<double> zeta_list;
  std::vector<double> aurtc_by_zeta;
  std::vector<double> auroc_by_zeta;
  std::vector<MetricCell> cells;  // one per (sigma, zeta) pair requested
};

MetricReport build_metric_report(const std::vector<double>& y_true,
                                 const std::vector<double>& y_pred,
                                 const std::vector<double>& sigma_list,
                                 const std::vector<double>& zeta_list,
                                 std::size_t grid_points_per_axis = 50);

void save_metric_report(const MetricReport& report, const std::string& path);
void save_res_csv(const ResSurface& surface, const std::string& path);

}  // namespace dsd
