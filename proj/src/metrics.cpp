// SPDX-License-Identifier: Apache-2.0
#include "dsd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>

#include <json.hpp>

namespace dsd {

namespace {

void check_inputs(const std::vector<double>& y_true,
                  const std::vector<double>& y_pred) {
  if (y_true.empty()) throw TooFewItems("metrics: empty input");
  if (y_true.size() != y_pred.size())
    throw TooFewItems("metrics: y_true and y_pred lengths differ");
}

std::size_t k_of(double fraction, std::size_t n) {
  if (!(fraction > 0.0) || fraction > 1.0)
    throw BadFraction("metrics: fraction must lie in (0, 1]");
  return std::size_t(std::ceil(fraction * double(n)));
}

// Ascending stable order of scores; order[r] is the index with rank r.
std::vector<std::size_t> rank_order(const std::vector<double>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&scores](std::size_t a, std::size_t b) {
                     return scores[a] < scores[b];
                   });
  return order;
}

// rank_of[i] = position of item i in the ascending order of `scores`.
std::vector<std::size_t> rank_positions(const std::vector<double>& scores) {
  std::vector<std::size_t> order = rank_order(scores);
  std::vector<std::size_t> rank(scores.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
  return rank;
}

std::vector<double> log_grid(std::size_t points) {
  std::vector<double> g(points);
  if (points == 1) {
    g[0] = 1.0;
    return g;
  }
  for (std::size_t i = 0; i < points; ++i) {
    double t = double(i) / double(points - 1);  // [-3, 0] in log10
    g[i] = std::pow(10.0, -3.0 + 3.0 * t);
  }
  g.back() = 1.0;
  return g;
}

// intersection of predicted top-ks with true top-kz
std::size_t overlap_count(const std::vector<std::size_t>& pred_order,
                          const std::vector<std::size_t>& true_rank,
                          std::size_t ks, std::size_t kz) {
  std::size_t hits = 0;
  for (std::size_t r = 0; r < ks; ++r)
    if (true_rank[pred_order[r]] < kz) ++hits;
  return hits;
}

}  // namespace

std::vector<std::size_t> top_fraction(const std::vector<double>& scores,
                                      double fraction) {
  if (scores.empty()) throw TooFewItems("top_fraction: empty scores");
  std::size_t k = k_of(fraction, scores.size());
  std::vector<std::size_t> order = rank_order(scores);
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

double recall_at(const std::vector<double>& y_true,
                 const std::vector<double>& y_pred, double sigma, double zeta) {
  check_inputs(y_true, y_pred);
  std::size_t n = y_true.size();
  std::size_t ks = k_of(sigma, n), kz = k_of(zeta, n);
  return double(overlap_count(rank_order(y_pred), rank_positions(y_true), ks,
                              kz)) /
         double(kz);
}

ResSurface res_surface(const std::vector<double>& y_true,
                       const std::vector<double>& y_pred,
                       std::size_t grid_points_per_axis) {
  check_inputs(y_true, y_pred);
  std::size_t n = y_true.size();
  if (n < 1000)
    std::cerr << "res_surface: n=" << n
              << " is below the grid's rank resolution (n < 1000); "
                 "small-fraction cells will be quantized\n";
  ResSurface s;
  s.sigma_grid = log_grid(grid_points_per_axis);
  s.zeta_grid = log_grid(grid_points_per_axis);
  std::vector<std::size_t> pred_order = rank_order(y_pred);
  std::vector<std::size_t> true_rank = rank_positions(y_true);
  s.recall.reserve(s.sigma_grid.size() * s.zeta_grid.size());
  double total = 0;
  for (double sigma : s.sigma_grid) {
    std::size_t ks = k_of(sigma, n);
    // ascending true ranks of the predicted top-ks prefix
    std::vector<std::size_t> prefix(ks);
    for (std::size_t r = 0; r < ks; ++r) prefix[r] = true_rank[pred_order[r]];
    std::sort(prefix.begin(), prefix.end());
    for (double zeta : s.zeta_grid) {
      std::size_t kz = k_of(zeta, n);
      std::size_t hits = std::size_t(
          std::lower_bound(prefix.begin(), prefix.end(), kz) - prefix.begin());
      double r = double(hits) / double(std::min(ks, kz));
      s.recall.push_back(r);
      total += r;
    }
  }
  s.res_score = total / double(s.recall.size());
  return s;
}

RtcCurve rtc(const std::vector<double>& y_true,
             const std::vector<double>& y_pred, double zeta,
             std::size_t grid_points) {
  check_inputs(y_true, y_pred);
  std::size_t n = y_true.size();
  std::size_t kz = k_of(zeta, n);
  RtcCurve c;
  c.sigma = log_grid(grid_points);
  std::vector<std::size_t> pred_order = rank_order(y_pred);
  std::vector<std::size_t> true_rank = rank_positions(y_true);
  for (double sigma : c.sigma) {
    std::size_t ks = k_of(sigma, n);
    std::size_t hits = overlap_count(pred_order, true_rank, ks, kz);
    c.recall.push_back(double(hits) / double(std::min(ks, kz)));
  }
  return c;
}

double aurtc(const RtcCurve& curve) {
  if (curve.sigma.size() < 2 || curve.sigma.size() != curve.recall.size())
    throw TooFewItems("aurtc: need a curve with at least 2 points");
  double area = 0;
  for (std::size_t i = 1; i < curve.sigma.size(); ++i) {
    double dx = std::log10(curve.sigma[i]) - std::log10(curve.sigma[i - 1]);
    area += 0.5 * (curve.recall[i] + curve.recall[i - 1]) * dx;
  }
  double width = std::log10(curve.sigma.back()) - std::log10(curve.sigma.front());
  return area / width;
}

ClassificationMetrics classification_metrics(const std::vector<double>& y_true,
                                             const std::vector<double>& y_pred,
                                             double sigma, double zeta) {
  check_inputs(y_true, y_pred);
  std::size_t n = y_true.size();
  std::size_t ks = k_of(sigma, n), kz = k_of(zeta, n);
  std::vector<std::size_t> pred_order = rank_order(y_pred);
  std::vector<std::size_t> true_rank = rank_positions(y_true);
  std::size_t tp = overlap_count(pred_order, true_rank, ks, kz);

  ClassificationMetrics m;
  m.precision = double(tp) / double(ks);
  m.recall = double(tp) / double(kz);
  m.f1 = (m.precision + m.recall > 0)
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;

  // Midrank AUROC of -y_pred against true top-kz membership. Equal predicted
  // scores share the average rank.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&y_pred](std::size_t a, std::size_t b) {
                     return y_pred[a] > y_pred[b];  // ascending -y_pred
                   });
  std::vector<double> midrank(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && y_pred[order[j + 1]] == y_pred[order[i]]) ++j;
    double mr = 0.5 * double(i + j) + 1.0;  // 1-based average rank
    for (std::size_t r = i; r <= j; ++r) midrank[order[r]] = mr;
    i = j + 1;
  }
  double rank_sum = 0;
  std::size_t pos = 0;
  for (std::size_t item = 0; item < n; ++item)
    if (true_rank[item] < kz) {
      rank_sum += midrank[item];
      ++pos;
    }
  std::size_t neg = n - pos;
  if (neg == 0) {
    m.auroc = 1.0;
  } else {
    m.auroc = (rank_sum - 0.5 * double(pos) * double(pos + 1)) /
              (double(pos) * double(neg));
  }
  return m;
}

MetricReport build_metric_report(const std::vector<double>& y_true,
                                 const std::vector<double>& y_pred,
                                 const std::vector<double>& sigma_list,
                                 const std::vector<double>& zeta_list,
                                 std::size_t grid_points_per_axis) {
  check_inputs(y_true, y_pred);
  MetricReport rep;
  rep.n = y_true.size();
  rep.res_score = res_surface(y_true, y_pred, grid_points_per_axis).res_score;
  rep.zeta_list = zeta_list;
  for (double zeta : zeta_list) {
    rep.aurtc_by_zeta.push_back(
        aurtc(rtc(y_true, y_pred, zeta, grid_points_per_axis)));
    rep.auroc_by_zeta.push_back(
        classification_metrics(y_true, y_pred, 1.0, zeta).auroc);
    for (double sigma : sigma_list) {
      ClassificationMetrics m =
          classification_metrics(y_true, y_pred, sigma, zeta);
      MetricCell cell;
      cell.sigma = sigma;
      cell.zeta = zeta;
      cell.k_sigma = std::size_t(std::ceil(sigma * double(rep.n)));
      cell.k_zeta = std::size_t(std::ceil(zeta * double(rep.n)));
      cell.recall = m.recall;
      cell.precision = m.precision;
      cell.f1 = m.f1;
      rep.cells.push_back(cell);
    }
  }
  return rep;
}

void save_metric_report(const MetricReport& report, const std::string& path) {
  nlohmann::json j;
  j["n"] = report.n;
  j["res_score"] = report.res_score;
  j["zeta_list"] = report.zeta_list;
  j["aurtc_by_zeta"] = report.aurtc_by_zeta;
  j["auroc_by_zeta"] = report.auroc_by_zeta;
  nlohmann::json cells = nlohmann::json::array();
  for (const MetricCell& c : report.cells)
    cells.push_back({{"sigma", c.sigma},
                     {"zeta", c.zeta},
                     {"k_sigma", c.k_sigma},
                     {"k_zeta", c.k_zeta},
                     {"recall", c.recall},
                     {"precision", c.precision},
                     {"f1", c.f1}});
  j["cells"] = std::move(cells);
  std::ofstream out(path);
  if (!out) throw FormatError("metrics: cannot write " + path);
  out << j.dump(2) << "\n";
}

void save_res_csv(const ResSurface& surface, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("metrics: cannot write " + path);
  out << "sigma,zeta,recall\n";
  char buf[96];
  std::size_t g = surface.zeta_grid.size();
  for (std::size_t i = 0; i < surface.sigma_grid.size(); ++i)
    for (std::size_t j = 0; j < g; ++j) {
      std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g\n", surface.sigma_grid[i],
                    surface.zeta_grid[j], surface.recall[i * g + j]);
      out << buf;
    }
}

}  // namespace dsd
