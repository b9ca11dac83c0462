// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "dsd/screening.hpp"

namespace dsd {

double oracle_raw(const MolecularGraph& g, const OracleParams& p) {
  int aromatic = 0, hetero = 0, heavy = 0;
  double degree_sum = 0;
  for (std::size_t i = 0; i < g.atoms.size(); ++i) {
    const Atom& a = g.atoms[i];
    if (a.is_virtual) continue;
    ++heavy;
    if (a.is_aromatic) ++aromatic;
    if (a.atomic_number != 6 && a.atomic_number != 1) ++hetero;
    degree_sum += g.degree(int(i));
  }
  double mean_degree = heavy > 0 ? degree_sum / double(heavy) : 0.0;
  return -(p.w_aromatic * aromatic + p.w_rings * cycle_count(g) +
           p.w_hetero * hetero + p.w_mean_degree * mean_degree +
           p.w_heavy * heavy);
}

CalibratedOracle calibrate_oracle(const std::vector<MolecularGraph>& library,
                                  const OracleParams& p) {
  if (library.empty()) throw BadInput("calibrate_oracle: empty library");
  std::vector<double> raws(library.size());
  for (std::size_t i = 0; i < library.size(); ++i)
    raws[i] = oracle_raw(library[i], p);
  std::vector<double> sorted = raws;
  std::sort(sorted.begin(), sorted.end());
  std::size_t n = sorted.size();
  double median = (n % 2 == 1)
                      ? sorted[n / 2]
                      : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  double base = p.noise_base;
  if (base < 0) {
    double mean = 0;
    for (double r : raws) mean += r;
    mean /= double(n);
    double var = 0;
    for (double r : raws) var += (r - mean) * (r - mean);
    base = 0.25 * std::sqrt(var / double(n));
  }
  return CalibratedOracle{p, median, base};
}

double CalibratedOracle::dock_noise_free(const MolecularGraph& g) const {
  return oracle_raw(g, params);
}

double CalibratedOracle::dock(const MolecularGraph& g) const {
  double raw = oracle_raw(g, params);
  // content-keyed stream: same molecule, same seed, same score
  std::mt19937_64 rng(structure_hash(g) ^ params.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (u(rng) < params.nan_fraction)
    return std::numeric_limits<double>::quiet_NaN();
  double sd = noise_base + params.noise_slope * std::max(0.0, raw - median_raw);
  if (sd <= 0) return raw;
  std::normal_distribution<double> gauss(0.0, sd);
  return raw + gauss(rng);
}

double compute_speedup(double t_dock, double t_inf, double sigma) {
  if (!(t_dock > 0) || t_inf < 0 || !(sigma > 0) || sigma > 1)
    throw BadInput("compute_speedup: need t_dock > 0, t_inf >= 0, sigma in (0,1]");
  return t_dock / (t_inf + sigma * t_dock);
}

}  // namespace dsd
