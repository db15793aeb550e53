#pragma once

// Quantitative comparators: Hellinger distance, negativity entanglement,
// growth-law fitting, and rank correlation.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/SVD>

#include "pswalk/errors.hpp"
#include "pswalk/linalg.hpp"
#include "pswalk/walk.hpp"

namespace pswalk {

// Hellinger distance (1/sqrt(2)) ||sqrt(p) - sqrt(q)||_2 in [0, 1].
inline double hellinger(const RealVector& p, const RealVector& q) {
  if (p.size() != q.size()) {
    throw LengthMismatch("hellinger: distributions differ in length");
  }
  double sum = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    // Clamp tiny negative round-off from density-matrix diagonals.
    const double a = std::sqrt(std::max(p[i], 0.0));
    const double b = std::sqrt(std::max(q[i], 0.0));
    sum += (a - b) * (a - b);
  }
  return std::clamp(std::sqrt(0.5 * sum), 0.0, 1.0);
}

// Negativity of the coin-resonator split: the absolute sum of the negative
// eigenvalues of the coin partial transpose.  Capped at 1/2 for a qubit (x)
// qudit split.
inline double negativity(const JointDensity& rho, int d) {
  const Spectrum s = hermitian_eig(partial_transpose_coin(rho.matrix, d));
  double neg = 0.0;
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
    if (s.eigenvalues[i] < 0.0) neg -= s.eigenvalues[i];
  }
  return neg;
}

// Pure-state fast path: for |psi> with Schmidt coefficients s0, s1 across
// the qubit cut, the partial transpose has exactly one negative eigenvalue
// -s0 s1, so the negativity is the product of the two singular values of
// the 2 x d amplitude matrix.  Agrees with the density route to 1e-10
// (checked in the tests).
inline double negativity(const JointState& psi) {
  const int d = psi.dim();
  Eigen::MatrixXcd amp(2, d);
  amp.row(0) = psi.amplitudes.head(d).transpose();
  amp.row(1) = psi.amplitudes.tail(d).transpose();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(amp);
  return svd.singularValues()[0] * svd.singularValues()[1];
}

enum class FitModel { linear, power };

struct FitResult {
  double coef = 0.0;       // slope (linear) or exponent (power)
  double r_squared = 0.0;
  double offset = 0.0;     // intercept (linear) or log-prefactor (power)
};

namespace detail {

inline FitResult least_squares(const std::vector<double>& x,
                               const std::vector<double>& y) {
  const size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) {
    throw DegenerateSeries("fit_growth: predictor variance is zero");
  }
  FitResult fit;
  fit.coef = sxy / sxx;
  fit.offset = my - fit.coef * mx;
  double ss_res = 0.0, ss_tot = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double pred = fit.offset + fit.coef * x[i];
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - my) * (y[i] - my);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace detail

// Unweighted least-squares fit of a per-step series.  series[i] is the value
// at step first_step + i.  The power model fits log(value) against
// log(step), excluding step 0 and any nonpositive values (their logs are
// undefined).  Requires at least 5 usable points.
inline FitResult fit_growth(std::span<const double> series, FitModel model,
                            int first_step = 0) {
  std::vector<double> x, y;
  x.reserve(series.size());
  y.reserve(series.size());
  for (size_t i = 0; i < series.size(); ++i) {
    const int step = first_step + static_cast<int>(i);
    if (model == FitModel::power) {
      if (step < 1 || series[i] <= 0.0) continue;
      x.push_back(std::log(static_cast<double>(step)));
      y.push_back(std::log(series[i]));
    } else {
      x.push_back(static_cast<double>(step));
      y.push_back(series[i]);
    }
  }
  if (x.size() < 5) {
    throw DegenerateSeries("fit_growth: needs at least 5 usable points");
  }
  return detail::least_squares(x, y);
}

namespace detail {

// Average ranks with ties sharing the mean rank.
inline std::vector<double> ranks(std::span<const double> v) {
  const size_t n = v.size();
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), size_t{0});
  std::sort(idx.begin(), idx.end(),
            [&](size_t a, size_t b) { return v[a] < v[b]; });
  std::vector<double> r(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
    for (size_t k = i; k <= j; ++k) r[idx[k]] = shared;
    i = j + 1;
  }
  return r;
}

}  // namespace detail

// Spearman rank correlation (Pearson correlation of average ranks).
inline double spearman_rho(std::span<const double> x,
                           std::span<const double> y) {
  if (x.size() != y.size()) {
    throw LengthMismatch("spearman_rho: sequences differ in length");
  }
  if (x.size() < 2) {
    throw DegenerateSeries("spearman_rho: needs at least 2 points");
  }
  const std::vector<double> rx = detail::ranks(x);
  const std::vector<double> ry = detail::ranks(y);
  const size_t n = rx.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    throw DegenerateSeries("spearman_rho: constant sequence");
  }
  return sxy / std::sqrt(sxx * syy);
}

inline double mean_abs_gap(std::span<const double> a,
                           std::span<const double> b) {
  if (a.size() != b.size()) {
    throw LengthMismatch("mean_abs_gap: sequences differ in length");
  }
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return sum / static_cast<double>(a.size());
}

// Side-by-side comparison of an exact and an approximate trajectory.  The
// growth-law fits are computed on the approximate (walk) path's standard
// deviation over the window [fit_begin, fit_end].
struct TrajectoryReport {
  std::vector<double> hellinger_per_step;
  std::vector<double> std_exact;
  std::vector<double> std_approx;
  std::vector<double> neg_exact;
  std::vector<double> neg_approx;
  FitResult linear_fit;   // std_approx vs step over the fit window
  FitResult power_fit;    // log std_approx vs log step over the fit window
  int fit_begin = 0;
  int fit_end = 0;
};

namespace detail {

inline std::vector<double> negativity_series(const Trajectory& traj) {
  std::vector<double> out;
  if (!traj.states.empty()) {
    out.reserve(traj.states.size());
    for (const JointState& s : traj.states) out.push_back(negativity(s));
  } else if (!traj.densities.empty()) {
    out.reserve(traj.densities.size());
    for (const JointDensity& r : traj.densities) {
      out.push_back(negativity(r, r.dim()));
    }
  }
  return out;
}

}  // namespace detail

// Builds the per-step comparison over the common horizon of two
// trajectories.  Negativity series require the trajectories to have kept
// state (or density) snapshots; they are left empty otherwise.
inline TrajectoryReport compare_trajectories(const Trajectory& exact_traj,
                                             const Trajectory& approx_traj,
                                             int fit_begin, int fit_end) {
  const int t_max = std::min(exact_traj.steps(), approx_traj.steps());
  TrajectoryReport report;
  report.hellinger_per_step.reserve(static_cast<size_t>(t_max) + 1);
  for (int t = 0; t <= t_max; ++t) {
    report.hellinger_per_step.push_back(
        hellinger(exact_traj.distributions[static_cast<size_t>(t)].probs,
                  approx_traj.distributions[static_cast<size_t>(t)].probs));
    report.std_exact.push_back(
        exact_traj.distributions[static_cast<size_t>(t)].circular_std);
    report.std_approx.push_back(
        approx_traj.distributions[static_cast<size_t>(t)].circular_std);
  }
  report.neg_exact = detail::negativity_series(exact_traj);
  report.neg_approx = detail::negativity_series(approx_traj);
  if (static_cast<int>(report.neg_exact.size()) > t_max + 1) {
    report.neg_exact.resize(static_cast<size_t>(t_max) + 1);
  }
  if (static_cast<int>(report.neg_approx.size()) > t_max + 1) {
    report.neg_approx.resize(static_cast<size_t>(t_max) + 1);
  }

  fit_begin = std::max(fit_begin, 0);
  fit_end = std::min(fit_end, t_max);
  report.fit_begin = fit_begin;
  report.fit_end = fit_end;
  if (fit_end - fit_begin + 1 >= 5) {
    const std::span<const double> window(
        report.std_approx.data() + fit_begin,
        static_cast<size_t>(fit_end - fit_begin + 1));
    report.linear_fit = fit_growth(window, FitModel::linear, fit_begin);
    report.power_fit = fit_growth(window, FitModel::power, fit_begin);
  } else {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    report.linear_fit = FitResult{nan, nan, nan};
    report.power_fit = FitResult{nan, nan, nan};
  }
  return report;
}

}  // namespace pswalk
