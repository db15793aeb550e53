#pragma once

// Truncated Fock space, coherent initial states, the DFT phase-site basis,
// and phase probability distributions with circular statistics.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pswalk/errors.hpp"
#include "pswalk/linalg.hpp"

namespace pswalk {

// All run parameters for a walk.  Frequencies enter only through the
// dimensionless products g_tau and omega_tau; the nominal quantum-walk
// values are g_tau = 2 pi / (r d) (one-site hop at r = 1) and
// omega_tau = pi / 2 (Hadamard-like coin).
struct WalkConfig {
  int d = 31;                      // phase-site / Fock count
  Complex alpha{-5.0, 0.0};        // coherent amplitude of the initial state
  double r = 1.0;                  // step divisor of the fine-step dynamics
  double g_tau = 0.0;              // dimensionless coupling g * tau
  double omega_tau = 0.0;          // dimensionless qubit rotation omega * tau
  int steps = 0;                   // 0 = auto-terminate at pi peak separation
  std::array<Complex, 2> coin_init{Complex{1.0, 0.0}, Complex{0.0, 0.0}};
  double dephasing_p = 0.0;        // coin dephasing probability per step

  double nominal_g_tau() const {
    return 2.0 * std::numbers::pi / (r * static_cast<double>(d));
  }
  static double nominal_omega_tau() { return std::numbers::pi / 2.0; }

  // Returns a config with the nominal walk frequencies filled in.
  static WalkConfig nominal(int d, Complex alpha, double r = 1.0) {
    WalkConfig cfg;
    cfg.d = d;
    cfg.alpha = alpha;
    cfg.r = r;
    cfg.g_tau = cfg.nominal_g_tau();
    cfg.omega_tau = nominal_omega_tau();
    return cfg;
  }

  // Hard invariants; throws ConfigError on violation.
  void validate() const {
    if (d < 2) throw ConfigError("WalkConfig: d must be >= 2");
    if (!(r > 0.0)) throw ConfigError("WalkConfig: r must be positive");
    if (!(dephasing_p >= 0.0 && dephasing_p <= 1.0)) {
      throw ConfigError("WalkConfig: dephasing_p must lie in [0, 1]");
    }
    if (steps < 0) throw ConfigError("WalkConfig: steps must be >= 0");
    if (!std::isfinite(g_tau) || !std::isfinite(omega_tau)) {
      throw ConfigError("WalkConfig: frequencies must be finite");
    }
    const double coin_norm =
        std::sqrt(std::norm(coin_init[0]) + std::norm(coin_init[1]));
    if (std::abs(coin_norm - 1.0) > 1e-12) {
      throw ConfigError("WalkConfig: coin_init must be normalized to 1e-12");
    }
  }

  // Soft dimension-admissibility check |alpha|^2 + |alpha| <= d <= 4 pi
  // |alpha|.  Outside it the dynamics is still well defined (the upper bound
  // in particular is loose), so violations warn instead of failing.
  std::optional<std::string> admissibility_warning() const {
    const double a = std::abs(alpha);
    const double lower = a * a + a;
    const double upper = 4.0 * std::numbers::pi * a;
    if (static_cast<double>(d) < lower) {
      return "d = " + std::to_string(d) +
             " is below the coherent-support bound |alpha|^2 + |alpha| = " +
             std::to_string(lower);
    }
    if (static_cast<double>(d) > upper) {
      return "d = " + std::to_string(d) +
             " exceeds the phase-resolution bound 4 pi |alpha| = " +
             std::to_string(upper);
    }
    return std::nullopt;
  }
};

// Coherent state truncated to d Fock levels and renormalized.  The support
// fraction is the probability weight the untruncated state carries on the
// kept levels (a Poisson cumulative sum in |alpha|^2).
struct CoherentState {
  ComplexVector amplitudes;  // unit norm
  double support_fraction;   // pre-renormalization sum of |c_n|^2
};

inline CoherentState coherent_state(Complex alpha, int d) {
  if (d < 1) throw DimensionMismatch("coherent_state: d must be >= 1");
  ComplexVector c = ComplexVector::Zero(d);
  const double mag = std::abs(alpha);
  if (mag == 0.0) {
    c[0] = 1.0;
    return CoherentState{c, 1.0};
  }
  const double arg = std::arg(alpha);
  double support = 0.0;
  for (int n = 0; n < d; ++n) {
    // log |c_n| with c_n = e^{-|a|^2/2} a^n / sqrt(n!), evaluated in log
    // space so large |alpha| cannot overflow.
    const double logmag = -0.5 * mag * mag + n * std::log(mag) -
                          0.5 * std::lgamma(static_cast<double>(n) + 1.0);
    c[n] = std::polar(std::exp(logmag), arg * n);
    support += std::norm(c[n]);
  }
  c /= std::sqrt(support);
  return CoherentState{std::move(c), support};
}

// Geometric estimate of the step at which the two walk peaks reach +-pi/2:
// distance pi/2 at +-g_tau per step gives floor(r d / 4).  It is an estimate
// only (the broad coherent initial state spreads faster); the measured
// pi-separation time from run_trajectory is the operational quantity.
inline int estimate_peak_time(double r, int d) {
  return static_cast<int>(std::floor(r * static_cast<double>(d) / 4.0));
}

// Circular mean (first trigonometric moment) and standard deviation of a
// distribution over the site angles phi_m = 2 pi m / d.  The std is the
// ordinary linear standard deviation of the site angles after unwrapping
// them to the arc [mean - pi, mean + pi).
inline std::pair<double, double> circular_stats(const RealVector& probs) {
  const int d = static_cast<int>(probs.size());
  const double two_pi = 2.0 * std::numbers::pi;
  Complex z{0.0, 0.0};
  for (int m = 0; m < d; ++m) {
    z += probs[m] * std::polar(1.0, two_pi * m / d);
  }
  const double mean = std::atan2(z.imag(), z.real());
  double mu = 0.0;
  std::vector<double> theta(static_cast<size_t>(d));
  for (int m = 0; m < d; ++m) {
    const double phi = two_pi * m / d;
    double wrapped = std::fmod(phi - mean + std::numbers::pi, two_pi);
    if (wrapped < 0.0) wrapped += two_pi;
    theta[static_cast<size_t>(m)] = mean + wrapped - std::numbers::pi;
    mu += probs[m] * theta[static_cast<size_t>(m)];
  }
  double var = 0.0;
  for (int m = 0; m < d; ++m) {
    const double dev = theta[static_cast<size_t>(m)] - mu;
    var += probs[m] * dev * dev;
  }
  return {mean, std::sqrt(var)};
}

namespace detail {

// Circular boxcar smoothing with window 3 — the smallest window that
// suppresses single-site interference ripples before peak detection.
inline RealVector smooth3(const RealVector& p) {
  const int d = static_cast<int>(p.size());
  RealVector out(d);
  for (int i = 0; i < d; ++i) {
    out[i] = (p[(i + d - 1) % d] + p[i] + p[(i + 1) % d]) / 3.0;
  }
  return out;
}

}  // namespace detail

// Angular distance between the two highest local maxima of the smoothed
// distribution, or nullopt when fewer than two local maxima exist
// (unimodal / uniform).  Ties break toward the smaller site index: a local
// maximum must strictly exceed its left neighbor and be >= its right one.
inline std::optional<double> peak_separation(const RealVector& probs) {
  const int d = static_cast<int>(probs.size());
  const RealVector ps = detail::smooth3(probs);
  // (height, site) pairs of local maxima on the circle.
  std::vector<std::pair<double, int>> maxima;
  for (int i = 0; i < d; ++i) {
    const double prev = ps[(i + d - 1) % d];
    const double next = ps[(i + 1) % d];
    if (ps[i] > prev && ps[i] >= next) maxima.emplace_back(ps[i], i);
  }
  if (maxima.size() < 2) return std::nullopt;
  std::sort(maxima.begin(), maxima.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  const double dphi = std::abs(maxima[0].second - maxima[1].second) * 2.0 *
                      std::numbers::pi / d;
  return std::min(dphi, 2.0 * std::numbers::pi - dphi);
}

// Probability vector over phase sites plus its derived circular statistics.
struct PhaseDistribution {
  RealVector probs;
  double circular_mean = 0.0;
  double circular_std = 0.0;
  std::optional<double> peak_sep;  // absent when unimodal

  static PhaseDistribution from_probs(RealVector p) {
    PhaseDistribution out;
    const auto [mean, sd] = circular_stats(p);
    out.circular_mean = mean;
    out.circular_std = sd;
    out.peak_sep = peak_separation(p);
    out.probs = std::move(p);
    return out;
  }
};

// Cached DFT basis for repeated phase-distribution extraction.  P(m) is the
// diagonal of F† Tr_coin(rho) F, i.e. <phi_m| rho_w |phi_m>.
class PhaseBasis {
 public:
  explicit PhaseBasis(int d) : d_(d), f_(dft_matrix(d)), f_adj_(f_.adjoint()) {}

  int dim() const { return d_; }
  const ComplexMatrix& f() const { return f_; }

  // Pure joint state (2d amplitudes, coin-major) or bare walker state
  // (d amplitudes).
  RealVector probs(const ComplexVector& psi) const {
    if (psi.size() == d_) {
      return (f_adj_ * psi).cwiseAbs2();
    }
    if (psi.size() == 2 * d_) {
      return (f_adj_ * psi.head(d_)).cwiseAbs2() +
             (f_adj_ * psi.tail(d_)).cwiseAbs2();
    }
    throw DimensionMismatch("PhaseBasis::probs: state must have d or 2d "
                            "amplitudes");
  }

  // Joint density matrix (2d x 2d).
  RealVector probs(const ComplexMatrix& rho) const {
    const ComplexMatrix rho_w = partial_trace_coin(rho, d_);
    // diag(F† rho_w F) without forming the full product.
    const ComplexMatrix y = f_adj_ * rho_w;
    return (y.cwiseProduct(f_.transpose())).rowwise().sum().real();
  }

 private:
  int d_;
  ComplexMatrix f_;
  ComplexMatrix f_adj_;
};

// One-shot versions of the distribution extraction; hot loops should hold
// a PhaseBasis instead of rebuilding the transform every call.
inline PhaseDistribution phase_distribution(const ComplexVector& state,
                                            int d) {
  return PhaseDistribution::from_probs(PhaseBasis(d).probs(state));
}

inline PhaseDistribution phase_distribution(const ComplexMatrix& rho, int d) {
  return PhaseDistribution::from_probs(PhaseBasis(d).probs(rho));
}

}  // namespace pswalk
