#pragma once

// The four walk dynamics on the phase-space circle:
//   (a) standard alternating coin/shift stepping,
//   (b) exact continuous evolution of the joint Hamiltonian over one step,
//   (c) first-order Trotterized stepping (the same product operator as (a);
//       the distinction is which frequencies the config carries),
//   (d) decoherent density-matrix stepping with coin dephasing.
//
// Joint kets are coin-major: psi[c*d + n].  Coin |0> carries sigma_z = +1,
// so the shift exp(i g_tau sigma_z (x) n_hat) rotates the walker phase by
// +g_tau when the coin is |0> and -g_tau when it is |1>; at g_tau = 2 pi / d
// that is exactly one site per step.  The coin rotation is
// Rx(omega_tau) = exp(-i (omega_tau/2) sigma_x), Hadamard-like at pi/2.
// One discrete step applies the coin first, then the shift.
//
// The one-step exact evolution exp(i (g_tau n_hat sigma_z -
// (omega_tau/2) sigma_x)) is block-diagonal over Fock levels; per level n
// it is the 2x2 rotation cos(theta_n) I + i sinc(theta_n) (a_n sigma_z +
// b sigma_x) with a_n = g_tau n, b = -omega_tau/2, theta_n = hypot(a_n, b).
// That closed form gives O(d) stepping and is cross-checked against the
// dense unitary_exp construction in the tests.

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "pswalk/errors.hpp"
#include "pswalk/linalg.hpp"
#include "pswalk/phase_space.hpp"

namespace pswalk {

// Pure state of the qubit (x) resonator compound.
struct JointState {
  ComplexVector amplitudes;  // 2d entries, coin-major

  int dim() const { return static_cast<int>(amplitudes.size()) / 2; }
  double norm() const { return amplitudes.norm(); }
};

// Density operator of the compound, for decoherent runs.
struct JointDensity {
  ComplexMatrix matrix;  // 2d x 2d, Hermitian, unit trace

  int dim() const { return static_cast<int>(matrix.rows()) / 2; }
  double trace_real() const { return matrix.trace().real(); }
};

inline JointState make_initial_state(const WalkConfig& cfg) {
  const CoherentState walker = coherent_state(cfg.alpha, cfg.d);
  ComplexVector amps(2 * cfg.d);
  amps.head(cfg.d) = cfg.coin_init[0] * walker.amplitudes;
  amps.tail(cfg.d) = cfg.coin_init[1] * walker.amplitudes;
  return JointState{std::move(amps)};
}

inline JointDensity make_initial_density(const WalkConfig& cfg) {
  const JointState psi = make_initial_state(cfg);
  return JointDensity{psi.amplitudes * psi.amplitudes.adjoint()};
}

// Per-Fock-level 2x2 blocks of the one-step exact evolution (the O(d)
// fast path used by steppers and the optimizer hot loop).
struct ExactBlocks {
  ComplexVector u00, u01, u11;  // d entries each; u10 = u01
};

inline ExactBlocks make_exact_blocks(double g_tau, double omega_tau, int d) {
  ExactBlocks blocks;
  blocks.u00.resize(d);
  blocks.u01.resize(d);
  blocks.u11.resize(d);
  const double b = -0.5 * omega_tau;
  for (int n = 0; n < d; ++n) {
    const double a = g_tau * n;
    const double theta = std::hypot(a, b);
    const double sinc = theta > 0.0 ? std::sin(theta) / theta : 1.0;
    const double c = std::cos(theta);
    blocks.u00[n] = Complex{c, sinc * a};
    blocks.u11[n] = Complex{c, -sinc * a};
    blocks.u01[n] = Complex{0.0, sinc * b};
  }
  return blocks;
}

// All step operators for one configuration.  The dense matrices realize the
// operator contracts (and feed the density-matrix path); the cached vectors
// and coin entries give O(d) pure-state stepping.
struct StepOperators {
  int d = 0;
  double g_tau = 0.0;
  double omega_tau = 0.0;

  ComplexMatrix coin_rot;      // 2x2   Rx(omega_tau)
  ComplexMatrix shift;         // 2d x 2d   exp(i g_tau sigma_z (x) n_hat)
  ComplexMatrix exact_step;    // 2d x 2d   one-step joint evolution
  ComplexMatrix trotter_step;  // 2d x 2d   shift * (coin_rot (x) I)

  // Fast-path cache.
  ExactBlocks blocks;
  ComplexVector shift_up, shift_down;  // e^{+i g n}, e^{-i g n}
  double coin_c = 1.0, coin_s = 0.0;   // cos(w/2), sin(w/2)
};

inline StepOperators build_operators(const WalkConfig& cfg) {
  cfg.validate();
  StepOperators ops;
  ops.d = cfg.d;
  ops.g_tau = cfg.g_tau;
  ops.omega_tau = cfg.omega_tau;

  const double half_w = 0.5 * cfg.omega_tau;
  ops.coin_c = std::cos(half_w);
  ops.coin_s = std::sin(half_w);
  ops.coin_rot.resize(2, 2);
  ops.coin_rot << Complex{ops.coin_c, 0.0}, Complex{0.0, -ops.coin_s},
      Complex{0.0, -ops.coin_s}, Complex{ops.coin_c, 0.0};

  ops.shift_up.resize(cfg.d);
  ops.shift_down.resize(cfg.d);
  for (int n = 0; n < cfg.d; ++n) {
    ops.shift_up[n] = std::polar(1.0, cfg.g_tau * n);
    ops.shift_down[n] = std::polar(1.0, -cfg.g_tau * n);
  }
  ops.shift = ComplexMatrix::Zero(2 * cfg.d, 2 * cfg.d);
  ops.shift.diagonal().head(cfg.d) = ops.shift_up;
  ops.shift.diagonal().tail(cfg.d) = ops.shift_down;

  // Generator g_tau sigma_z (x) n_hat - (omega_tau/2) sigma_x (x) I, built
  // once and exponentiated through the Hermitian spectrum.
  ComplexMatrix sigma_z(2, 2), sigma_x(2, 2);
  sigma_z << 1, 0, 0, -1;
  sigma_x << 0, 1, 1, 0;
  ComplexMatrix n_hat = ComplexMatrix::Zero(cfg.d, cfg.d);
  for (int n = 0; n < cfg.d; ++n) n_hat(n, n) = n;
  const ComplexMatrix h =
      cfg.g_tau * kron(sigma_z, n_hat) -
      half_w * kron(sigma_x, ComplexMatrix::Identity(cfg.d, cfg.d));
  ops.exact_step = unitary_exp(h, 1.0);

  ops.trotter_step =
      ops.shift * kron(ops.coin_rot, ComplexMatrix::Identity(cfg.d, cfg.d));

  ops.blocks = make_exact_blocks(cfg.g_tau, cfg.omega_tau, cfg.d);
  return ops;
}

// One discrete walk step: coin rotation, then conditional shift.  O(d).
inline JointState standard_step(const JointState& state,
                                const StepOperators& ops) {
  const int d = ops.d;
  const auto p0 = state.amplitudes.head(d);
  const auto p1 = state.amplitudes.tail(d);
  JointState out;
  out.amplitudes.resize(2 * d);
  const Complex is{0.0, ops.coin_s};
  out.amplitudes.head(d) =
      ops.shift_up.cwiseProduct(ops.coin_c * p0 - is * p1);
  out.amplitudes.tail(d) =
      ops.shift_down.cwiseProduct(ops.coin_c * p1 - is * p0);
  return out;
}

// The Trotterized step is the same product operator as the standard step;
// the two dynamics differ only in the frequencies their configs carry.
inline JointState trotter_step(const JointState& state,
                               const StepOperators& ops) {
  return standard_step(state, ops);
}

// One step of the exact joint evolution via the Fock-level blocks.  O(d).
inline JointState exact_step(const JointState& state,
                             const StepOperators& ops) {
  const int d = ops.d;
  const auto p0 = state.amplitudes.head(d);
  const auto p1 = state.amplitudes.tail(d);
  JointState out;
  out.amplitudes.resize(2 * d);
  out.amplitudes.head(d) =
      ops.blocks.u00.cwiseProduct(p0) + ops.blocks.u01.cwiseProduct(p1);
  out.amplitudes.tail(d) =
      ops.blocks.u01.cwiseProduct(p0) + ops.blocks.u11.cwiseProduct(p1);
  return out;
}

// Which unitary drives a decoherent step.
enum class StepKind { exact, standard };

// One decoherent step: the unitary, then the coin dephasing channel
//   rho -> (1 - p/2) rho + (p/2) (sigma_z (x) I) rho (sigma_z (x) I),
// parameterized so p = 1 erases the coin coherences completely (at p = 1
// the site marginal of the standard walk obeys the classical random-walk
// recursion exactly).  On the 2x2 coin-block picture the channel multiplies
// the off-diagonal blocks by (1 - p) and leaves the diagonal blocks alone,
// so the trace is preserved exactly.
inline JointDensity dephasing_step(const JointDensity& rho,
                                   const StepOperators& ops, double p,
                                   StepKind which) {
  const int d = ops.d;
  if (rho.matrix.rows() != 2 * d || rho.matrix.cols() != 2 * d) {
    throw DimensionMismatch("dephasing_step: density must be 2d x 2d");
  }
  const ComplexMatrix& u =
      which == StepKind::exact ? ops.exact_step : ops.trotter_step;
  JointDensity out;
  out.matrix = u * rho.matrix * u.adjoint();
  out.matrix.block(0, d, d, d) *= (1.0 - p);
  out.matrix.block(d, 0, d, d) *= (1.0 - p);
  return out;
}

// Dynamics selector for run_trajectory.
enum class Dynamics {
  standard,
  exact,
  trotter,
  decoherent_standard,
  decoherent_exact,
};

inline bool is_decoherent(Dynamics which) {
  return which == Dynamics::decoherent_standard ||
         which == Dynamics::decoherent_exact;
}

struct TrajectoryOptions {
  bool keep_states = true;      // snapshot pure states per step
  bool keep_densities = false;  // snapshot densities per step (memory-heavy)
  int pi_cap_multiplier = 10;   // auto-termination safety cap, in units of d
};

// A deterministic trajectory: per-step phase distributions plus optional
// state snapshots.  Index t runs from 0 (initial state) to steps().
struct Trajectory {
  std::vector<PhaseDistribution> distributions;
  std::vector<JointState> states;      // pure paths, when kept
  std::vector<JointDensity> densities; // decoherent paths, when kept
  JointState final_state;              // pure paths
  JointDensity final_density;          // decoherent paths
  bool auto_terminated = false;
  int t_pi = -1;  // pi-separation step when auto-terminated

  int steps() const { return static_cast<int>(distributions.size()) - 1; }
};

namespace detail {

// Online pi-separation tracker.  Reports the first step whose smoothed
// two-peak separation reaches pi; if the separation instead turns over
// (value already past 0.8 pi, then a drop of more than one site's angle
// pi/d below the running maximum), reports the argmax step.  The safety cap
// falls back to the argmax as well.
class PiTracker {
 public:
  explicit PiTracker(int d) : d_(d) {}

  // Feed the separation of step t; returns the termination step if the rule
  // fires, -1 otherwise.
  int feed(int t, const std::optional<double>& sep) {
    if (!sep.has_value()) return -1;
    const double s = *sep;
    if (s >= std::numbers::pi - 1e-12) return t;
    if (s > best_sep_) {
      best_sep_ = s;
      best_t_ = t;
    } else if (best_sep_ >= 0.8 * std::numbers::pi &&
               s < best_sep_ - std::numbers::pi / d_) {
      return best_t_;
    }
    return -1;
  }

  int argmax_step() const { return best_t_; }

 private:
  int d_;
  double best_sep_ = -1.0;
  int best_t_ = -1;
};

}  // namespace detail

// Runs cfg.steps steps of the selected dynamics (or auto-terminates at pi
// peak separation when cfg.steps == 0, capped at pi_cap_multiplier * d).
inline Trajectory run_trajectory(const WalkConfig& cfg, Dynamics which,
                                 const TrajectoryOptions& opts = {}) {
  cfg.validate();
  const StepOperators ops = build_operators(cfg);
  const PhaseBasis basis(cfg.d);
  const bool auto_mode = cfg.steps == 0;
  const int cap = auto_mode ? opts.pi_cap_multiplier * cfg.d : cfg.steps;

  Trajectory traj;
  traj.auto_terminated = auto_mode;
  detail::PiTracker tracker(cfg.d);

  const bool density_path = is_decoherent(which);
  // Auto mode may overshoot the termination step (turnover fallback), so the
  // pure path keeps snapshots regardless to report the state at t_pi.
  // Density snapshots stay opt-in (a 2d x 2d matrix per step); an
  // auto-terminated decoherent run without them reports the last computed
  // density instead.
  const bool keep_states = opts.keep_states || (auto_mode && !density_path);
  JointState psi;
  JointDensity rho;
  if (density_path) {
    rho = make_initial_density(cfg);
  } else {
    psi = make_initial_state(cfg);
  }

  const auto snapshot = [&](int t) -> int {
    RealVector probs =
        density_path ? basis.probs(rho.matrix) : basis.probs(psi.amplitudes);
    traj.distributions.push_back(PhaseDistribution::from_probs(std::move(probs)));
    if (density_path) {
      if (opts.keep_densities) traj.densities.push_back(rho);
    } else {
      if (keep_states) traj.states.push_back(psi);
    }
    if (!auto_mode) return -1;
    return tracker.feed(t, traj.distributions.back().peak_sep);
  };

  int t_terminate = snapshot(0);
  for (int t = 1; t <= cap && t_terminate < 0; ++t) {
    if (density_path) {
      rho = dephasing_step(rho, ops, cfg.dephasing_p,
                           which == Dynamics::decoherent_exact
                               ? StepKind::exact
                               : StepKind::standard);
    } else if (which == Dynamics::exact) {
      psi = exact_step(psi, ops);
    } else {
      psi = standard_step(psi, ops);  // standard and trotter alike
    }
    t_terminate = snapshot(t);
  }

  if (auto_mode) {
    if (t_terminate < 0) t_terminate = tracker.argmax_step();
    if (t_terminate < 0) t_terminate = traj.steps();  // never bimodal
    traj.t_pi = t_terminate;
    // Truncate to the termination step so steps() == t_pi.
    traj.distributions.resize(static_cast<size_t>(t_terminate) + 1);
    if (!traj.states.empty()) {
      traj.states.resize(static_cast<size_t>(t_terminate) + 1);
    }
    if (!traj.densities.empty()) {
      traj.densities.resize(static_cast<size_t>(t_terminate) + 1);
    }
  }

  if (density_path) {
    traj.final_density =
        traj.densities.empty() ? std::move(rho) : traj.densities.back();
  } else {
    traj.final_state = traj.states.empty() ? std::move(psi) : traj.states.back();
  }
  return traj;
}

// Measured pi-separation time of the selected dynamics (the step at which
// the smoothed two-peak separation reaches pi).
inline int pi_separation_time(const WalkConfig& cfg,
                              Dynamics which = Dynamics::standard) {
  WalkConfig auto_cfg = cfg;
  auto_cfg.steps = 0;
  TrajectoryOptions opts;
  opts.keep_states = false;
  return run_trajectory(auto_cfg, which, opts).t_pi;
}

}  // namespace pswalk
