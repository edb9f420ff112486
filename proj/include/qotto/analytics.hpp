// analytics.hpp — Two-spin closed forms, ground-state return probabilities
// after free evolution, and the numerical tau_k optimizer.

#pragma once

#include <qotto/cycle.hpp>
#include <qotto/kspace.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qotto {

// ---------------------------------------------------------------------------
// Two-spin adiabatic closed forms
// ---------------------------------------------------------------------------

// Coefficients of the adiabatically transported two-spin thermal state,
//
//   alpha = h1 sinh(2 R2 / T_C) / (2 R1 (cosh(2J/T_C) + cosh(2 R2/T_C)))
//   delta = -sinh(2J / T_C)     / (2    (cosh(2J/T_C) + cosh(2 R2/T_C)))
//
// with R1 = sqrt(h1^2 + J^2), R2 = sqrt(h2^2 + J^2). Evaluated with the
// dominant exponential factored out, so T_C down to 0 cannot overflow.
struct TwoSpinCoefficients {
  double alpha = 0.0;
  double delta = 0.0;
};

inline TwoSpinCoefficients two_spin_coefficients(double h1, double h2, double J,
                                                 double T_C) {
  if (T_C < 0.0 || std::isnan(T_C))
    throw std::domain_error("two_spin_coefficients: T_C must be >= 0");
  const double r1 = std::sqrt(h1 * h1 + J * J);
  const double r2 = std::sqrt(h2 * h2 + J * J);
  if (T_C == 0.0) {
    // Zero-temperature limit of the stable ratios below: the cosh(2 R2/T_C)
    // term dominates for h2 != 0 (R2 > |J|), and ties with cosh(2J/T_C) at
    // h2 = 0 where the two arguments coincide.
    const bool tied = r2 <= std::abs(J);
    return TwoSpinCoefficients{h1 / (2.0 * r1) * (tied ? 0.5 : 1.0),
                               tied ? -0.25 : 0.0};
  }
  const double a = 2.0 * r2 / T_C;
  const double b = 2.0 * std::abs(J) / T_C;  // a >= b
  const double d = 1.0 + std::exp(b - a) + std::exp(-a - b) + std::exp(-2.0 * a);
  TwoSpinCoefficients c;
  c.alpha = h1 / (2.0 * r1) * (1.0 - std::exp(-2.0 * a)) / d;
  c.delta = -(std::exp(b - a) - std::exp(-a - b)) / (2.0 * d);
  return c;
}

// Energy at A' after an adiabatic return ramp: -4 h1 a - 4 J^2 a / h1 + 4 J d.
inline double two_spin_energy_Aprime(const TwoSpinCoefficients& c, double h1,
                                     double J) {
  return -4.0 * h1 * c.alpha - 4.0 * J * J * c.alpha / h1 + 4.0 * J * c.delta;
}

// Closed-form E_A(tau_k) including the fixed phase cross-terms cos(4 h1) and
// sin(4 h1) (a phase accumulated over unit time; kept exactly as written).
// See two_spin_energy_A_dephased for the population-transport-only form that
// exact adiabatic dynamics of a diagonal thermal state reproduces.
inline double two_spin_energy_A(double tau_k, const TwoSpinCoefficients& c,
                                double h1, double J) {
  return -4.0 * h1 * c.alpha * std::cos(4.0 * J * tau_k) -
         (4.0 * J * J * c.alpha / h1) * std::cos(4.0 * h1) +
         4.0 * J * c.delta -
         4.0 * J * c.alpha * std::sin(4.0 * h1) * std::sin(4.0 * J * tau_k);
}

// E_A(tau_k) for a state at A' that is diagonal in the H(h1) eigenbasis (no
// interlevel coherence): only the cos(4 J tau_k) response survives, and
// tau_k = 0 reduces exactly to the A' energy.
inline double two_spin_energy_A_dephased(double tau_k,
                                         const TwoSpinCoefficients& c,
                                         double h1, double J) {
  return -4.0 * h1 * c.alpha * std::cos(4.0 * J * tau_k) -
         4.0 * J * J * c.alpha / h1 + 4.0 * J * c.delta;
}

// Stationary points of the closed-form E_A(tau_k): tan(4 J tau_k) =
// (J / h1) sin(4 h1), solved on [0, tau_max].
inline std::vector<double> two_spin_stationary_points(double h1, double J,
                                                      double tau_max) {
  std::vector<double> out;
  const double base = std::atan((J / h1) * std::sin(4.0 * h1)) / (4.0 * J);
  const double step = std::numbers::pi / (4.0 * J);
  for (int n = 0;; ++n) {
    const double tau = base + n * step;
    if (tau > tau_max) break;
    if (tau >= 0.0) out.push_back(tau);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ground-state return probabilities after free evolution
// ---------------------------------------------------------------------------

// TIM, adiabatic T_C = 0, h1 >> J regime: starting from all spins along +x,
// |<psi0| exp(-i H0 tau) |psi0>|^2 with amplitude cos(J tau)^L + (i sin(J tau))^L.
inline double ground_state_probability_tim(int L, double J, double tau_k) {
  if (L < 2 || L % 2 != 0)
    throw std::invalid_argument("ground_state_probability_tim: L must be even and >= 2");
  const Complex a = std::pow(Complex(std::cos(J * tau_k), 0.0), L) +
                    std::pow(Complex(0.0, std::sin(J * tau_k)), L);
  return std::norm(a);
}

// LTIM counterpart for L = 2 and L = 4. The amplitude picks one factor per
// bond, (cos Jt - i sin Jt * zz), and one per site, (cos Bt + i sin Bt * z);
// surviving terms are those whose z strings square away on every site.
inline double ground_state_probability_ltim(int L, double J, double Bz,
                                            double tau_k) {
  const double cj = std::cos(J * tau_k), sj = std::sin(J * tau_k);
  const double cb = std::cos(Bz * tau_k), sb = std::sin(Bz * tau_k);
  if (L == 2) {
    const double c2 = std::cos(2.0 * J * tau_k), s2 = std::sin(2.0 * J * tau_k);
    return std::pow(cb, 4) * c2 * c2 + s2 * s2 * std::pow(sb, 4);
  }
  if (L == 4) {
    const double re = std::pow(cb, 4) * (std::pow(cj, 4) + std::pow(sj, 4)) +
                      4.0 * sj * sj * cj * cj * sb * sb * cb * cb -
                      2.0 * sj * sj * cj * cj * std::pow(sb, 4);
    const double im = 4.0 * sj * cj * sb * sb * cb * cb * (cj * cj - sj * sj);
    return re * re + im * im;
  }
  throw std::invalid_argument("ground_state_probability_ltim: only L = 2 and L = 4");
}

// ---------------------------------------------------------------------------
// tau_k optimizer
// ---------------------------------------------------------------------------

template <class Fn>
std::pair<double, double> golden_section_minimize(Fn&& f, double a, double b,
                                                  double xtol,
                                                  int max_iter = 200) {
  constexpr double inv_phi = 0.6180339887498949;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < max_iter && (b - a) > xtol; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = fc < fd ? c : d;
  return {x, fc < fd ? fc : fd};
}

struct TauKScan {
  double tau_k_opt = 0.0;
  double E_A_min = 0.0;
  std::vector<std::pair<double, double>> scan;  // (tau_k, E_A) trace
};

inline constexpr int kDefaultScanGridPoints = 129;
inline constexpr double kTauKRefineTol = 1e-4;

inline double default_tau_k_window(const ModelSpec& spec) {
  // One period of the dominant free-phase response for the TIM; the LTIM
  // window covers the longer beat between the bond and field phases.
  return spec.model == Model::TIM ? std::numbers::pi / (2.0 * std::abs(spec.J))
                                  : 2.0 * std::numbers::pi;
}

// Grid scan followed by golden-section refinement of every local-minimum
// bracket. Periodic degeneracies are tie-broken toward the smallest tau_k,
// since tau_k extends the cycle time and costs power. Works for any
// energy(tau) callable, FreeEvolutionEnergyScan included.
template <class EnergyFn>
TauKScan optimize_free_segment(const EnergyFn& energy, double tau_k_max,
                               int grid_points) {
  if (grid_points < 16)
    throw std::invalid_argument("optimize_free_segment: need at least 16 grid points");
  if (!(tau_k_max > 0.0))
    throw std::invalid_argument("optimize_free_segment: tau_k_max must be > 0");
  TauKScan result;
  result.scan.reserve(static_cast<std::size_t>(grid_points));
  const double dx = tau_k_max / (grid_points - 1);
  std::vector<double> e(static_cast<std::size_t>(grid_points));
  for (int i = 0; i < grid_points; ++i) {
    const double tau = i * dx;
    e[static_cast<std::size_t>(i)] = energy(tau);
    result.scan.emplace_back(tau, e[static_cast<std::size_t>(i)]);
  }

  struct Candidate {
    double tau;
    double value;
  };
  std::vector<Candidate> candidates;
  for (int i = 0; i < grid_points; ++i) {
    const double ei = e[static_cast<std::size_t>(i)];
    const bool left_ok = i == 0 || ei <= e[static_cast<std::size_t>(i - 1)];
    const bool right_ok =
        i == grid_points - 1 || ei <= e[static_cast<std::size_t>(i + 1)];
    if (!(left_ok && right_ok)) continue;
    const double lo = std::max(0.0, (i - 1) * dx);
    const double hi = std::min(tau_k_max, (i + 1) * dx);
    auto [tau, val] = golden_section_minimize(energy, lo, hi, kTauKRefineTol);
    // keep the grid node if refinement did not improve on it
    if (ei < val) candidates.push_back({i * dx, ei});
    else candidates.push_back({tau, val});
  }

  double best = candidates.front().value;
  for (const Candidate& c : candidates) best = std::min(best, c.value);
  const double tie_tol = 1e-9 * std::max(1.0, std::abs(best));
  double tau_opt = std::numeric_limits<double>::infinity();
  for (const Candidate& c : candidates)
    if (c.value <= best + tie_tol) tau_opt = std::min(tau_opt, c.tau);
  result.tau_k_opt = tau_opt;
  result.E_A_min = energy(tau_opt);
  return result;
}

// Dense-engine wrapper: runs the strokes once, then scans the free segment by
// applying incremental phases to the cached state at A'.
inline TauKScan tau_k_optimizer(const ModelSpec& spec, const CycleParams& p,
                                double tau_k_max = 0.0,
                                int grid_points = kDefaultScanGridPoints,
                                int max_sites = kDefaultMaxSites) {
  validate(p);
  const double window = tau_k_max > 0.0 ? tau_k_max : default_tau_k_window(spec);
  SectorCycleEngine engine(spec, max_sites);
  const auto front = engine.run_front(p);
  return optimize_free_segment(engine.free_segment_scan(front, p.h1), window,
                               grid_points);
}

inline TauKScan tau_k_optimizer_kspace(int L, const CycleParams& p,
                                       double tau_k_max = 0.0,
                                       int grid_points = kDefaultScanGridPoints,
                                       unsigned workers = 0) {
  validate(p);
  const double window =
      tau_k_max > 0.0 ? tau_k_max : std::numbers::pi / 2.0;
  KspaceCycleEngine engine(L, workers);
  const auto front = engine.run_front(p);
  return optimize_free_segment(engine.free_segment_scan(front, p.h1), window,
                               grid_points);
}

}  // namespace qotto
