// cycle.hpp — The four-stroke Otto cycle with an optional free-evolution
// segment appended to the return ramp:
//
//   A -> B   hot thermalization at (h1, T_H)
//   B -> C   unitary ramp h1 -> h2 over tau1
//   C -> D   cold thermalization at (h2, T_C)
//   D -> A'  unitary ramp h2 -> h1 over tau2
//   A' -> A  drive switched off, free evolution under H0 for tau_k
//
// Thermalization is modeled as replacement by the exact Gibbs state; the bath
// contact time tau_bath enters only the power denominator. Ramps integrate the
// von Neumann equation by piecewise-constant midpoint stepping: the interval
// is split into steps of length <= dt_max and each step applies the exact
// exponential of the midpoint Hamiltonian, so the map stays exactly unitary.
//
// run_cycle factorizes the chain into momentum sectors (translation.hpp) and
// evolves the blocks independently; the result is identical to full-space
// evolution because every stroke commutes with the cyclic shift.

#pragma once

#include <qotto/linalg.hpp>
#include <qotto/spin_models.hpp>
#include <qotto/translation.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace qotto {

struct CycleParams {
  double h1 = 10.0;      // drive field during hot contact
  double h2 = 0.2;       // drive field during cold contact
  double T_H = 100.0;    // hot bath temperature
  double T_C = 0.001;    // cold bath temperature
  double tau1 = 0.1;     // B -> C ramp duration
  double tau2 = 0.1;     // D -> A' ramp duration
  double tau_bath = 0.2; // combined thermalization time (power denominator only)
  double tau_k = 0.0;    // free-evolution duration, 0 disables the segment
  double dt_max = 1e-3;  // integrator step bound
};

inline void validate(const CycleParams& p) {
  const bool finite = std::isfinite(p.h1) && std::isfinite(p.h2) &&
                      std::isfinite(p.tau1) && std::isfinite(p.tau2) &&
                      std::isfinite(p.tau_bath) && std::isfinite(p.tau_k) &&
                      std::isfinite(p.dt_max) && !std::isnan(p.T_H) &&
                      !std::isnan(p.T_C);
  if (!finite) throw std::invalid_argument("CycleParams: non-finite parameter");
  if (!(p.h1 > p.h2))
    throw std::invalid_argument("CycleParams: engine regime requires h1 > h2");
  if (!(p.T_H > p.T_C))
    throw std::invalid_argument("CycleParams: engine regime requires T_H > T_C");
  if (p.T_C < 0.0 || p.T_H < 0.0)
    throw std::invalid_argument("CycleParams: temperatures must be >= 0");
  if (p.tau1 < 0.0 || p.tau2 < 0.0 || p.tau_bath < 0.0 || p.tau_k < 0.0)
    throw std::invalid_argument("CycleParams: durations must be >= 0");
  if (!(p.dt_max > 0.0))
    throw std::invalid_argument("CycleParams: dt_max must be > 0");
}

struct CycleResult {
  double E_A = 0.0;
  double E_B = 0.0;
  double E_C = 0.0;
  double E_D = 0.0;
  double E_Aprime = 0.0;
  double Q_in = 0.0;   // E_B - E_A
  double Q_out = 0.0;  // E_D - E_C
  double W = 0.0;      // -(Q_in + Q_out); negative when the cycle outputs work
  double eta = std::numeric_limits<double>::quiet_NaN();  // -W/Q_in
  double P = 0.0;      // W / tau_total, signed
  double tau_total = 0.0;
  double free_evolution_gain = 0.0;  // E_Aprime - E_A; > 0 when the segment helps
  bool is_engine = false;
};

inline CycleResult assemble_cycle_result(double E_A, double E_B, double E_C,
                                         double E_D, double E_Aprime,
                                         const CycleParams& p, double tau_k) {
  CycleResult r;
  r.E_A = E_A;
  r.E_B = E_B;
  r.E_C = E_C;
  r.E_D = E_D;
  r.E_Aprime = E_Aprime;
  r.Q_in = E_B - E_A;
  r.Q_out = E_D - E_C;
  r.W = -(r.Q_in + r.Q_out);
  r.is_engine = r.Q_in > 0.0 && r.Q_out < 0.0 && r.W < 0.0;
  // Q_in = 0 leaves the efficiency undefined (NaN), never a division fault.
  if (r.Q_in != 0.0) r.eta = -r.W / r.Q_in;
  r.tau_total = p.tau1 + p.tau2 + p.tau_bath + tau_k;
  r.P = r.tau_total > 0.0 ? r.W / r.tau_total
                          : std::numeric_limits<double>::quiet_NaN();
  r.free_evolution_gain = E_Aprime - E_A;
  return r;
}

// ---------------------------------------------------------------------------
// Full-space integrators (generic; also used by the 4x4 momentum modes)
// ---------------------------------------------------------------------------

namespace detail {
inline int step_count(double duration, double dt_max) {
  if (!(dt_max > 0.0)) throw std::invalid_argument("dt_max must be > 0");
  if (duration <= 0.0) return 0;
  return static_cast<int>(std::ceil(duration / dt_max - 1e-12));
}
}  // namespace detail

// d(rho)/dt = -i [H(h(t)), rho] for H(h) = h_static + h * h_drive.
inline DensityOperator evolve_ramp(const DensityOperator& rho,
                                   const HermitianOperator& h_static,
                                   const HermitianOperator& h_drive,
                                   const RampProtocol& protocol, double dt_max) {
  if (h_static.dim() != rho.dim() || h_drive.dim() != rho.dim())
    throw std::invalid_argument("evolve_ramp: dimension mismatch");
  if (protocol.duration < 0.0)
    throw std::invalid_argument("evolve_ramp: negative ramp duration");
  const int steps = detail::step_count(protocol.duration, dt_max);
  if (steps == 0) return rho;
  const double dt = protocol.duration / steps;
  Matrix state = rho.matrix();
  for (int j = 0; j < steps; ++j) {
    const double h = protocol.field_at((j + 0.5) * dt);
    const Spectrum s =
        eigh(HermitianOperator(h_static.matrix() + h * h_drive.matrix()));
    const Matrix u = propagator_from_spectrum(s, dt);
    state = u * state * u.adjoint();
  }
  return DensityOperator(std::move(state));
}

inline DensityOperator evolve_ramp(const DensityOperator& rho,
                                   const SplitHamiltonian& split,
                                   const RampProtocol& protocol, double dt_max) {
  return evolve_ramp(rho, split.H0, split.H1, protocol, dt_max);
}

// Same stepping applied to a pure state vector.
inline Vector evolve_ramp_state(Vector psi, const HermitianOperator& h_static,
                                const HermitianOperator& h_drive,
                                const RampProtocol& protocol, double dt_max) {
  if (h_static.dim() != psi.size() || h_drive.dim() != psi.size())
    throw std::invalid_argument("evolve_ramp_state: dimension mismatch");
  const int steps = detail::step_count(protocol.duration, dt_max);
  const double dt = steps > 0 ? protocol.duration / steps : 0.0;
  for (int j = 0; j < steps; ++j) {
    const double h = protocol.field_at((j + 0.5) * dt);
    const Spectrum s =
        eigh(HermitianOperator(h_static.matrix() + h * h_drive.matrix()));
    const Eigen::ArrayXcd phases =
        (Complex(0.0, -1.0) * dt * s.eigenvalues.array().cast<Complex>()).exp();
    psi = s.eigenvectors * (phases * (s.eigenvectors.adjoint() * psi).array()).matrix();
  }
  return psi;
}

// rho -> U rho U† with U = exp(-i h_free tau_k). A diagonal generator (the
// spin-chain H0 in the z basis) reduces to elementwise phases.
inline DensityOperator free_evolve(const DensityOperator& rho,
                                   const HermitianOperator& h_free,
                                   double tau_k) {
  if (h_free.dim() != rho.dim())
    throw std::invalid_argument("free_evolve: dimension mismatch");
  if (tau_k < 0.0) throw std::invalid_argument("free_evolve: tau_k must be >= 0");
  if (tau_k == 0.0) return rho;
  const Matrix& g = h_free.matrix();
  Matrix offdiag = g;
  offdiag.diagonal().setZero();
  if (max_abs(offdiag) <= tol::kHermiticity) {
    const Eigen::ArrayXcd phases =
        (Complex(0.0, -1.0) * tau_k * g.diagonal().real().array().cast<Complex>()).exp();
    Matrix state = phases.matrix().asDiagonal() * rho.matrix() *
                   phases.conjugate().matrix().asDiagonal();
    return DensityOperator(std::move(state));
  }
  return unitary_conjugate(propagator(h_free, tau_k), rho);
}

// ---------------------------------------------------------------------------
// E_A(tau_k) evaluator
// ---------------------------------------------------------------------------

// Precomputes, per independent block, everything needed to evaluate
//   E(tau) = sum_blocks Tr(H_ref U(tau) rho U(tau)†),  U = exp(-i G tau)
// in O(d^2) per tau. Used by the tau_k optimizer and the sweep runner.
class FreeEvolutionEnergyScan {
 public:
  // Block whose generator is already diagonal with entries gen_diag.
  void add_diagonal_block(const Matrix& h_ref, const Matrix& rho,
                          const RealVector& gen_diag) {
    Block b;
    b.p = h_ref.cwiseProduct(rho.transpose());
    b.theta = gen_diag;
    blocks_.push_back(std::move(b));
  }

  // Block with a general Hermitian generator.
  void add_block(const Matrix& h_ref, const Matrix& rho,
                 const HermitianOperator& generator) {
    const Spectrum s = eigh(generator);
    const Matrix h_t = s.eigenvectors.adjoint() * h_ref * s.eigenvectors;
    const Matrix rho_t = s.eigenvectors.adjoint() * rho * s.eigenvectors;
    Block b;
    b.p = h_t.cwiseProduct(rho_t.transpose());
    b.theta = s.eigenvalues;
    blocks_.push_back(std::move(b));
  }

  double operator()(double tau) const {
    double e = 0.0;
    for (const Block& b : blocks_) {
      const Eigen::ArrayXcd u =
          (Complex(0.0, 1.0) * tau * b.theta.array().cast<Complex>()).exp();
      const Complex val = (u.matrix().transpose() * (b.p * u.matrix().conjugate()))(0, 0);
      e += val.real();
    }
    return e;
  }

  bool empty() const { return blocks_.empty(); }

 private:
  struct Block {
    Matrix p;          // H_ref(i,j) * rho(j,i) in the generator eigenbasis
    RealVector theta;  // generator eigenvalues
  };
  std::vector<Block> blocks_;
};

// ---------------------------------------------------------------------------
// Sector-factorized dense engine
// ---------------------------------------------------------------------------

class SectorCycleEngine {
 public:
  // Stroke endpoints through A'; everything the free segment needs.
  struct Front {
    double E_B = 0.0;
    double E_C = 0.0;
    double E_D = 0.0;
    double E_Aprime = 0.0;
    std::vector<Matrix> rho_Aprime;  // sector blocks, globally unit trace
  };

  explicit SectorCycleEngine(const ModelSpec& spec,
                             int max_sites = kDefaultMaxSites)
      : basis_(spec, max_sites) {}

  const SectorBasis& basis() const { return basis_; }

  Front run_front(const CycleParams& p) const {
    validate(p);
    Front f;
    std::vector<Matrix> blocks = gibbs_blocks(p.h1, p.T_H);
    f.E_B = energy(blocks, p.h1);
    ramp_blocks(blocks, RampProtocol{p.h1, p.h2, p.tau1}, p.dt_max);
    f.E_C = energy(blocks, p.h2);
    blocks = gibbs_blocks(p.h2, p.T_C);
    f.E_D = energy(blocks, p.h2);
    ramp_blocks(blocks, RampProtocol{p.h2, p.h1, p.tau2}, p.dt_max);
    f.E_Aprime = energy(blocks, p.h1);
    f.rho_Aprime = std::move(blocks);
    return f;
  }

  CycleResult finish(const Front& f, const CycleParams& p, double tau_k) const {
    if (tau_k < 0.0) throw std::invalid_argument("finish: tau_k must be >= 0");
    double E_A = f.E_Aprime;
    if (tau_k > 0.0) {
      E_A = 0.0;
      const auto& sectors = basis_.sectors();
      for (std::size_t si = 0; si < sectors.size(); ++si) {
        const MomentumSector& sec = sectors[si];
        if (sec.dim() == 0) continue;
        const Eigen::ArrayXcd phases =
            (Complex(0.0, -1.0) * tau_k * sec.h0_diag.array().cast<Complex>()).exp();
        const Matrix rho_a = phases.matrix().asDiagonal() * f.rho_Aprime[si] *
                             phases.conjugate().matrix().asDiagonal();
        E_A += block_energy(sec, rho_a, p.h1);
      }
    }
    return assemble_cycle_result(E_A, f.E_B, f.E_C, f.E_D, f.E_Aprime, p, tau_k);
  }

  CycleResult run(const CycleParams& p) const {
    return finish(run_front(p), p, p.tau_k);
  }

  FreeEvolutionEnergyScan free_segment_scan(const Front& f, double h_ref) const {
    FreeEvolutionEnergyScan scan;
    const auto& sectors = basis_.sectors();
    for (std::size_t si = 0; si < sectors.size(); ++si) {
      const MomentumSector& sec = sectors[si];
      if (sec.dim() == 0) continue;
      scan.add_diagonal_block(sec.hamiltonian_at(h_ref), f.rho_Aprime[si],
                              sec.h0_diag);
    }
    return scan;
  }

  // Pure-state variant: requires T_C = 0 so the state at D is the ground
  // state. Falls back to the density path when that ground state is
  // degenerate. Agrees with run() to ~1e-8 when the fallback does not fire.
  CycleResult run_statevector(const CycleParams& p) const {
    validate(p);
    if (p.T_C != 0.0)
      throw std::invalid_argument("run_statevector: requires T_C = 0");

    Front hot;
    {
      std::vector<Matrix> blocks = gibbs_blocks(p.h1, p.T_H);
      hot.E_B = energy(blocks, p.h1);
      ramp_blocks(blocks, RampProtocol{p.h1, p.h2, p.tau1}, p.dt_max);
      hot.E_C = energy(blocks, p.h2);
    }

    // Global ground state at (h2) across sectors, with a degeneracy guard.
    const auto& sectors = basis_.sectors();
    double e0 = std::numeric_limits<double>::infinity();
    double e1 = std::numeric_limits<double>::infinity();
    std::size_t ground_sector = 0;
    Vector ground;
    for (std::size_t si = 0; si < sectors.size(); ++si) {
      const MomentumSector& sec = sectors[si];
      if (sec.dim() == 0) continue;
      const Spectrum s = eigh(HermitianOperator(sec.hamiltonian_at(p.h2)));
      for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
        const double e = s.eigenvalues(i);
        if (e < e0) {
          e1 = e0;
          e0 = e;
          ground_sector = si;
          ground = s.eigenvectors.col(i);
        } else if (e < e1) {
          e1 = e;
        }
      }
    }
    if (e1 - e0 <= 1e-9 * std::max(1.0, std::abs(e0)))
      return run(p);  // degenerate ground space: density path

    const MomentumSector& sec = sectors[ground_sector];
    const double E_D = e0;
    Vector psi = std::move(ground);
    const int steps = detail::step_count(p.tau2, p.dt_max);
    const double dt = steps > 0 ? p.tau2 / steps : 0.0;
    const RampProtocol back{p.h2, p.h1, p.tau2};
    for (int j = 0; j < steps; ++j) {
      const Spectrum s = eigh(
          HermitianOperator(sec.hamiltonian_at(back.field_at((j + 0.5) * dt))));
      const Eigen::ArrayXcd phases =
          (Complex(0.0, -1.0) * dt * s.eigenvalues.array().cast<Complex>()).exp();
      psi = s.eigenvectors * (phases * (s.eigenvectors.adjoint() * psi).array()).matrix();
    }
    const Matrix h_a = sec.hamiltonian_at(p.h1);
    const double E_Aprime = (psi.adjoint() * h_a * psi)(0, 0).real();
    const Eigen::ArrayXcd free_phases =
        (Complex(0.0, -1.0) * p.tau_k * sec.h0_diag.array().cast<Complex>()).exp();
    const Vector psi_a = (free_phases * psi.array()).matrix();
    const double E_A = (psi_a.adjoint() * h_a * psi_a)(0, 0).real();
    return assemble_cycle_result(E_A, hot.E_B, hot.E_C, E_D, E_Aprime, p, p.tau_k);
  }

 private:
  double block_energy(const MomentumSector& sec, const Matrix& rho, double h) const {
    return sec.hamiltonian_at(h).cwiseProduct(rho.transpose()).sum().real();
  }

  double energy(const std::vector<Matrix>& blocks, double h) const {
    double e = 0.0;
    const auto& sectors = basis_.sectors();
    for (std::size_t si = 0; si < sectors.size(); ++si)
      if (sectors[si].dim() > 0) e += block_energy(sectors[si], blocks[si], h);
    return e;
  }

  // Gibbs blocks with a global partition function; at T = 0 the uniform
  // mixture spreads over the globally degenerate ground eigenspace.
  std::vector<Matrix> gibbs_blocks(double h, double temperature) const {
    if (std::isnan(temperature) || temperature < 0.0)
      throw std::domain_error("gibbs_blocks: temperature must be >= 0");
    const auto& sectors = basis_.sectors();
    std::vector<Spectrum> spectra(sectors.size());
    double e0 = std::numeric_limits<double>::infinity();
    for (std::size_t si = 0; si < sectors.size(); ++si) {
      if (sectors[si].dim() == 0) continue;
      spectra[si] = eigh(HermitianOperator(sectors[si].hamiltonian_at(h)));
      e0 = std::min(e0, spectra[si].eigenvalues(0));
    }
    double z = 0.0;
    std::vector<RealVector> weights(sectors.size());
    for (std::size_t si = 0; si < sectors.size(); ++si) {
      if (sectors[si].dim() == 0) continue;
      const RealVector& ev = spectra[si].eigenvalues;
      RealVector w(ev.size());
      if (temperature == 0.0) {
        const double gap_tol = 1e-9 * std::max(1.0, std::abs(e0));
        for (Eigen::Index i = 0; i < ev.size(); ++i)
          w(i) = (ev(i) - e0 <= gap_tol) ? 1.0 : 0.0;
      } else {
        w = (-(ev.array() - e0) / temperature).exp().matrix();
      }
      z += w.sum();
      weights[si] = std::move(w);
    }
    std::vector<Matrix> blocks(sectors.size());
    for (std::size_t si = 0; si < sectors.size(); ++si) {
      if (sectors[si].dim() == 0) continue;
      blocks[si] = spectra[si].eigenvectors * (weights[si] / z).asDiagonal() *
                   spectra[si].eigenvectors.adjoint();
    }
    return blocks;
  }

  // Sectors evolve independently, so the loop runs sector-outer with one
  // preallocated workspace per sector (no per-step heap traffic) and sectors
  // spread across the worker threads.
  void ramp_blocks(std::vector<Matrix>& blocks, const RampProtocol& protocol,
                   double dt_max) const {
    const int steps = detail::step_count(protocol.duration, dt_max);
    if (steps == 0) return;
    const double dt = protocol.duration / steps;
    const auto& sectors = basis_.sectors();
    parallel_for(sectors.size(), [&](std::size_t si) {
      const MomentumSector& sec = sectors[si];
      const Eigen::Index d = sec.dim();
      if (d == 0) return;
      EighWorkspace eig;
      Matrix ham(d, d), u(d, d), scaled(d, d), scratch(d, d);
      Vector phases(d);
      Matrix& block = blocks[si];
      for (int j = 0; j < steps; ++j) {
        ham.noalias() = protocol.field_at((j + 0.5) * dt) * sec.h1;
        ham.diagonal() += sec.h0_diag.cast<Complex>();
        eig.compute(ham);
        phases = (Complex(0.0, -1.0) * dt *
                  eig.eigenvalues().array().cast<Complex>()).exp();
        scaled.noalias() = eig.eigenvectors() * phases.asDiagonal();
        u.noalias() = scaled * eig.eigenvectors().adjoint();
        scratch.noalias() = u * block;
        block.noalias() = scratch * u.adjoint();
      }
    });
  }

  SectorBasis basis_;
};

inline CycleResult run_cycle(const ModelSpec& spec, const CycleParams& p,
                             int max_sites = kDefaultMaxSites) {
  return SectorCycleEngine(spec, max_sites).run(p);
}

inline CycleResult run_cycle_statevector(const ModelSpec& spec,
                                         const CycleParams& p,
                                         int max_sites = kDefaultMaxSites) {
  return SectorCycleEngine(spec, max_sites).run_statevector(p);
}

}  // namespace qotto
