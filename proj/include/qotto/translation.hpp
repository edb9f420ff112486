// translation.hpp — Exact momentum-sector factorization of the periodic
// TIM / LTIM Hamiltonians. Both H0 and H1 commute with the one-site cyclic
// shift, so every object in the cycle (Gibbs states, ramp unitaries, free
// phases) is block diagonal over the L momentum sectors. Evolving blocks of
// size d_q ~ 2^L / L instead of the full 2^L matrix is what makes the dense
// engine affordable at L = 10..12; the factorization is exact, not an
// approximation.
//
// Sector basis: for each necklace orbit {T^j r} with representative r (the
// smallest state in the orbit) and period p, and each momentum index q with
// q*p = 0 (mod L),
//   |q, r> = p^(-1/2) sum_{j<p} exp(+2*pi*i*q*j/L) |T^j r>.

#pragma once

#include <qotto/spin_models.hpp>

#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

namespace qotto {

namespace detail {
inline std::uint32_t rotate_site(std::uint32_t s, int L) {
  const std::uint32_t mask = (L == 32) ? ~0u : ((1u << L) - 1u);
  return ((s << 1) | (s >> (L - 1))) & mask;
}
}  // namespace detail

struct MomentumSector {
  int q = 0;                            // momentum 2*pi*q/L
  std::vector<std::uint32_t> reps;      // orbit representative per basis state
  std::vector<int> periods;             // orbit period per basis state
  RealVector h0_diag;                   // static part (diagonal in this basis)
  Matrix h1;                            // drive operator block

  Eigen::Index dim() const { return h0_diag.size(); }
  Matrix hamiltonian_at(double h) const {
    Matrix m = h * h1;
    m.diagonal() += h0_diag.cast<Complex>();
    return m;
  }
};

class SectorBasis {
 public:
  explicit SectorBasis(const ModelSpec& spec, int max_sites = kDefaultMaxSites)
      : spec_(spec) {
    validate(spec, max_sites);
    build();
  }

  const ModelSpec& spec() const { return spec_; }
  int sites() const { return spec_.L; }
  Eigen::Index full_dim() const { return Eigen::Index(1) << spec_.L; }
  const std::vector<MomentumSector>& sectors() const { return sectors_; }

  // Full-space column vector of sector-basis coefficients (test/diagnostic use).
  Vector to_full(int sector_index, const Vector& coeffs) const {
    const MomentumSector& sec = sectors_.at(static_cast<std::size_t>(sector_index));
    if (coeffs.size() != sec.dim())
      throw std::invalid_argument("SectorBasis::to_full: coefficient size mismatch");
    Vector out = Vector::Zero(full_dim());
    for (Eigen::Index c = 0; c < sec.dim(); ++c) {
      const std::uint32_t rep = sec.reps[static_cast<std::size_t>(c)];
      const int p = sec.periods[static_cast<std::size_t>(c)];
      const double norm = 1.0 / std::sqrt(static_cast<double>(p));
      std::uint32_t state = rep;
      for (int j = 0; j < p; ++j) {
        out(state) += coeffs(c) * phase(sec.q, j) * norm;
        state = detail::rotate_site(state, spec_.L);
      }
    }
    return out;
  }

  // Full-space density matrix from per-sector blocks (test/diagnostic use).
  Matrix to_full_density(const std::vector<Matrix>& blocks) const {
    if (blocks.size() != sectors_.size())
      throw std::invalid_argument("SectorBasis::to_full_density: block count mismatch");
    Matrix out = Matrix::Zero(full_dim(), full_dim());
    for (std::size_t si = 0; si < sectors_.size(); ++si) {
      const MomentumSector& sec = sectors_[si];
      Matrix cols(full_dim(), sec.dim());
      for (Eigen::Index c = 0; c < sec.dim(); ++c) {
        Vector unit = Vector::Zero(sec.dim());
        unit(c) = 1.0;
        cols.col(c) = to_full(static_cast<int>(si), unit);
      }
      out += cols * blocks[si] * cols.adjoint();
    }
    return out;
  }

 private:
  double angle(int q, int j) const {
    return 2.0 * std::numbers::pi * q * j / spec_.L;
  }
  Complex phase(int q, int j) const {
    return Complex(std::cos(angle(q, j)), std::sin(angle(q, j)));
  }

  void build() {
    const int L = spec_.L;
    const std::uint32_t dim = 1u << L;

    // Necklace orbits of the cyclic shift.
    std::vector<std::int32_t> orbit_of(dim, -1);
    std::vector<std::int32_t> shift_of(dim, 0);  // state = T^shift rep
    std::vector<std::uint32_t> reps;
    std::vector<int> periods;
    std::vector<std::uint32_t> scratch;
    for (std::uint32_t s = 0; s < dim; ++s) {
      if (orbit_of[s] >= 0) continue;
      scratch.clear();
      std::uint32_t t = s;
      do {
        scratch.push_back(t);
        t = detail::rotate_site(t, L);
      } while (t != s);
      const int p = static_cast<int>(scratch.size());
      int jm = 0;
      for (int j = 1; j < p; ++j)
        if (scratch[static_cast<std::size_t>(j)] < scratch[static_cast<std::size_t>(jm)]) jm = j;
      const auto orbit_id = static_cast<std::int32_t>(reps.size());
      for (int j = 0; j < p; ++j) {
        const std::uint32_t state = scratch[static_cast<std::size_t>((jm + j) % p)];
        orbit_of[state] = orbit_id;
        shift_of[state] = j;
      }
      reps.push_back(scratch[static_cast<std::size_t>(jm)]);
      periods.push_back(p);
    }

    sectors_.reserve(static_cast<std::size_t>(L));
    for (int q = 0; q < L; ++q) {
      MomentumSector sec;
      sec.q = q;
      std::vector<std::int32_t> column_of(reps.size(), -1);
      for (std::size_t o = 0; o < reps.size(); ++o) {
        if ((q * periods[o]) % L != 0) continue;
        column_of[o] = static_cast<std::int32_t>(sec.reps.size());
        sec.reps.push_back(reps[o]);
        sec.periods.push_back(periods[o]);
      }
      const Eigen::Index d = static_cast<Eigen::Index>(sec.reps.size());
      sec.h0_diag.resize(d);
      sec.h1 = Matrix::Zero(d, d);
      for (Eigen::Index c = 0; c < d; ++c) {
        const std::uint32_t rep = sec.reps[static_cast<std::size_t>(c)];
        const int p = sec.periods[static_cast<std::size_t>(c)];
        sec.h0_diag(c) = static_diagonal_entry(spec_, rep);
        const double col_norm = 1.0 / std::sqrt(static_cast<double>(p));
        std::uint32_t state = rep;
        for (int j = 0; j < p; ++j) {
          const Complex amp = phase(q, j) * col_norm;
          for (int n = 0; n < L; ++n) {
            const std::uint32_t flipped = state ^ (1u << n);
            const std::int32_t row_orbit = orbit_of[flipped];
            const std::int32_t row = column_of[static_cast<std::size_t>(row_orbit)];
            if (row < 0) continue;  // orbit not present at this momentum
            const int pb = periods[static_cast<std::size_t>(row_orbit)];
            const Complex bra = std::conj(phase(q, shift_of[flipped])) /
                                std::sqrt(static_cast<double>(pb));
            sec.h1(row, c) += -1.0 * amp * bra;
          }
          state = detail::rotate_site(state, L);
        }
      }
      if (d > 0 && max_abs(sec.h1 - sec.h1.adjoint()) > tol::kHermiticity)
        throw std::logic_error("SectorBasis: sector drive block is not Hermitian");
      sec.h1 = ((sec.h1 + sec.h1.adjoint()) / 2.0).eval();
      sectors_.push_back(std::move(sec));
    }
  }

  ModelSpec spec_;
  std::vector<MomentumSector> sectors_;
};

}  // namespace qotto
