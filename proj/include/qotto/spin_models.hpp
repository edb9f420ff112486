// spin_models.hpp — Periodic TIM / LTIM chain Hamiltonians in the z
// computational basis, split into a static part H0 and a driven part H1 so
// that H(h) = H0 + h*H1.
//
// Basis convention: state index s encodes the chain little-endian, spin n is
// bit n of s, bit value 0 means sigma^z = +1. The drive couples through
// H1 = -sum_n sigma^x_n, which flips single bits.

#pragma once

#include <qotto/linalg.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qotto {

enum class Model { TIM, LTIM };

inline const char* to_string(Model m) {
  return m == Model::TIM ? "tim" : "ltim";
}

inline Model model_from_string(const std::string& name) {
  if (name == "tim" || name == "TIM") return Model::TIM;
  if (name == "ltim" || name == "LTIM") return Model::LTIM;
  throw std::invalid_argument("unknown model '" + name + "' (expected tim or ltim)");
}

// Spins beyond this go through the momentum-space engine; the dense kernels
// are all O(dim^2..3) with dim = 2^L.
inline constexpr int kDefaultMaxSites = 12;

struct ModelSpec {
  Model model = Model::TIM;
  int L = 8;        // spin count, periodic chain
  double J = 1.0;   // nearest-neighbour coupling
  double Bz = 0.0;  // longitudinal field, used by LTIM only
};

inline void validate(const ModelSpec& spec, int max_sites = kDefaultMaxSites) {
  if (spec.L < 2)
    throw std::invalid_argument("ModelSpec: L must be >= 2");
  if (spec.L > max_sites)
    throw std::invalid_argument("ModelSpec: L = " + std::to_string(spec.L) +
                                " exceeds the dense-path cap of " +
                                std::to_string(max_sites));
  if (spec.J == 0.0 || !std::isfinite(spec.J))
    throw std::invalid_argument("ModelSpec: J must be finite and non-zero");
  if (!std::isfinite(spec.Bz))
    throw std::invalid_argument("ModelSpec: Bz must be finite");
}

// Diagonal of the static part for one basis state.
//   TIM : -J sum_n z_n z_{n+1}
//   LTIM: +J sum_n z_n z_{n+1} - Bz sum_n z_n
inline double static_diagonal_entry(const ModelSpec& spec, std::uint32_t state) {
  double bonds = 0.0;
  double zsum = 0.0;
  for (int n = 0; n < spec.L; ++n) {
    const double zn = ((state >> n) & 1u) ? -1.0 : 1.0;
    const int m = (n + 1) % spec.L;
    const double zm = ((state >> m) & 1u) ? -1.0 : 1.0;
    bonds += zn * zm;
    zsum += zn;
  }
  return spec.model == Model::TIM ? -spec.J * bonds
                                  : spec.J * bonds - spec.Bz * zsum;
}

struct SplitHamiltonian {
  HermitianOperator H0;    // static part, diagonal in the z basis
  HermitianOperator H1;    // drive operator, multiplied by the field h(t)
  RealVector h0_diagonal;  // diag(H0), kept for the free-evolution fast path

  HermitianOperator at(double h) const {
    return HermitianOperator(H0.matrix() + h * H1.matrix());
  }
};

inline SplitHamiltonian build_split(const ModelSpec& spec,
                                    int max_sites = kDefaultMaxSites) {
  validate(spec, max_sites);
  const Eigen::Index dim = Eigen::Index(1) << spec.L;
  RealVector diag(dim);
  for (Eigen::Index s = 0; s < dim; ++s)
    diag(s) = static_diagonal_entry(spec, static_cast<std::uint32_t>(s));

  Matrix h1 = Matrix::Zero(dim, dim);
  for (Eigen::Index s = 0; s < dim; ++s)
    for (int n = 0; n < spec.L; ++n)
      h1(s ^ (Eigen::Index(1) << n), s) += -1.0;

  Matrix h0 = Matrix::Zero(dim, dim);
  h0.diagonal() = diag.cast<Complex>();
  return SplitHamiltonian{HermitianOperator(std::move(h0)),
                          HermitianOperator(std::move(h1)), std::move(diag)};
}

// Linear field ramp on a local stroke clock t in [0, duration].
struct RampProtocol {
  double h_start = 0.0;
  double h_end = 0.0;
  double duration = 0.0;

  double field_at(double t) const {
    const double slack = 1e-12 * std::max(1.0, duration);
    if (!(t >= -slack && t <= duration + slack))
      throw std::out_of_range("RampProtocol: t outside [0, duration]");
    if (duration <= 0.0) return h_end;
    const double x = std::min(std::max(t, 0.0), duration) / duration;
    return h_start + (h_end - h_start) * x;
  }
};

}  // namespace qotto
