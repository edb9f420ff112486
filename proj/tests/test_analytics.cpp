#include <catch2/catch_amalgamated.hpp>

#include <qotto/analytics.hpp>

#include "helpers.hpp"

using namespace qotto;
using qotto::testing::all_plus_x_state;
using qotto::testing::reference_params;

TEST_CASE("two-spin coefficients at the two-spin reference point") {
  // h1 = 10, h2 = 0.1, J = 1, T_C = 0.01; frozen against an independent
  // evaluation of the hyperbolic ratios
  const TwoSpinCoefficients c = two_spin_coefficients(10.0, 0.1, 1.0, 0.01);
  CHECK(c.alpha == Catch::Approx(0.36347176707).epsilon(1e-9));
  CHECK(c.delta == Catch::Approx(-0.134715394916).epsilon(1e-9));
  CHECK(two_spin_energy_Aprime(c, 10.0, 1.0) ==
        Catch::Approx(-15.2231209693).epsilon(1e-9));
}

TEST_CASE("two-spin coefficients survive deep cold temperatures") {
  // T_C = 0.001 drives the hyperbolic arguments to ~2000; the factored form
  // must neither overflow nor lose the leading behaviour
  const TwoSpinCoefficients c = two_spin_coefficients(10.0, 0.2, 1.0, 0.001);
  CHECK(std::isfinite(c.alpha));
  CHECK(std::isfinite(c.delta));
  CHECK(c.alpha == Catch::Approx(0.497518595105).epsilon(1e-9));
  CHECK(std::abs(c.delta) < 1e-15);
  CHECK(two_spin_energy_Aprime(c, 10.0, 1.0) ==
        Catch::Approx(-20.0997512422).epsilon(1e-9));
}

TEST_CASE("zero-temperature limits of the two-spin coefficients") {
  // for h2 > 0 the A' energy must equal the ground energy -2 sqrt(h1^2+J^2)
  const double h1 = 10.0, J = 1.0;
  const TwoSpinCoefficients c0 = two_spin_coefficients(h1, 0.1, J, 0.0);
  CHECK(c0.alpha == Catch::Approx(h1 / (2.0 * std::sqrt(h1 * h1 + J * J))).epsilon(1e-12));
  CHECK(c0.delta == Catch::Approx(0.0).margin(1e-15));
  CHECK(two_spin_energy_Aprime(c0, h1, J) ==
        Catch::Approx(-2.0 * std::sqrt(h1 * h1 + J * J)).epsilon(1e-12));
  // continuity: tiny but nonzero T_C approaches the same values
  const TwoSpinCoefficients ct = two_spin_coefficients(h1, 0.1, J, 1e-5);
  CHECK(ct.alpha == Catch::Approx(c0.alpha).epsilon(1e-9));
  CHECK(ct.delta == Catch::Approx(c0.delta).margin(1e-12));
  // h2 = 0 ties the two hyperbolic arguments: half weight in the ground pair
  const TwoSpinCoefficients cz = two_spin_coefficients(h1, 0.0, J, 0.0);
  CHECK(cz.alpha == Catch::Approx(h1 / (4.0 * std::sqrt(h1 * h1 + J * J))).epsilon(1e-12));
  CHECK(cz.delta == Catch::Approx(-0.25).epsilon(1e-12));
  const TwoSpinCoefficients cz2 = two_spin_coefficients(h1, 0.0, J, 0.01);
  CHECK(cz2.alpha == Catch::Approx(0.248759297552).epsilon(1e-9));
  CHECK(cz2.delta == Catch::Approx(-0.25).epsilon(1e-6));
  CHECK_THROWS_AS(two_spin_coefficients(h1, 0.1, J, -1.0), std::domain_error);
}

TEST_CASE("closed-form E_A evaluates the fixed phase cross-terms literally") {
  const TwoSpinCoefficients c{0.36347176707, -0.134715394916};
  const double h1 = 10.0, J = 1.0;
  // frozen from an independent scalar evaluation
  const double expected_tk0 =
      -4.0 * h1 * c.alpha - (4.0 * c.alpha / h1) * std::cos(40.0) + 4.0 * c.delta;
  CHECK(two_spin_energy_A(0.0, c, h1, J) == Catch::Approx(expected_tk0).epsilon(1e-12));
  CHECK(two_spin_energy_A(0.0, c, h1, J) == Catch::Approx(-14.9815).epsilon(1e-4));
  // the dephased form reduces to the A' energy at tau_k = 0, the literal
  // form does not (the cos(4 h1) phase survives)
  CHECK(two_spin_energy_A_dephased(0.0, c, h1, J) ==
        Catch::Approx(two_spin_energy_Aprime(c, h1, J)).epsilon(1e-14));
  CHECK(std::abs(two_spin_energy_A(0.0, c, h1, J) -
                 two_spin_energy_Aprime(c, h1, J)) > 0.1);
}

TEST_CASE("dephased closed form matches free evolution of the transported thermal state") {
  // build the ideal adiabatic state at A' directly: cold-point thermal
  // populations attached to the h1 eigenbasis in spectral order
  const double h1 = 10.0, h2 = 0.1, J = 1.0, T_C = 0.01;
  const ModelSpec spec{Model::TIM, 2, J, 0.0};
  const SplitHamiltonian split = build_split(spec);
  const Spectrum cold = eigh(split.at(h2));
  const Spectrum hot = eigh(split.at(h1));
  RealVector w(4);
  double z = 0.0;
  for (int i = 0; i < 4; ++i) {
    w(i) = std::exp(-(cold.eigenvalues(i) - cold.eigenvalues(0)) / T_C);
    z += w(i);
  }
  const Matrix rho_ap =
      hot.eigenvectors * (w / z).asDiagonal() * hot.eigenvectors.adjoint();
  const TwoSpinCoefficients c = two_spin_coefficients(h1, h2, J, T_C);
  const HermitianOperator h_a = split.at(h1);
  for (double tau_k : {0.0, 0.1, 0.3, 0.7, 1.2}) {
    const DensityOperator rho_a =
        free_evolve(DensityOperator(rho_ap), split.H0, tau_k);
    const double simulated = expectation(h_a, rho_a);
    CHECK(simulated ==
          Catch::Approx(two_spin_energy_A_dephased(tau_k, c, h1, J)).epsilon(1e-10));
  }
}

TEST_CASE("A' closed form matches a slow simulated return ramp") {
  const double h1 = 10.0, h2 = 0.1, J = 1.0, T_C = 0.01;
  CycleParams p;
  p.h1 = h1;
  p.h2 = h2;
  p.T_H = 100.0;
  p.T_C = T_C;
  p.tau1 = 0.1;
  p.tau2 = 400.0;  // residual diabatic error ~1e-5 relative at this rate
  p.dt_max = 2e-3;
  const SectorCycleEngine engine(ModelSpec{Model::TIM, 2, J, 0.0});
  const auto front = engine.run_front(p);
  const TwoSpinCoefficients c = two_spin_coefficients(h1, h2, J, T_C);
  const double closed = two_spin_energy_Aprime(c, h1, J);
  CHECK(std::abs(front.E_Aprime - closed) / std::abs(closed) < 1e-3);
}

TEST_CASE("stationary points of the closed-form energy") {
  const double h1 = 10.0, J = 1.0;
  const TwoSpinCoefficients c = two_spin_coefficients(h1, 0.1, J, 0.01);
  const auto points = two_spin_stationary_points(h1, J, std::numbers::pi / 2.0);
  REQUIRE(points.size() >= 2);
  for (double tau : points) {
    CHECK(std::tan(4.0 * J * tau) ==
          Catch::Approx((J / h1) * std::sin(4.0 * h1)).margin(1e-12));
    const double eps = 1e-6;
    const double d = (two_spin_energy_A(tau + eps, c, h1, J) -
                      two_spin_energy_A(tau - eps, c, h1, J)) /
                     (2.0 * eps);
    CHECK(std::abs(d) < 1e-6);
  }
}

TEST_CASE("closed-form minima sit near multiples of pi/4 when h1 >> J") {
  // tan(4 J tau) = (J/h1) sin(4 h1) pins stationary points within
  // atan(1/h1)/4 of the grid n*pi/4
  const auto points = two_spin_stationary_points(200.0, 1.0, std::numbers::pi);
  for (double tau : points) {
    const double nearest = std::round(tau / (std::numbers::pi / 4.0)) *
                           (std::numbers::pi / 4.0);
    CHECK(std::abs(tau - nearest) < 2e-3);
  }
}

TEST_CASE("ground-state return probability, single ring") {
  SECTION("closed form vs brute-force phase evolution") {
    for (int L : {2, 4, 6}) {
      const double J = 1.0;
      const SplitHamiltonian split = build_split(ModelSpec{Model::TIM, L, J, 0.0});
      const Vector psi0 = all_plus_x_state(L);
      for (int i = 0; i <= 40; ++i) {
        const double tau = 4.0 * i / 40.0;
        const Eigen::ArrayXcd phases =
            (Complex(0.0, -1.0) * tau * split.h0_diagonal.array().cast<Complex>()).exp();
        const Complex amp = (psi0.adjoint() * (phases * psi0.array()).matrix())(0, 0);
        CHECK(ground_state_probability_tim(L, J, tau) ==
              Catch::Approx(std::norm(amp)).margin(1e-12));
      }
    }
  }
  SECTION("L = 2 collapses to cos^2(2 J tau)") {
    for (double tau : {0.0, 0.3, 1.1, 2.7})
      CHECK(ground_state_probability_tim(2, 1.0, tau) ==
            Catch::Approx(std::pow(std::cos(2.0 * tau), 2)).margin(1e-14));
  }
  SECTION("L = 4 collapses to (cos^4 + sin^4)^2") {
    for (double tau : {0.0, 0.3, 1.1, 2.7}) {
      const double c = std::cos(tau), s = std::sin(tau);
      CHECK(ground_state_probability_tim(4, 1.0, tau) ==
            Catch::Approx(std::pow(std::pow(c, 4) + std::pow(s, 4), 2)).margin(1e-14));
    }
  }
  SECTION("bounds, periodicity, and the tau = 0 anchor") {
    for (int L : {2, 4, 6, 8}) {
      CHECK(ground_state_probability_tim(L, 1.0, 0.0) == Catch::Approx(1.0));
      for (int i = 0; i <= 25; ++i) {
        const double tau = 3.3 * i / 25.0;
        const double pr = ground_state_probability_tim(L, 1.0, tau);
        CHECK(pr >= 0.0);
        CHECK(pr <= 1.0 + 1e-12);
        CHECK(ground_state_probability_tim(L, 1.0, tau + std::numbers::pi) ==
              Catch::Approx(pr).margin(1e-12));
      }
    }
  }
  SECTION("maxima at even multiples of pi/4, independent of L") {
    for (int L : {2, 4, 6, 8}) {
      for (int n : {0, 2, 4}) {
        const double tau = n * std::numbers::pi / 4.0;
        CHECK(ground_state_probability_tim(L, 1.0, tau) ==
              Catch::Approx(1.0).margin(1e-12));
      }
    }
  }
}

TEST_CASE("ground-state return probability with a longitudinal field") {
  SECTION("closed forms vs brute force for L = 2 and L = 4") {
    for (int L : {2, 4}) {
      for (const auto [J, Bz] : {std::pair{1.0, 1.0}, std::pair{1.3, 0.7}}) {
        const SplitHamiltonian split =
            build_split(ModelSpec{Model::LTIM, L, J, Bz});
        const Vector psi0 = all_plus_x_state(L);
        for (int i = 0; i <= 40; ++i) {
          const double tau = 6.5 * i / 40.0;
          const Eigen::ArrayXcd phases =
              (Complex(0.0, -1.0) * tau * split.h0_diagonal.array().cast<Complex>()).exp();
          const Complex amp = (psi0.adjoint() * (phases * psi0.array()).matrix())(0, 0);
          CHECK(ground_state_probability_ltim(L, J, Bz, tau) ==
                Catch::Approx(std::norm(amp)).margin(1e-12));
        }
      }
    }
  }
  SECTION("maxima at multiples of pi for Bz = J = 1") {
    for (int L : {2, 4}) {
      for (int n : {0, 1, 2, 3}) {
        CHECK(ground_state_probability_ltim(L, 1.0, 1.0, n * std::numbers::pi) ==
              Catch::Approx(1.0).margin(1e-12));
      }
      CHECK(ground_state_probability_ltim(L, 1.0, 1.0, 0.6) < 0.9);
    }
  }
  SECTION("unsupported sizes are rejected") {
    CHECK_THROWS_AS(ground_state_probability_ltim(6, 1.0, 1.0, 0.3),
                    std::invalid_argument);
  }
}

TEST_CASE("golden-section minimizer") {
  const auto f = [](double x) { return (x - 1.3) * (x - 1.3) + 0.5; };
  const auto [x, v] = golden_section_minimize(f, 0.0, 3.0, 1e-6);
  CHECK(x == Catch::Approx(1.3).margin(1e-5));
  CHECK(v == Catch::Approx(0.5).margin(1e-9));
}

TEST_CASE("tau_k optimizer on the two-spin chain") {
  ModelSpec spec{Model::TIM, 2, 1.0, 0.0};
  CycleParams p;
  p.h1 = 10.0;
  p.h2 = 0.1;
  p.T_H = 100.0;
  p.T_C = 0.01;
  p.tau1 = 0.1;
  p.tau_bath = 0.2;
  SECTION("slow return ramp: optimum at 0 modulo pi/2") {
    p.tau2 = 200.0;
    p.dt_max = 2e-3;
    const TauKScan scan = tau_k_optimizer(spec, p);
    const double period = std::numbers::pi / 2.0;
    const double frac = std::fmod(scan.tau_k_opt, period);
    const double dist = std::min(frac, period - frac);
    CHECK(dist < 2e-3);
  }
  SECTION("fast return ramp: optimum near 0.3") {
    p.tau2 = 0.1;
    const TauKScan scan = tau_k_optimizer(spec, p);
    CHECK(scan.tau_k_opt == Catch::Approx(0.3).margin(0.05));
    CHECK(scan.E_A_min < scan.scan.front().second);  // beats tau_k = 0
  }
  SECTION("scan trace covers the window and brackets the optimum") {
    p.tau2 = 0.1;
    const TauKScan scan = tau_k_optimizer(spec, p, 0.0, 65);
    REQUIRE(scan.scan.size() == 65);
    CHECK(scan.scan.front().first == 0.0);
    CHECK(scan.scan.back().first ==
          Catch::Approx(std::numbers::pi / 2.0).margin(1e-12));
    for (const auto& [tau, e] : scan.scan) CHECK(e >= scan.E_A_min - 1e-9);
  }
  SECTION("optimized energy never exceeds the A' energy") {
    p.tau2 = 0.1;
    const SectorCycleEngine engine(spec);
    const auto front = engine.run_front(p);
    const TauKScan scan =
        optimize_free_segment(engine.free_segment_scan(front, p.h1),
                              std::numbers::pi / 2.0, 129);
    CHECK(scan.E_A_min <= front.E_Aprime + 1e-12);
  }
  SECTION("grid preconditions") {
    CHECK_THROWS_AS(tau_k_optimizer(spec, p, 1.0, 8), std::invalid_argument);
  }
}

TEST_CASE("optimizer tie-breaks periodic degeneracy toward small tau_k") {
  // an exactly periodic objective: minima at 0, pi/2, pi, ...
  FreeEvolutionEnergyScan scan;
  Matrix h = Matrix::Zero(2, 2);
  h(0, 1) = 1.0;
  h(1, 0) = 1.0;
  Matrix rho = Matrix::Constant(2, 2, Complex(0.5, 0.0));
  RealVector gen(2);
  gen << 0.0, 4.0;
  scan.add_diagonal_block(h, rho, gen);  // energy = cos(4 tau): minima at pi/4, 3pi/4
  const TauKScan out = optimize_free_segment(scan, std::numbers::pi, 129);
  CHECK(out.tau_k_opt == Catch::Approx(std::numbers::pi / 4.0).margin(1e-3));
  CHECK(out.E_A_min == Catch::Approx(-1.0).margin(1e-9));
}
