#include <doctest.h>

#include <random>

#include "qsl/geometry.hpp"
#include "qsl/spin_example.hpp"
#include "test_helpers.hpp"

using namespace qsl;
using namespace qsl::testing;
using qsl::spin::pauli_x;
using qsl::spin::pauli_z;

namespace {

SplitHamiltonian unitary(const Matrix& h0) {
    int d = static_cast<int>(h0.rows());
    return SplitHamiltonian(ComplexMatrix(h0, Symmetry::Hermitian),
                            ComplexMatrix(Matrix::Zero(d, d), Symmetry::Hermitian));
}

}  // namespace

TEST_CASE("speed_from_operators on hand-computed cases") {
    auto h = unitary(pauli_z() + pauli_x());
    CHECK(speed_from_operators(h, plus_state(), 0.0) == doctest::Approx(2.0).epsilon(1e-12));

    // eigenstate of both parts: zero speed
    spin::SpinExampleConfig cfg;
    cfg.f = 3.0;
    auto ex = spin::build_example(cfg);
    StateVector ground(ex.measurement.eigenvectors().col(0).eval());
    CHECK(speed_from_operators(ex.hamiltonian, ground, 0.0) < 1e-7);
}

TEST_CASE("operator and finite-difference speeds agree") {
    spin::SpinExampleConfig cfg;
    cfg.f = 0.5;
    auto ex = spin::build_example(cfg);
    double dt = 1e-5;
    auto grid = spin::linspace(0.05, 0.15, 10001);
    auto traj = evolve_exp(ex.hamiltonian, ex.psi0, grid);
    auto v_fd = speed_from_trajectory(traj);
    for (int k = 1; k + 1 < traj.samples(); k += 500) {
        double v_op = speed_from_operators(ex.hamiltonian, StateVector(traj.psi[k]), grid[k]);
        CHECK(std::abs(v_op - v_fd[static_cast<std::size_t>(k)]) <
              std::max(1e-5, 10.0 * dt * dt));
    }
}

TEST_CASE("speed_from_trajectory on stationary and unitary flows") {
    SUBCASE("stationary state has zero speed") {
        auto traj = evolve_exp(unitary(pauli_z()), ket(0, 2), spin::linspace(0.0, 1.0, 101));
        for (double v : speed_from_trajectory(traj)) CHECK(v < 1e-7);
    }

    SUBCASE("pure unitary flow has constant speed") {
        auto traj = evolve_exp(unitary(pauli_z() + pauli_x()), plus_state(),
                               spin::linspace(0.0, 1.0, 2001));
        auto v = speed_from_trajectory(traj);
        for (int k = 1; k + 1 < traj.samples(); ++k) {
            CHECK(v[static_cast<std::size_t>(k)] == doctest::Approx(2.0).epsilon(1e-6));
        }
    }

    SUBCASE("degenerate grid is rejected") {
        Trajectory traj = evolve_exp(unitary(pauli_z()), ket(0, 2), {0.0, 0.1, 0.3});
        CHECK_THROWS_AS(speed_from_trajectory(traj), std::invalid_argument);
    }
}

TEST_CASE("average_speed trapezoid rule") {
    std::vector<double> times = spin::linspace(0.0, 1.0, 1001);
    std::vector<double> constant(times.size(), 2.0);
    CHECK(average_speed(constant, times) == doctest::Approx(2.0).epsilon(1e-14));

    std::vector<double> linear(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) linear[k] = times[k];
    CHECK(std::abs(average_speed(linear, times) - 0.5) < 1e-9);

    CHECK_THROWS_AS(average_speed({1.0, 1.0}, {0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("geodesic_distance endpoints and the free-evolution maximum") {
    CHECK(geodesic_distance(plus_state(), plus_state()) == doctest::Approx(0.0));
    CHECK(geodesic_distance(ket(0, 2), ket(1, 2)) == doctest::Approx(M_PI));
    CHECK_THROWS_AS(geodesic_distance(ket(0, 2), ket(0, 3)), std::invalid_argument);

    // free two-level evolution: max over T of S0 is exactly pi/2 (Bloch cone)
    auto h = unitary(pauli_z() + pauli_x());
    double max_s0 = 0.0;
    for (double T : spin::linspace(0.01, 3.0, 300)) {
        auto traj = evolve_exp(h, plus_state(), {0.0, T});
        max_s0 = std::max(max_s0,
                          geodesic_distance(plus_state(), StateVector(traj.psi.back())));
    }
    CHECK(max_s0 == doctest::Approx(M_PI / 2.0).epsilon(1e-3));
}

TEST_CASE("qsl_time report and bound") {
    SUBCASE("geodesic path saturates the bound") {
        // rotation about x from |0>: a great circle, so t_qsl equals T
        auto h = unitary(pauli_x());
        double T = 0.7;
        auto grid = spin::linspace(0.0, T, 1001);
        auto traj = evolve_exp(h, ket(0, 2), grid);
        auto rep = qsl_time(traj, speed_from_trajectory(traj));
        CHECK(rep.t_qsl <= T + 1e-6);
        CHECK(rep.t_qsl == doctest::Approx(T).epsilon(0.02));
        CHECK(rep.path_length >= rep.geodesic - 1e-6);
    }

    SUBCASE("non-geodesic free path stays strictly above the bound") {
        auto h = unitary(pauli_z() + pauli_x());
        double T = M_PI / std::sqrt(2.0);  // first maximum of S0
        auto grid = spin::linspace(0.0, T, 1001);
        auto traj = evolve_exp(h, plus_state(), grid);
        auto rep = qsl_time(traj, speed_from_trajectory(traj));
        CHECK(rep.t_qsl <= T + 1e-8);
        CHECK(rep.t_qsl < 0.98 * T);
    }

    SUBCASE("stationary state gives a zero report") {
        auto traj = evolve_exp(unitary(pauli_z()), ket(0, 2), spin::linspace(0.0, 1.0, 101));
        auto rep = qsl_time(traj, speed_from_trajectory(traj));
        CHECK(rep.geodesic == doctest::Approx(0.0).epsilon(1e-8));
        CHECK(rep.t_qsl == doctest::Approx(0.0).epsilon(1e-6));
    }

    SUBCASE("measured example run satisfies every report invariant") {
        spin::SpinExampleConfig cfg;
        cfg.f = 5.0;
        auto ex = spin::build_example(cfg);
        auto grid = spin::linspace(0.0, 1.0, 2001);
        auto traj = evolve_exp(ex.hamiltonian, ex.psi0, grid);
        std::vector<double> v(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k)
            v[k] = speed_from_operators(ex.hamiltonian, StateVector(traj.psi[k]), grid[k]);
        auto rep = qsl_time(traj, v);
        CHECK(rep.t_qsl < rep.total_time);
        CHECK(rep.path_length >= rep.geodesic - 1e-8);
        CHECK(rep.v_bar * rep.total_time >= rep.geodesic - 1e-6);
        CHECK(rep.geodesic >= 0.0);
        CHECK(rep.geodesic <= M_PI);
    }
}

TEST_CASE("speed is insensitive to a smooth local phase") {
    spin::SpinExampleConfig cfg;
    cfg.f = 2.0;
    auto ex = spin::build_example(cfg);
    auto grid = spin::linspace(0.0, 0.2, 2001);
    auto traj = evolve_exp(ex.hamiltonian, ex.psi0, grid);
    auto v = speed_from_trajectory(traj);

    Trajectory gauged = traj;
    for (int k = 0; k < traj.samples(); ++k) {
        double alpha = 0.3 * std::sin(2.0 * traj.times[k]);
        gauged.psi[static_cast<std::size_t>(k)] *= std::exp(Complex(0, alpha));
    }
    auto v_gauged = speed_from_trajectory(gauged);
    for (int k = 1; k + 1 < traj.samples(); ++k)
        CHECK(std::abs(v[static_cast<std::size_t>(k)] - v_gauged[static_cast<std::size_t>(k)]) <
              1e-6);
}

TEST_CASE("unitary speed equals twice the initial energy spread") {
    std::mt19937 rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        int d = 2 + static_cast<int>(rng() % 5);
        Matrix h0 = random_hermitian(rng, d);
        auto h = unitary(h0);
        StateVector psi0(random_state(rng, d));
        double expected = 2.0 * std::sqrt(variance(h.h0(), psi0));
        auto traj = evolve_exp(h, psi0, spin::linspace(0.0, 1.0, 51));
        for (int k = 0; k < traj.samples(); ++k)
            CHECK(speed_from_operators(h, StateVector(traj.psi[k]), traj.times[k]) ==
                  doctest::Approx(expected).epsilon(1e-6));
    }
}
