#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qsl/dynamics.hpp"
#include "qsl/geometry.hpp"
#include "qsl/linalg.hpp"
#include "qsl/measurement.hpp"

namespace qsl::spin {

inline Matrix pauli_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

inline Matrix pauli_y() {
    Matrix m(2, 2);
    m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return m;
}

inline Matrix pauli_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

/// Two-level worked example: H0 = omega sz + alpha sx, observable A diagonal in
/// H0's eigenbasis, maximally coherent initial state.
struct SpinExampleConfig {
    double omega = 1.0;
    double alpha = 1.0;
    double hbar = 1.0;
    double a1 = 0.03;
    double a2 = 0.05;
    double delta_a = 0.01;
    double a_record = 0.02;
    double f = 1.0;
    double t_final = 1.0;
    int samples = 401;

    void validate() const {
        if (!(a2 > a1)) throw std::invalid_argument("SpinExampleConfig: requires a2 > a1");
        if (!(delta_a > 0.0)) throw std::invalid_argument("SpinExampleConfig: delta_a must be > 0");
        if (samples < 3) throw std::invalid_argument("SpinExampleConfig: samples must be >= 3");
        if (!(hbar > 0.0)) throw std::invalid_argument("SpinExampleConfig: hbar must be > 0");
        if (f < 0.0) throw std::invalid_argument("SpinExampleConfig: f must be >= 0");
        if (!(t_final > 0.0)) throw std::invalid_argument("SpinExampleConfig: t_final must be > 0");
    }
};

struct SpinExample {
    SplitHamiltonian hamiltonian;
    MeasurementSpec measurement;
    StateVector psi0;
};

/// The observable of the example: A = (a21 / 2 sqrt(2)) [[sqrt(2) tr(A)/a21 + 1, 1],
/// [1, sqrt(2) tr(A)/a21 - 1]], which shares the eigenbasis of sz + sx.
inline ComplexMatrix example_observable(double a1, double a2) {
    double a21 = a2 - a1;
    double tr = a1 + a2;
    double s2 = std::sqrt(2.0);
    Matrix m(2, 2);
    m << s2 * (tr / a21) + 1.0, 1.0, 1.0, s2 * (tr / a21) - 1.0;
    m *= a21 / (2.0 * s2);
    return ComplexMatrix(m, Symmetry::Hermitian);
}

inline SpinExample build_example(const SpinExampleConfig& cfg) {
    cfg.validate();
    if (std::abs(cfg.omega - cfg.alpha) > 1e-12)
        throw std::invalid_argument(
            "build_example: observable requires omega == alpha, otherwise [A,H0] != 0");
    ComplexMatrix h0(cfg.omega * pauli_z() + cfg.alpha * pauli_x(), Symmetry::Hermitian);
    ComplexMatrix a = example_observable(cfg.a1, cfg.a2);

    double comm = commutator(a.raw(), h0.raw()).cwiseAbs().maxCoeff();
    if (comm > 1e-12)
        throw std::invalid_argument("build_example: [A,H0] = " + std::to_string(comm));
    EighResult eig = hermitian_eigh(a);
    if (std::abs(eig.eigenvalues[0] - cfg.a1) > 1e-12 || std::abs(eig.eigenvalues[1] - cfg.a2) > 1e-12)
        throw std::runtime_error("build_example: observable eigenvalues drifted from (a1, a2)");

    MeasurementSpec spec(a, cfg.a_record, cfg.delta_a, cfg.f, MeasurementSpec::default_penalty,
                         cfg.hbar);
    CVector plus(2);
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    return {make_hamiltonian(h0, spec), std::move(spec), StateVector(plus)};
}

/// Coefficients of the closed-form solution of the two-level model. omega_exp
/// is an exponent of the solution; it is unrelated to the sz coupling omega.
struct ClosedFormCoefficients {
    double p = 0.0;
    double delta = 0.0;
    Complex gamma;
    Complex omega_exp;

    Complex z1(double t, double delta_a) const {
        double s2 = std::sqrt(2.0);
        double da2 = delta_a * delta_a;
        Complex i(0, 1);
        Complex num = std::exp(-delta * t) *
                      (std::exp(gamma * t) * (8.0 * (2.0 + s2) * da2 - i * (1.0 + s2) * p) +
                       std::exp(omega_exp * t) * (8.0 * (s2 - 2.0) * da2 + i * (s2 - 1.0) * p));
        Complex den = 2.0 * s2 * (8.0 * s2 * da2 - i * p);
        return num / den;
    }

    Complex z2(double t) const {
        return std::exp(-delta * t) * (std::exp(gamma * t) + std::exp(omega_exp * t)) /
               (2.0 * std::sqrt(2.0));
    }
};

inline ClosedFormCoefficients closed_form_coefficients(const SpinExampleConfig& cfg) {
    cfg.validate();
    double da2 = cfg.delta_a * cfg.delta_a;
    double s2 = std::sqrt(2.0);
    Complex i(0, 1);
    ClosedFormCoefficients c;
    c.p = cfg.f * (2.0 * cfg.a_record - cfg.a1 - cfg.a2) * (cfg.a1 - cfg.a2);
    c.delta = cfg.f *
              (2.0 * cfg.a_record * cfg.a_record - 2.0 * cfg.a_record * (cfg.a1 + cfg.a2) +
               cfg.a1 * cfg.a1 + cfg.a2 * cfg.a2) /
              (4.0 * da2);
    c.gamma = (cfg.f * (cfg.a_record - cfg.a1) * (cfg.a_record - cfg.a1) - 4.0 * i * s2 * da2) /
              (4.0 * da2);
    c.omega_exp = (cfg.f * (cfg.a_record - cfg.a2) * (cfg.a_record - cfg.a2) + 4.0 * s2 * i * da2) /
                  (4.0 * da2);
    return c;
}

/// Normalized state at time t from the transcribed z1, z2. Validated against
/// the numeric routes in the test suite; the numeric routes are authoritative.
inline StateVector closed_form_state(const SpinExampleConfig& cfg, double t) {
    ClosedFormCoefficients c = closed_form_coefficients(cfg);
    CVector v(2);
    v << c.z1(t, cfg.delta_a), c.z2(t);
    double n = v.norm();
    if (!(n > 0.0)) throw std::runtime_error("closed_form_state: vanishing normalization");
    return StateVector(v / n, NormClass::Normalized);
}

struct Fig1Row {
    double f;
    double t;
    double v;
};
struct Fig2Row {
    double T;
    double f;
    double v_bar;
};
struct Fig3Row {
    double T;
    double f;
    double s0;
};

inline std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        out[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / static_cast<double>(n - 1);
    out.back() = hi;
    return out;
}

/// 0 plus 39 log-spaced strengths up to 100.
inline std::vector<double> default_f_grid() {
    std::vector<double> grid{0.0};
    for (int k = 0; k < 39; ++k)
        grid.push_back(0.1 * std::pow(1000.0, k / 38.0));
    return grid;
}

inline std::vector<double> default_t_grid() {
    std::vector<double> grid;
    for (int k = 1; k <= 300; ++k) grid.push_back(3.0 * k / 300.0);
    return grid;
}

/// Evolution speed at a fixed time as a function of measurement strength.
inline std::vector<Fig1Row> figure1_sweep(const SpinExampleConfig& cfg,
                                          const std::vector<double>& f_grid,
                                          double speed_time = 0.1) {
    std::vector<Fig1Row> rows;
    rows.reserve(f_grid.size());
    for (double f : f_grid) {
        SpinExampleConfig c = cfg;
        c.f = f;
        SpinExample ex = build_example(c);
        Trajectory traj = evolve_exp(ex.hamiltonian, ex.psi0, {0.0, speed_time});
        double v = speed_from_operators(ex.hamiltonian, StateVector(traj.psi.back()), speed_time);
        rows.push_back({f, speed_time, v});
    }
    return rows;
}

/// Time-averaged speed over [0, T] per strength value.
inline std::vector<Fig2Row> figure2_sweep(const SpinExampleConfig& cfg,
                                          const std::vector<double>& t_grid,
                                          const std::vector<double>& f_values = {0.0, 5.0}) {
    detail::check_grid(t_grid);
    std::vector<Fig2Row> rows;
    for (double f : f_values) {
        SpinExampleConfig c = cfg;
        c.f = f;
        SpinExample ex = build_example(c);
        for (double T : t_grid) {
            std::vector<double> grid = linspace(0.0, T, cfg.samples);
            Trajectory traj = evolve_exp(ex.hamiltonian, ex.psi0, grid);
            std::vector<double> v(grid.size());
            for (std::size_t k = 0; k < grid.size(); ++k)
                v[k] = speed_from_operators(ex.hamiltonian, StateVector(traj.psi[k]), grid[k]);
            rows.push_back({T, f, average_speed(v, grid)});
        }
    }
    return rows;
}

/// Geodesic distance between the initial and time-T states per strength value.
inline std::vector<Fig3Row> figure3_sweep(const SpinExampleConfig& cfg,
                                          const std::vector<double>& t_grid,
                                          const std::vector<double>& f_values = {0.0, 5.0}) {
    detail::check_grid(t_grid);
    std::vector<Fig3Row> rows;
    for (double f : f_values) {
        SpinExampleConfig c = cfg;
        c.f = f;
        SpinExample ex = build_example(c);
        for (double T : t_grid) {
            Trajectory traj = evolve_exp(ex.hamiltonian, ex.psi0, {0.0, T});
            rows.push_back({T, f, geodesic_distance(ex.psi0, StateVector(traj.psi.back()))});
        }
    }
    return rows;
}

}  // namespace qsl::spin
