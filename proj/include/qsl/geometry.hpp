#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "qsl/dynamics.hpp"
#include "qsl/linalg.hpp"

namespace qsl {

inline constexpr double kRadicandGate = 1e-10;

/// Per-run quantum-speed-limit summary.
struct QslReport {
    std::vector<double> v_samples;
    double v_bar = 0.0;
    double path_length = 0.0;
    double geodesic = 0.0;
    double t_qsl = 0.0;
    double total_time = 0.0;
};

/// Fubini-Study speed from operator moments:
/// V = (2/hbar) sqrt(Var H0 + Var H1 + i<[H1,H0]>).
inline double speed_from_operators(const SplitHamiltonian& h, const StateVector& psi, double t) {
    ComplexMatrix h1 = h.h1(t);
    Complex comm_term = Complex(0, 1) * psi.raw().dot(commutator(h1.raw(), h.h0().raw()) * psi.raw());
    if (std::abs(comm_term.imag()) > kImagResidueTol)
        throw std::runtime_error("speed_from_operators: commutator term has imaginary residue " +
                                 std::to_string(comm_term.imag()));
    double radicand = variance(h.h0(), psi) + variance(h1, psi) + comm_term.real();
    if (radicand < 0.0) {
        if (radicand < -kRadicandGate)
            throw std::runtime_error("speed_from_operators: negative radicand " +
                                     std::to_string(radicand));
        radicand = 0.0;
    }
    return 2.0 / h.hbar() * std::sqrt(radicand);
}

/// Fubini-Study speed from the trajectory itself via centered differences:
/// V = 2 sqrt(<dPsi|dPsi> - |<Psi|dPsi>|^2). Endpoints use one-sided stencils.
/// Independent of the operator route.
inline std::vector<double> speed_from_trajectory(const Trajectory& traj) {
    int n = traj.samples();
    if (n < 3) throw std::invalid_argument("speed_from_trajectory: need at least 3 samples");
    double dt = traj.times[1] - traj.times[0];
    for (int k = 1; k + 1 < n; ++k)
        if (std::abs((traj.times[k + 1] - traj.times[k]) - dt) > 1e-9 * std::max(1.0, dt) ||
            !(dt > 0.0))
            throw std::invalid_argument("speed_from_trajectory: grid must be uniform");

    auto speed_at = [&](const CVector& psi, const CVector& dpsi) {
        double radicand = dpsi.squaredNorm() - std::norm(psi.dot(dpsi));
        return 2.0 * std::sqrt(std::max(radicand, 0.0));
    };
    std::vector<double> v(n);
    for (int k = 1; k + 1 < n; ++k) {
        CVector dpsi = (traj.psi[k + 1] - traj.psi[k - 1]) / (2.0 * dt);
        v[k] = speed_at(traj.psi[k], dpsi);
    }
    v[0] = speed_at(traj.psi[0], (traj.psi[1] - traj.psi[0]) / dt);
    v[n - 1] = speed_at(traj.psi[n - 1], (traj.psi[n - 1] - traj.psi[n - 2]) / dt);
    return v;
}

/// Composite trapezoid time average (1/T) int V dt.
inline double average_speed(const std::vector<double>& v_samples,
                            const std::vector<double>& times) {
    if (v_samples.size() != times.size() || times.size() < 2)
        throw std::invalid_argument("average_speed: need aligned arrays with >= 2 samples");
    double total = times.back() - times.front();
    if (!(total > 0.0)) throw std::invalid_argument("average_speed: zero total time");
    double integral = 0.0;
    for (std::size_t k = 1; k < times.size(); ++k)
        integral += 0.5 * (v_samples[k] + v_samples[k - 1]) * (times[k] - times[k - 1]);
    return integral / total;
}

/// Geodesic Fubini-Study distance 2 arccos |<psi0|psiT>|, in [0, pi].
inline double geodesic_distance(const StateVector& psi0, const StateVector& psiT) {
    detail::check_dims(psi0.dim(), psiT.dim(), "geodesic_distance");
    double overlap = std::clamp(std::abs(psi0.raw().dot(psiT.raw())), 0.0, 1.0);
    return 2.0 * std::acos(overlap);
}

/// Assemble the QSL report: T_qsl = S0 / Vbar.
inline QslReport qsl_time(const Trajectory& traj, const std::vector<double>& v_samples) {
    if (v_samples.size() != traj.times.size())
        throw std::invalid_argument("qsl_time: speed samples misaligned with trajectory");
    QslReport rep;
    rep.v_samples = v_samples;
    rep.total_time = traj.times.back() - traj.times.front();
    rep.v_bar = average_speed(v_samples, traj.times);
    double integral = rep.v_bar * rep.total_time;
    rep.path_length = integral;
    rep.geodesic = geodesic_distance(StateVector(traj.psi.front()), StateVector(traj.psi.back()));
    if (rep.v_bar <= 0.0) {
        if (rep.geodesic > 1e-8)
            throw std::runtime_error("qsl_time: zero average speed with nonzero geodesic distance");
        rep.t_qsl = 0.0;
    } else {
        rep.t_qsl = rep.geodesic / rep.v_bar;
    }
    return rep;
}

}  // namespace qsl
