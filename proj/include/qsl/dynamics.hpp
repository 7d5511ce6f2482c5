#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qsl/linalg.hpp"

namespace qsl {

inline constexpr double kSurvivalFloor = 1e-300;
inline constexpr double kCommutatorTol = 1e-10;
inline constexpr double kRichardsonTol = 1e-8;

/// H = H0 - i H1(t) with both parts Hermitian. h1 may be time dependent.
class SplitHamiltonian {
  public:
    SplitHamiltonian(ComplexMatrix h0, ComplexMatrix h1, double hbar = 1.0)
        : h0_(std::move(h0)), h1_const_(std::move(h1)), hbar_(hbar) {
        validate();
        detail::check_dims(h0_.dim(), h1_const_->dim(), "SplitHamiltonian");
    }

    SplitHamiltonian(ComplexMatrix h0, std::function<ComplexMatrix(double)> h1_of_t,
                     double hbar = 1.0)
        : h0_(std::move(h0)), h1_of_t_(std::move(h1_of_t)), hbar_(hbar) {
        validate();
    }

    const ComplexMatrix& h0() const { return h0_; }
    double hbar() const { return hbar_; }
    int dim() const { return h0_.dim(); }
    bool time_independent() const { return h1_const_.has_value(); }

    ComplexMatrix h1(double t) const {
        if (h1_const_) return *h1_const_;
        ComplexMatrix m = h1_of_t_(t);
        detail::check_dims(h0_.dim(), m.dim(), "SplitHamiltonian::h1");
        return m;
    }

    /// -(i/hbar)(H0 - i H1(t)), the generator of the unnormalized flow.
    Matrix generator(double t) const {
        return (Complex(0, -1) * h0_.raw() - h1(t).raw()) / hbar_;
    }

  private:
    void validate() const {
        if (!(hbar_ > 0.0)) throw std::invalid_argument("SplitHamiltonian: hbar must be positive");
        detail::require_hermitian(h0_, "SplitHamiltonian");
    }

    ComplexMatrix h0_;
    std::optional<ComplexMatrix> h1_const_;
    std::function<ComplexMatrix(double)> h1_of_t_;
    double hbar_ = 1.0;
};

/// Sampled evolution: unnormalized phi, its normalized view psi, and the
/// survival probability |phi|^2 per sample.
struct Trajectory {
    std::vector<double> times;
    std::vector<CVector> phi;
    std::vector<CVector> psi;
    std::vector<double> survival;

    int samples() const { return static_cast<int>(times.size()); }
};

namespace detail {

inline void check_grid(const std::vector<double>& t_grid) {
    if (t_grid.size() < 2) throw std::invalid_argument("time grid needs at least 2 points");
    for (std::size_t k = 1; k < t_grid.size(); ++k)
        if (!(t_grid[k] > t_grid[k - 1]))
            throw std::invalid_argument("time grid must be strictly increasing");
}

inline Trajectory assemble(std::vector<double> times, std::vector<CVector> phi) {
    Trajectory traj;
    traj.times = std::move(times);
    traj.phi = std::move(phi);
    traj.psi.reserve(traj.phi.size());
    traj.survival.reserve(traj.phi.size());
    for (const CVector& v : traj.phi) {
        double n2 = v.squaredNorm();
        if (n2 < kSurvivalFloor)
            throw std::runtime_error("evolution: state fully filtered out (survival underflow)");
        traj.psi.push_back(v / std::sqrt(n2));
        traj.survival.push_back(n2);
    }
    return traj;
}

inline std::vector<CVector> rk4_pass(const SplitHamiltonian& h, const CVector& phi0,
                                     const std::vector<double>& t_grid, double dt_max) {
    std::vector<CVector> out;
    out.reserve(t_grid.size());
    CVector phi = phi0;
    double t = t_grid.front();
    out.push_back(phi);
    auto rhs = [&](double tt, const CVector& v) -> CVector { return h.generator(tt) * v; };
    for (std::size_t k = 1; k < t_grid.size(); ++k) {
        double span = t_grid[k] - t;
        int steps = std::max(1, static_cast<int>(std::ceil(span / dt_max)));
        double dt = span / steps;
        for (int s = 0; s < steps; ++s) {
            CVector k1 = rhs(t, phi);
            CVector k2 = rhs(t + 0.5 * dt, phi + 0.5 * dt * k1);
            CVector k3 = rhs(t + 0.5 * dt, phi + 0.5 * dt * k2);
            CVector k4 = rhs(t + dt, phi + dt * k3);
            phi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t += dt;
            if (phi.squaredNorm() < kSurvivalFloor)
                throw std::runtime_error("evolve_rk4: state fully filtered out (survival underflow)");
        }
        t = t_grid[k];
        out.push_back(phi);
    }
    return out;
}

}  // namespace detail

/// Classical RK4 on the unnormalized linear equation. Normalization is only a
/// view; it is never fed back into the integration. The step is Richardson
/// checked against one halving and refined once if needed.
inline Trajectory evolve_rk4(const SplitHamiltonian& h, const StateVector& phi0,
                             const std::vector<double>& t_grid) {
    detail::check_grid(t_grid);
    detail::check_dims(h.dim(), phi0.dim(), "evolve_rk4");
    double span = t_grid.back() - t_grid.front();
    double dt = std::min(1e-3, span / 2000.0);
    auto coarse = detail::rk4_pass(h, phi0.raw(), t_grid, dt);
    auto fine = detail::rk4_pass(h, phi0.raw(), t_grid, dt / 2.0);
    if ((coarse.back() - fine.back()).norm() > kRichardsonTol) {
        coarse = std::move(fine);
        fine = detail::rk4_pass(h, phi0.raw(), t_grid, dt / 4.0);
        if ((coarse.back() - fine.back()).norm() > kRichardsonTol)
            throw std::runtime_error("evolve_rk4: step-size refinement failed Richardson check");
    }
    return detail::assemble(t_grid, std::move(fine));
}

/// phi(t) = exp(-i (H0 - i H1) (t - t0) / hbar) phi0 for time-independent H.
inline Trajectory evolve_exp(const SplitHamiltonian& h, const StateVector& phi0,
                             const std::vector<double>& t_grid) {
    detail::check_grid(t_grid);
    detail::check_dims(h.dim(), phi0.dim(), "evolve_exp");
    if (!h.time_independent())
        throw std::invalid_argument("evolve_exp: requires a time-independent Hamiltonian");
    Matrix gen = h.generator(t_grid.front());
    std::vector<CVector> phi;
    phi.reserve(t_grid.size());
    for (double t : t_grid) phi.push_back(matrix_exp(gen * (t - t_grid.front())) * phi0.raw());
    return detail::assemble(t_grid, std::move(phi));
}

/// Factorized propagator exp(-i H0 t / hbar) exp(-H1 t / hbar), valid only when
/// [H1, H0] vanishes.
inline Trajectory evolve_commuting(const SplitHamiltonian& h, const StateVector& phi0,
                                   const std::vector<double>& t_grid) {
    detail::check_grid(t_grid);
    detail::check_dims(h.dim(), phi0.dim(), "evolve_commuting");
    if (!h.time_independent())
        throw std::invalid_argument("evolve_commuting: requires a time-independent Hamiltonian");
    const Matrix& h0 = h.h0().raw();
    Matrix h1 = h.h1(t_grid.front()).raw();
    double comm = commutator(h1, h0).cwiseAbs().maxCoeff();
    if (comm > kCommutatorTol)
        throw std::invalid_argument("evolve_commuting: [H1,H0] max entry " + std::to_string(comm) +
                                    " exceeds tolerance");
    std::vector<CVector> phi;
    phi.reserve(t_grid.size());
    for (double t : t_grid) {
        double dt = t - t_grid.front();
        Matrix u = matrix_exp(Complex(0, -1) * h0 * (dt / h.hbar())) *
                   matrix_exp(-h1 * (dt / h.hbar()));
        phi.push_back(u * phi0.raw());
    }
    return detail::assemble(t_grid, std::move(phi));
}

/// Max norm of (centered-difference dPsi/dt) minus the analytic right-hand side
/// of the normalized-state equation of motion, over interior samples. O(dt^2)
/// for a consistent trajectory.
inline double normalized_rhs_residual(const SplitHamiltonian& h, const Trajectory& traj) {
    if (traj.samples() < 3)
        throw std::invalid_argument("normalized_rhs_residual: need at least 3 samples");
    double worst = 0.0;
    for (int k = 1; k + 1 < traj.samples(); ++k) {
        double dt = traj.times[k + 1] - traj.times[k - 1];
        CVector dpsi = (traj.psi[k + 1] - traj.psi[k - 1]) / dt;
        ComplexMatrix h1 = h.h1(traj.times[k]);
        StateVector psi(traj.psi[k], NormClass::Normalized);
        double h1_mean = expectation(h1, psi);
        CVector rhs = (Complex(0, -1) * (h.h0().raw() * traj.psi[k]) -
                       (h1.raw() * traj.psi[k] - h1_mean * traj.psi[k])) /
                      h.hbar();
        worst = std::max(worst, (dpsi - rhs).norm());
    }
    return worst;
}

}  // namespace qsl
