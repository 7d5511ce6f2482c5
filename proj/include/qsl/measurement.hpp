#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "qsl/dynamics.hpp"
#include "qsl/linalg.hpp"

namespace qsl {

inline constexpr double kOverlapCutoff = 1e-12;
inline constexpr double kLinearizationWindow = 0.1;  // on 2 f max(g) t

/// Continuous-measurement parameters: observable A, record a~(t), accuracy,
/// strength f and the penalty function g with g >= 0, g(0) = 0.
/// H1(t) = hbar f g((A - a~(t) I) / accuracy) by spectral calculus.
class MeasurementSpec {
  public:
    MeasurementSpec(ComplexMatrix observable, double record, double accuracy, double strength,
                    std::function<double(double)> penalty = default_penalty, double hbar = 1.0)
        : MeasurementSpec(std::move(observable), [record](double) { return record; }, true,
                          accuracy, strength, std::move(penalty), hbar) {}

    MeasurementSpec(ComplexMatrix observable, std::function<double(double)> record,
                    double accuracy, double strength,
                    std::function<double(double)> penalty = default_penalty, double hbar = 1.0)
        : MeasurementSpec(std::move(observable), std::move(record), false, accuracy, strength,
                          std::move(penalty), hbar) {}

    static double default_penalty(double x) { return 0.25 * x * x; }

    const ComplexMatrix& observable() const { return observable_; }
    double record(double t) const { return record_(t); }
    bool record_constant() const { return record_constant_; }
    double accuracy() const { return accuracy_; }
    double strength() const { return strength_; }
    double penalty(double x) const { return penalty_(x); }
    double hbar() const { return hbar_; }
    int dim() const { return observable_.dim(); }

    const Eigen::VectorXd& eigenvalues() const { return eig_.eigenvalues; }
    const Matrix& eigenvectors() const { return eig_.eigenvectors; }

    /// Penalty rate g((a_i - a~(t)) / accuracy) per eigenvalue.
    std::vector<double> penalty_rates(double t) const {
        std::vector<double> g(static_cast<std::size_t>(dim()));
        for (int i = 0; i < dim(); ++i)
            g[static_cast<std::size_t>(i)] = penalty_((eig_.eigenvalues[i] - record_(t)) / accuracy_);
        return g;
    }

  private:
    MeasurementSpec(ComplexMatrix observable, std::function<double(double)> record,
                    bool record_constant, double accuracy, double strength,
                    std::function<double(double)> penalty, double hbar)
        : observable_(std::move(observable)),
          record_(std::move(record)),
          record_constant_(record_constant),
          accuracy_(accuracy),
          strength_(strength),
          penalty_(std::move(penalty)),
          hbar_(hbar),
          eig_(hermitian_eigh(observable_)) {
        if (!(accuracy_ > 0.0)) throw std::invalid_argument("MeasurementSpec: accuracy must be > 0");
        if (strength_ < 0.0) throw std::invalid_argument("MeasurementSpec: strength must be >= 0");
        if (!(hbar_ > 0.0)) throw std::invalid_argument("MeasurementSpec: hbar must be > 0");
        if (std::abs(penalty_(0.0)) > 1e-15)
            throw std::invalid_argument("MeasurementSpec: penalty must satisfy g(0) = 0");
        for (double x = -8.0; x <= 8.0; x += 0.25)
            if (penalty_(x) < 0.0)
                throw std::invalid_argument("MeasurementSpec: penalty must be nonnegative");
    }

    ComplexMatrix observable_;
    std::function<double(double)> record_;
    bool record_constant_;
    double accuracy_;
    double strength_;
    std::function<double(double)> penalty_;
    double hbar_;
    EighResult eig_;
};

/// Measurement Hamiltonian H1 = sum_i hbar f g((a_i - a~)/da) |a_i><a_i|.
/// Positive semidefinite and diagonal in A's eigenbasis.
inline ComplexMatrix build_h1(const MeasurementSpec& spec, double t = 0.0) {
    auto g = spec.penalty_rates(t);
    Eigen::VectorXd lam(spec.dim());
    for (int i = 0; i < spec.dim(); ++i)
        lam[i] = spec.hbar() * spec.strength() * g[static_cast<std::size_t>(i)];
    Matrix m = spec.eigenvectors() * lam.asDiagonal() * spec.eigenvectors().adjoint();
    m = 0.5 * (m + m.adjoint().eval());  // scrub rounding off the Hermitian reconstruction
    return ComplexMatrix(m, Symmetry::Hermitian);
}

/// Entrywise decay Phi_i(t) = exp(-f g_i t) Phi_i(0) of coefficients given in
/// A's eigenbasis (free evolution neglected, constant record).
inline CVector amplitude_decay(const MeasurementSpec& spec, const CVector& coeffs0, double t) {
    if (!spec.record_constant())
        throw std::invalid_argument("amplitude_decay: requires a constant measurement record");
    detail::check_dims(spec.dim(), static_cast<int>(coeffs0.size()), "amplitude_decay");
    auto g = spec.penalty_rates(0.0);
    CVector out = coeffs0;
    for (int i = 0; i < spec.dim(); ++i)
        out[i] *= std::exp(-spec.strength() * g[static_cast<std::size_t>(i)] * t);
    return out;
}

namespace detail {

/// Weights w_i = |Phi_i(0)|^2 exp(-2 f g_i t), shifted by the smallest exponent
/// so large f t cannot underflow the whole sum.
inline std::vector<double> decayed_weights(const MeasurementSpec& spec, const CVector& coeffs0,
                                           double t) {
    auto g = spec.penalty_rates(0.0);
    int d = spec.dim();
    double emin = std::numeric_limits<double>::infinity();
    std::vector<double> expo(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        expo[static_cast<std::size_t>(i)] = 2.0 * spec.strength() * g[static_cast<std::size_t>(i)] * t;
        if (std::norm(coeffs0[i]) > 0.0)
            emin = std::min(emin, expo[static_cast<std::size_t>(i)]);
    }
    std::vector<double> w(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i)
        w[static_cast<std::size_t>(i)] =
            std::norm(coeffs0[i]) * std::exp(-(expo[static_cast<std::size_t>(i)] - emin));
    return w;
}

}  // namespace detail

/// <Psi(t)|H1|Psi(t)> as the explicit ratio of exponentially weighted sums over
/// A's spectrum. Independent of the operator-expectation route.
inline double h1_expectation_ratio(const MeasurementSpec& spec, const StateVector& phi0, double t) {
    if (!spec.record_constant())
        throw std::invalid_argument("h1_expectation_ratio: requires a constant measurement record");
    detail::check_dims(spec.dim(), phi0.dim(), "h1_expectation_ratio");
    CVector coeffs0 = spec.eigenvectors().adjoint() * phi0.raw();
    auto g = spec.penalty_rates(0.0);
    auto w = detail::decayed_weights(spec, coeffs0, t);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < spec.dim(); ++i) {
        num += w[static_cast<std::size_t>(i)] * spec.hbar() * spec.strength() *
               g[static_cast<std::size_t>(i)];
        den += w[static_cast<std::size_t>(i)];
    }
    return num / den;
}

/// Same ratio for <Psi(t)|H1^2|Psi(t)>; the variance of H1 follows from the two.
inline double h1_second_moment_ratio(const MeasurementSpec& spec, const StateVector& phi0,
                                     double t) {
    if (!spec.record_constant())
        throw std::invalid_argument("h1_second_moment_ratio: requires a constant record");
    detail::check_dims(spec.dim(), phi0.dim(), "h1_second_moment_ratio");
    CVector coeffs0 = spec.eigenvectors().adjoint() * phi0.raw();
    auto g = spec.penalty_rates(0.0);
    auto w = detail::decayed_weights(spec, coeffs0, t);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < spec.dim(); ++i) {
        double lam = spec.hbar() * spec.strength() * g[static_cast<std::size_t>(i)];
        num += w[static_cast<std::size_t>(i)] * lam * lam;
        den += w[static_cast<std::size_t>(i)];
    }
    return num / den;
}

/// f -> infinity attractor data: the eigenstate(s) minimizing the accumulated
/// penalty among components present in the initial state.
struct ZenoPrediction {
    std::vector<int> attractor_indices;  // all minimizers; size > 1 flags a tie
    CVector attractor_state;             // normalized projection onto the minimizing eigenspace
    double limit_h1_expectation = 0.0;   // hbar f g_r
    std::vector<double> x_values;        // penalty rate per eigenvalue
    bool tie = false;
};

inline ZenoPrediction zeno_prediction(const MeasurementSpec& spec, const StateVector& phi0) {
    if (!spec.record_constant())
        throw std::invalid_argument("zeno_prediction: requires a constant measurement record");
    detail::check_dims(spec.dim(), phi0.dim(), "zeno_prediction");
    CVector coeffs0 = spec.eigenvectors().adjoint() * phi0.raw();
    ZenoPrediction pred;
    pred.x_values = spec.penalty_rates(0.0);

    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < spec.dim(); ++i)
        if (std::abs(coeffs0[i]) > kOverlapCutoff)
            best = std::min(best, pred.x_values[static_cast<std::size_t>(i)]);
    if (!std::isfinite(best))
        throw std::invalid_argument("zeno_prediction: initial state has no overlap with any eigenstate");
    for (int i = 0; i < spec.dim(); ++i)
        if (std::abs(coeffs0[i]) > kOverlapCutoff &&
            pred.x_values[static_cast<std::size_t>(i)] <= best + 1e-12)
            pred.attractor_indices.push_back(i);
    pred.tie = pred.attractor_indices.size() > 1;

    CVector proj = CVector::Zero(spec.dim());
    for (int i : pred.attractor_indices) proj += coeffs0[i] * spec.eigenvectors().col(i);
    pred.attractor_state = proj.normalized();
    pred.limit_h1_expectation = spec.hbar() * spec.strength() * best;
    return pred;
}

/// First-order small-time speed V = (2/hbar) sqrt(Var H0(0) + 2 t f X) with
/// X = 2 <H0> Cov(G, H0) - Cov(G, H0^2), G = g((A - a~)/da) as an operator.
struct SmallTimeSpeed {
    double v = 0.0;
    double x = 0.0;               // sign predicts speed-up (>0) vs slow-down
    bool within_window = true;    // linearization validity 2 f max(g) t <= 0.1
};

inline SmallTimeSpeed small_time_speed(const MeasurementSpec& spec, const ComplexMatrix& h0,
                                       const StateVector& psi0, double t) {
    detail::require_hermitian(h0, "small_time_speed");
    detail::check_dims(spec.dim(), h0.dim(), "small_time_speed");
    detail::check_dims(spec.dim(), psi0.dim(), "small_time_speed");
    if (!spec.record_constant())
        throw std::invalid_argument("small_time_speed: requires a constant measurement record");

    auto g = spec.penalty_rates(0.0);
    Eigen::VectorXd gvals = Eigen::Map<const Eigen::VectorXd>(g.data(), spec.dim());
    Matrix g_op_raw = spec.eigenvectors() * gvals.asDiagonal() * spec.eigenvectors().adjoint();
    g_op_raw = 0.5 * (g_op_raw + g_op_raw.adjoint().eval());
    ComplexMatrix g_op(g_op_raw, Symmetry::Hermitian);

    double comm = commutator(g_op.raw(), h0.raw()).cwiseAbs().maxCoeff();
    if (comm > kCommutatorTol)
        throw std::invalid_argument("small_time_speed: [H1,H0] does not vanish (max entry " +
                                    std::to_string(comm) + ")");

    SmallTimeSpeed out;
    double gmax = *std::max_element(g.begin(), g.end());
    out.within_window = 2.0 * spec.strength() * gmax * t <= kLinearizationWindow;

    ComplexMatrix h0sq(h0.raw() * h0.raw(), Symmetry::Hermitian);
    double mean_h0 = expectation(h0, psi0);
    out.x = 2.0 * mean_h0 * covariance(g_op, h0, psi0) - covariance(g_op, h0sq, psi0);
    double radicand = variance(h0, psi0) + 2.0 * t * spec.strength() * out.x;
    out.v = 2.0 / spec.hbar() * std::sqrt(std::max(radicand, 0.0));
    return out;
}

/// The split Hamiltonian H0 - i H1 induced by a measurement spec with constant
/// record; time-dependent records produce a time-dependent H1.
inline SplitHamiltonian make_hamiltonian(const ComplexMatrix& h0, const MeasurementSpec& spec) {
    if (spec.record_constant()) return SplitHamiltonian(h0, build_h1(spec, 0.0), spec.hbar());
    return SplitHamiltonian(
        h0, [spec](double t) { return build_h1(spec, t); }, spec.hbar());
}

}  // namespace qsl
