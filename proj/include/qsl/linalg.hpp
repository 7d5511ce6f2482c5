#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

namespace qsl {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kNormTol = 1e-10;
inline constexpr double kImagResidueTol = 1e-10;
inline constexpr double kVarianceClamp = 1e-12;
inline constexpr int kMaxDim = 64;

enum class Symmetry { Hermitian, General };
enum class NormClass { Normalized, Unnormalized };

/// Square dense complex matrix with a symmetry tag validated on construction.
class ComplexMatrix {
  public:
    ComplexMatrix(Matrix m, Symmetry sym = Symmetry::General) : m_(std::move(m)), sym_(sym) {
        if (m_.rows() == 0 || m_.rows() != m_.cols())
            throw std::invalid_argument("ComplexMatrix: matrix must be square and nonempty");
        if (m_.rows() > kMaxDim)
            throw std::invalid_argument("ComplexMatrix: dimension exceeds dense cap of " +
                                        std::to_string(kMaxDim));
        if (sym_ == Symmetry::Hermitian) {
            double dev = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
            if (dev > kHermitianTol)
                throw std::invalid_argument("ComplexMatrix: Hermitian tag violated, max deviation " +
                                            std::to_string(dev));
        }
    }

    int dim() const { return static_cast<int>(m_.rows()); }
    const Matrix& raw() const { return m_; }
    Symmetry symmetry() const { return sym_; }
    bool hermitian() const { return sym_ == Symmetry::Hermitian; }

  private:
    Matrix m_;
    Symmetry sym_;
};

/// State vector tagged as normalized or unnormalized. The zero vector is rejected.
class StateVector {
  public:
    StateVector(CVector v, NormClass nc = NormClass::Normalized) : v_(std::move(v)), nc_(nc) {
        if (v_.size() == 0) throw std::invalid_argument("StateVector: empty vector");
        double n = v_.norm();
        if (!(n > 0.0)) throw std::invalid_argument("StateVector: zero vector is not a state");
        if (nc_ == NormClass::Normalized && std::abs(n - 1.0) > kNormTol)
            throw std::invalid_argument("StateVector: normalized tag violated, norm " +
                                        std::to_string(n));
    }

    int dim() const { return static_cast<int>(v_.size()); }
    const CVector& raw() const { return v_; }
    NormClass norm_class() const { return nc_; }

    StateVector normalized() const { return StateVector(v_ / v_.norm(), NormClass::Normalized); }

  private:
    CVector v_;
    NormClass nc_;
};

namespace detail {

inline void check_dims(int a, int b, const char* where) {
    if (a != b)
        throw std::invalid_argument(std::string(where) + ": dimension mismatch (" +
                                    std::to_string(a) + " vs " + std::to_string(b) + ")");
}

inline void require_hermitian(const ComplexMatrix& op, const char* where) {
    if (!op.hermitian())
        throw std::invalid_argument(std::string(where) + ": operator must carry the Hermitian tag");
}

}  // namespace detail

/// <psi|op|psi> for Hermitian op and normalized psi. The imaginary residue of the
/// raw inner product is asserted below 1e-10 and discarded.
inline double expectation(const ComplexMatrix& op, const StateVector& psi) {
    detail::require_hermitian(op, "expectation");
    detail::check_dims(op.dim(), psi.dim(), "expectation");
    if (psi.norm_class() != NormClass::Normalized)
        throw std::invalid_argument("expectation: state must be normalized");
    Complex val = psi.raw().dot(op.raw() * psi.raw());
    if (std::abs(val.imag()) > kImagResidueTol)
        throw std::runtime_error("expectation: imaginary residue " + std::to_string(val.imag()) +
                                 " exceeds tolerance");
    return val.real();
}

/// <op^2> - <op>^2, clamped to zero inside a -1e-12 window.
inline double variance(const ComplexMatrix& op, const StateVector& psi) {
    detail::require_hermitian(op, "variance");
    detail::check_dims(op.dim(), psi.dim(), "variance");
    CVector opsi = op.raw() * psi.raw();
    double mean = expectation(op, psi);
    double second = opsi.squaredNorm();  // <psi|op^2|psi> for Hermitian op
    double var = second - mean * mean;
    if (var < 0.0) {
        if (var < -kVarianceClamp)
            throw std::runtime_error("variance: negative value " + std::to_string(var) +
                                     " beyond clamp window");
        var = 0.0;
    }
    return var;
}

/// Symmetrized covariance Re<psi|A B|psi> - <A><B>. Coincides with the plain
/// covariance whenever A and B commute.
inline double covariance(const ComplexMatrix& opA, const ComplexMatrix& opB,
                         const StateVector& psi) {
    detail::require_hermitian(opA, "covariance");
    detail::require_hermitian(opB, "covariance");
    detail::check_dims(opA.dim(), opB.dim(), "covariance");
    detail::check_dims(opA.dim(), psi.dim(), "covariance");
    Complex cross = (opA.raw() * psi.raw()).dot(opB.raw() * psi.raw());
    // dot() conjugates the left factor, so this is <psi|A B|psi>.
    return cross.real() - expectation(opA, psi) * expectation(opB, psi);
}

struct EighResult {
    Eigen::VectorXd eigenvalues;  // ascending
    Matrix eigenvectors;          // orthonormal columns
};

inline EighResult hermitian_eigh(const ComplexMatrix& op) {
    detail::require_hermitian(op, "hermitian_eigh");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(op.raw());
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("hermitian_eigh: eigensolver failed to converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Dense matrix exponential by scaling-and-squaring with a Taylor kernel.
inline Matrix matrix_exp(const Matrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("matrix_exp: matrix must be square");
    if (!m.allFinite()) throw std::invalid_argument("matrix_exp: non-finite entries");
    const int d = static_cast<int>(m.rows());
    double norm = m.cwiseAbs().rowwise().sum().maxCoeff();  // infinity norm
    int squarings = 0;
    if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    Matrix a = m / std::pow(2.0, squarings);
    Matrix sum = Matrix::Identity(d, d);
    Matrix term = Matrix::Identity(d, d);
    for (int k = 1; k <= 40; ++k) {
        term = (term * a) / static_cast<double>(k);
        sum += term;
        if (term.cwiseAbs().maxCoeff() < 1e-16 * sum.cwiseAbs().maxCoeff()) break;
    }
    for (int k = 0; k < squarings; ++k) sum = sum * sum;
    if (!sum.allFinite()) throw std::runtime_error("matrix_exp: numeric overflow in result");
    return sum;
}

inline Matrix matrix_exp(const ComplexMatrix& op) { return matrix_exp(op.raw()); }

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

/// |<a|b>| clamped to [0,1]; 1 means identical physical states.
inline double fidelity(const CVector& a, const CVector& b) {
    double f = std::abs(a.normalized().dot(b.normalized()));
    return std::min(f, 1.0);
}

}  // namespace qsl
