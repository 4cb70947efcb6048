// xstate.hpp: X-form two-qubit density matrices in the coupled basis
//   |G> = |00>, |A> = (|10> - |01>)/sqrt2, |S> = (|10> + |01>)/sqrt2, |E> = |11>.
//
// In that basis an X state is block diagonal with a {G,E} block and an
// {A,S} block, so only four populations and two complex coherences are
// stored. rho_EG and rho_SA are the conjugates of the stored entries.

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "massent/errors.hpp"

namespace massent {

using cplx = std::complex<double>;
using Matrix4c = Eigen::Matrix<cplx, 4, 4>;

inline constexpr double kStateTolerance = 1e-10;

struct XState {
    double popG{0.0};
    double popA{0.0};
    double popS{0.0};
    double popE{0.0};
    cplx cohGE{0.0, 0.0};
    cplx cohAS{0.0, 0.0};

    double trace() const noexcept { return popG + popA + popS + popE; }

    bool is_valid(double tol = kStateTolerance) const noexcept {
        for (double p : {popG, popA, popS, popE, cohGE.real(), cohGE.imag(), cohAS.real(),
                          cohAS.imag()}) {
            if (!std::isfinite(p)) return false;
        }
        if (popG < -tol || popA < -tol || popS < -tol || popE < -tol) return false;
        if (std::abs(trace() - 1.0) > tol) return false;
        if (std::norm(cohGE) > popG * popE + tol) return false;
        if (std::norm(cohAS) > popA * popS + tol) return false;
        return true;
    }

    void validate(double tol = kStateTolerance) const {
        if (!is_valid(tol)) throw Error(ErrorCode::NotAState, "X state violates trace or positivity");
    }

    friend bool operator==(const XState&, const XState&) = default;

    static XState ground() { return {1.0, 0.0, 0.0, 0.0, {}, {}}; }
    static XState excited() { return {0.0, 0.0, 0.0, 1.0, {}, {}}; }
    static XState antisymmetric() { return {0.0, 1.0, 0.0, 0.0, {}, {}}; }
    static XState symmetric() { return {0.0, 0.0, 1.0, 0.0, {}, {}}; }
    // (|00> + |11>)/sqrt2
    static XState bell_ge() { return {0.5, 0.0, 0.0, 0.5, {0.5, 0.0}, {}}; }

    static XState diagonal(double e, double g, double a, double s) {
        XState x{g, a, s, e, {}, {}};
        x.validate();
        return x;
    }
};

namespace detail {

// Columns are |G>, |A>, |S>, |E> expressed in the product basis
// {|00>, |01>, |10>, |11>}.
inline Matrix4c coupled_basis() {
    const double r = 1.0 / std::numbers::sqrt2;
    Matrix4c u = Matrix4c::Zero();
    u(0, 0) = 1.0;
    u(1, 1) = -r;
    u(2, 1) = r;
    u(1, 2) = r;
    u(2, 2) = r;
    u(3, 3) = 1.0;
    return u;
}

}  // namespace detail

/// Full 4x4 matrix in the coupled basis, ordered (G, A, S, E).
inline Matrix4c to_coupled_matrix(const XState& x) {
    Matrix4c m = Matrix4c::Zero();
    m(0, 0) = x.popG;
    m(1, 1) = x.popA;
    m(2, 2) = x.popS;
    m(3, 3) = x.popE;
    m(0, 3) = x.cohGE;
    m(3, 0) = std::conj(x.cohGE);
    m(1, 2) = x.cohAS;
    m(2, 1) = std::conj(x.cohAS);
    return m;
}

inline Matrix4c to_product_basis(const XState& x) {
    const Matrix4c u = detail::coupled_basis();
    return u * to_coupled_matrix(x) * u.adjoint();
}

/// Converts a product-basis X-form density matrix to coupled-basis storage.
inline XState from_product_basis(const Matrix4c& rho) {
    constexpr double offX = 1e-12;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const bool onX = (i == j) || (i + j == 3);
            if (!onX && std::abs(rho(i, j)) > offX) {
                throw Error(ErrorCode::NonXForm, "entry (" + std::to_string(i) + "," +
                                                     std::to_string(j) + ") is off the X pattern");
            }
        }
    }
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kStateTolerance) {
        throw Error(ErrorCode::NotAState, "matrix is not Hermitian");
    }
    if (std::abs(rho.trace() - cplx{1.0, 0.0}) > kStateTolerance) {
        throw Error(ErrorCode::NotAState, "trace differs from 1");
    }
    const Matrix4c herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix4c> eig(herm, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -kStateTolerance) {
        throw Error(ErrorCode::NotAState, "matrix is not positive semidefinite");
    }

    const Matrix4c u = detail::coupled_basis();
    const Matrix4c c = u.adjoint() * herm * u;
    XState x;
    x.popG = c(0, 0).real();
    x.popA = c(1, 1).real();
    x.popS = c(2, 2).real();
    x.popE = c(3, 3).real();
    x.cohGE = c(0, 3);
    x.cohAS = c(1, 2);
    return x;
}

}  // namespace massent
