#pragma once

#include "halfline/field.hpp"
#include "halfline/potential.hpp"

#include <Eigen/Dense>

#include <span>

namespace halfline {

using ModalVector = Eigen::VectorXcd;
/// Modal coefficients of a family of fields, one column per time node.
using ModalBlock = Eigen::MatrixXcd;

/// Discrete H = -d^2/dx^2 + V on the interior nodes with homogeneous Dirichlet
/// conditions at both ends, together with its (cached) eigendecomposition.
class Hamiltonian {
public:
    Hamiltonian(const Grid& grid, const RealField& V);
    static Hamiltonian assemble(const PotentialSpec& potential) { return {potential.grid(), potential.total()}; }

    const Grid& grid() const noexcept { return grid_; }
    const RealField& potential() const noexcept { return V_; }
    int modes() const noexcept { return grid_.interior(); }
    const Eigen::VectorXd& eigenvalues() const noexcept { return lambda_; }
    const Eigen::MatrixXd& eigenvectors() const noexcept { return Q_; }

    /// k-th eigenvector (0-based) as a field with unit L2 norm and zero boundary values.
    ComplexField eigenmode(int k) const;

    /// Interior values onto the orthonormal eigenbasis (boundary values ignored).
    ModalVector to_modes(const ComplexField& f) const;
    ComplexField from_modes(const ModalVector& c) const;
    /// Column-wise transforms of interior samples (N x M).
    ModalBlock to_modes(const Eigen::MatrixXcd& interior) const;
    Eigen::MatrixXcd from_modes_interior(const ModalBlock& c) const;

    /// (-f'' + V f) using the field's boundary values; one-sided second differences at both ends.
    ComplexField apply(const ComplexField& f) const;

    /// exp(-i t H) applied to the interior of f; result has zero boundary values.
    ComplexField propagate(const ComplexField& f, double t) const;

    /// max |Q^T Q - I|.
    double orthogonality_defect() const;

private:
    Grid grid_;
    RealField V_;
    Eigen::VectorXd lambda_;
    Eigen::MatrixXd Q_;
    double scale_;  // sqrt(h): coefficient norm -> L2 norm
};

/// (phi', psi') + (V phi, psi), conjugate-linear in psi, by the trapezoidal rule.
/// Both arguments must vanish at x = 0.
cplx quadratic_form(const Hamiltonian& H, const ComplexField& phi, const ComplexField& psi);

/// max(h1_norm(f, q), ||H f||).
double h2_norm(const ComplexField& f, const Hamiltonian& H, const RealField& q);

/// phi_1(z) = (e^z - 1)/z and phi_2(z) = (e^z - 1 - z)/z^2, stable near z = 0.
cplx phi1(cplx z);
cplx phi2(cplx z);

/// Per-mode weights of the product trapezoidal rule over one step of length dt:
///   G_next = decay * G + w_left * f(t) + w_right * f(t + dt),
/// the exact integral of exp(-i(t+dt-s)lambda) times the linear interpolant of f.
struct ExpQuadratureWeights {
    double dt = 0.0;
    Eigen::VectorXcd decay;
    Eigen::VectorXcd w_left;
    Eigen::VectorXcd w_right;

    ExpQuadratureWeights() = default;
    ExpQuadratureWeights(const Eigen::VectorXd& lambda, double dt);
};

/// (G w)(t) = int_0^t exp(-i(t - tau)H) w(tau) dtau on the nodes `times`
/// (times[0] = 0 offset irrelevant, times increasing); returns the value at times.back().
ComplexField duhamel_G(const Hamiltonian& H, std::span<const double> times, std::span<const ComplexField> w);

/// Same integral at every node for uniformly spaced modal samples (N x M); column 0 is zero.
ModalBlock duhamel_modal(const ExpQuadratureWeights& weights, const ModalBlock& w);

} // namespace halfline
