#include "halfline/hamiltonian.hpp"

#include "halfline/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace halfline {

Hamiltonian::Hamiltonian(const Grid& grid, const RealField& V) : grid_(grid), V_(V), scale_(std::sqrt(grid.spacing()))
{
    if (!(V.grid() == grid))
        throw Error(ErrorCode::InvalidArgument, "potential sampled on a different grid");
    if (!V.all_finite())
        throw Error(ErrorCode::Configuration, "potential has non-finite samples", "potential decomposition V = V1 + V2");
    const int N = grid.interior();
    const double ih2 = 1.0 / (grid.spacing() * grid.spacing());
    Eigen::VectorXd diag(N);
    Eigen::VectorXd sub = Eigen::VectorXd::Constant(N - 1, -ih2);
    for (int j = 0; j < N; ++j)
        diag[j] = 2.0 * ih2 + V[j + 1];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorCode::InternalConsistency, "tridiagonal eigendecomposition failed");
    lambda_ = solver.eigenvalues();
    Q_ = solver.eigenvectors();
    // Fix the sign of each eigenvector so its first significant entry is positive.
    for (int k = 0; k < N; ++k) {
        Eigen::Index idx = 0;
        for (Eigen::Index j = 0; j < N; ++j)
            if (std::abs(Q_(j, k)) > 1e-8) {
                idx = j;
                break;
            }
        if (Q_(idx, k) < 0.0)
            Q_.col(k) *= -1.0;
    }
}

ComplexField Hamiltonian::eigenmode(int k) const
{
    if (k < 0 || k >= modes())
        throw Error(ErrorCode::InvalidArgument, "eigenmode index out of range");
    ComplexField out(grid_);
    for (int j = 0; j < modes(); ++j)
        out[j + 1] = Q_(j, k) / scale_;
    return out;
}

ModalVector Hamiltonian::to_modes(const ComplexField& f) const
{
    const int N = modes();
    Eigen::VectorXcd v(N);
    for (int j = 0; j < N; ++j)
        v[j] = f[j + 1];
    return Q_.transpose() * v;
}

ComplexField Hamiltonian::from_modes(const ModalVector& c) const
{
    const Eigen::VectorXcd v = Q_ * c;
    ComplexField out(grid_);
    for (int j = 0; j < modes(); ++j)
        out[j + 1] = v[j];
    return out;
}

ModalBlock Hamiltonian::to_modes(const Eigen::MatrixXcd& interior) const
{
    ModalBlock out(interior.rows(), interior.cols());
    out.real().noalias() = Q_.transpose() * interior.real();
    out.imag().noalias() = Q_.transpose() * interior.imag();
    return out;
}

Eigen::MatrixXcd Hamiltonian::from_modes_interior(const ModalBlock& c) const
{
    Eigen::MatrixXcd out(c.rows(), c.cols());
    out.real().noalias() = Q_ * c.real();
    out.imag().noalias() = Q_ * c.imag();
    return out;
}

ComplexField Hamiltonian::apply(const ComplexField& f) const
{
    const int n = f.size();
    const double ih2 = 1.0 / (grid_.spacing() * grid_.spacing());
    ComplexField out(grid_);
    for (int j = 1; j < n - 1; ++j)
        out[j] = -(f[j + 1] - 2.0 * f[j] + f[j - 1]) * ih2 + V_[j] * f[j];
    out[0] = -(2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) * ih2 + V_[0] * f[0];
    out[n - 1] = -(2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) * ih2 + V_[n - 1] * f[n - 1];
    return out;
}

ComplexField Hamiltonian::propagate(const ComplexField& f, double t) const
{
    ModalVector c = to_modes(f);
    for (int k = 0; k < modes(); ++k)
        c[k] *= std::exp(cplx(0.0, -lambda_[k] * t));
    return from_modes(c);
}

double Hamiltonian::orthogonality_defect() const
{
    const Eigen::MatrixXd d = Q_.transpose() * Q_ - Eigen::MatrixXd::Identity(modes(), modes());
    return d.cwiseAbs().maxCoeff();
}

cplx quadratic_form(const Hamiltonian& H, const ComplexField& phi, const ComplexField& psi)
{
    const double scale = 1e-12 * (1.0 + sup_norm(phi) + sup_norm(psi));
    if (std::abs(phi[0]) > scale || std::abs(psi[0]) > scale)
        throw Error(ErrorCode::DomainViolation, "quadratic form arguments must vanish at x = 0",
                    "form domain (homogeneous Dirichlet condition at x = 0)");
    const ComplexField dphi = derivative(phi);
    const ComplexField dpsi = derivative(psi);
    ComplexField integrand(phi.grid());
    for (int j = 0; j < phi.size(); ++j)
        integrand[j] = dphi[j] * std::conj(dpsi[j]) + H.potential()[j] * phi[j] * std::conj(psi[j]);
    return integrate(integrand);
}

double h2_norm(const ComplexField& f, const Hamiltonian& H, const RealField& q)
{
    return std::max(h1_norm(f, q), l2_norm(H.apply(f)));
}

cplx phi1(cplx z)
{
    if (std::abs(z) < 0.5) {
        cplx sum = 0.0, term = 1.0;
        double fact = 1.0;  // (k+1)!
        for (int k = 0; k < 20; ++k) {
            fact *= (k + 1);
            sum += term / fact;
            term *= z;
        }
        return sum;
    }
    return (std::exp(z) - 1.0) / z;
}

cplx phi2(cplx z)
{
    if (std::abs(z) < 0.5) {
        cplx sum = 0.0, term = 1.0;
        double fact = 1.0;  // (k+2)!
        for (int k = 0; k < 20; ++k) {
            fact *= (k + 2);
            sum += term / fact;
            term *= z;
        }
        return sum;
    }
    return (std::exp(z) - 1.0 - z) / (z * z);
}

ExpQuadratureWeights::ExpQuadratureWeights(const Eigen::VectorXd& lambda, double step)
    : dt(step), decay(lambda.size()), w_left(lambda.size()), w_right(lambda.size())
{
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
        const cplx z(0.0, -lambda[k] * step);
        const cplx p1 = phi1(z);
        const cplx p2 = phi2(z);
        decay[k] = std::exp(z);
        w_left[k] = step * (p1 - p2);
        w_right[k] = step * p2;
    }
}

ComplexField duhamel_G(const Hamiltonian& H, std::span<const double> times, std::span<const ComplexField> w)
{
    if (times.size() < 2 || times.size() != w.size())
        throw Error(ErrorCode::InvalidArgument, "Duhamel quadrature needs at least two nodes with matching samples");
    ModalVector acc = ModalVector::Zero(H.modes());
    ModalVector prev = H.to_modes(w[0]);
    for (std::size_t m = 1; m < times.size(); ++m) {
        const double dt = times[m] - times[m - 1];
        if (!(dt > 0.0))
            throw Error(ErrorCode::InvalidArgument, "Duhamel quadrature nodes must be increasing");
        const ExpQuadratureWeights wts(H.eigenvalues(), dt);
        const ModalVector next = H.to_modes(w[m]);
        acc = wts.decay.cwiseProduct(acc) + wts.w_left.cwiseProduct(prev) + wts.w_right.cwiseProduct(next);
        prev = next;
    }
    return H.from_modes(acc);
}

ModalBlock duhamel_modal(const ExpQuadratureWeights& weights, const ModalBlock& w)
{
    ModalBlock G(w.rows(), w.cols());
    G.col(0).setZero();
    for (Eigen::Index m = 1; m < w.cols(); ++m)
        G.col(m) = weights.decay.cwiseProduct(G.col(m - 1)) + weights.w_left.cwiseProduct(w.col(m - 1)) +
                   weights.w_right.cwiseProduct(w.col(m));
    return G;
}

} // namespace halfline
