#pragma once

#include "halfline/field.hpp"
#include "halfline/lift.hpp"
#include "halfline/nonlinearity.hpp"
#include "halfline/potential.hpp"
#include "halfline/solver.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace halfline {

/// u_x(0) by the one-sided stencil (-3u0 + 4u1 - u2)/(2h).
cplx boundary_flux(const ComplexField& u);

/// 1/2 ||u_x||^2 + int (V|u|^2/2 + h(x, t, u)) dx. The kinetic term sums squared
/// forward differences over cells; the rest is trapezoidal. Empty without h.
std::optional<double> hamiltonian_W(const ComplexField& u, const RealField& V, const NonlinearitySpec& F, double t);

/// (u, u_x) = int u conj(u_x) dx.
cplx momentum_pairing(const ComplexField& u);

/// -2 Re(V u, u_x) computed directly (first) and as V(0)|u(0)|^2 + int V'|u|^2 (second).
std::pair<double, double> potential_term_check(const ComplexField& u, const PotentialSpec& potential);

struct IdentityReport {
    std::vector<double> times;
    std::vector<cplx> P;
    std::vector<double> mass;
    std::vector<double> W;                  // NaN where not applicable
    std::vector<cplx> momentum_pairing;
    std::vector<double> residual_mass;
    std::vector<double> residual_energy;    // NaN where not applicable
    std::vector<double> residual_momentum;  // NaN where not applicable
    /// mass(t) - mass(0) - int_0^t 2 Im(P conj(f)) (trapezoidal in time).
    std::vector<double> integrated_mass_defect;
    bool energy_applicable = true;
    bool momentum_applicable = true;

    std::size_t size() const noexcept { return times.size(); }
    double max_residual_mass() const;
    double max_residual_energy() const;
    double max_residual_momentum() const;
    double max_integrated_mass_defect() const;
};

struct IdentityOptions {
    /// Evaluate -2 Re(V u, u_x) through V(0)|f|^2 + int V'|u|^2 (needs dV).
    bool use_potential_derivative = false;
};

/// Time derivatives by centred differences, second-order one-sided at both ends.
IdentityReport identity_residuals(const Trajectory& traj, const PotentialSpec& potential,
                                  const NonlinearitySpec& nonlinearity, const BoundaryForce& force,
                                  const IdentityOptions& options = {});

/// Centred differences of a uniformly sampled series; second-order one-sided at the ends.
std::vector<double> time_derivative(const std::vector<double>& y, double dt);
std::vector<cplx> time_derivative(const std::vector<cplx>& y, double dt);

/// CSV with a header row and 17 significant digits per number.
std::string identity_csv(const IdentityReport& report);
IdentityReport parse_identity_csv(const std::string& text);
const std::vector<std::string>& identity_csv_columns();

} // namespace halfline
