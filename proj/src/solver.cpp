#include "halfline/solver.hpp"

#include "halfline/error.hpp"
#include "halfline/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace halfline {

namespace {

const cplx I(0.0, 1.0);

void require(bool ok, const std::string& what)
{
    if (!ok)
        throw Error(ErrorCode::InvalidArgument, "solver configuration: " + what);
}

} // namespace

void SolverConfig::validate() const
{
    require(T > 0.0 && std::isfinite(T), "T must be positive");
    require(window_T0 > 0.0 && window_T0 <= T, "window_T0 must be in (0, T]");
    require(picard_tol > 0.0, "picard_tol must be positive");
    require(picard_max_iter > 0, "picard_max_iter must be positive");
    require(quad_nodes >= 2, "quad_nodes must be at least 2");
    require(contraction_guard > 0.0 && contraction_guard < 1.0, "contraction_guard must be in (0, 1)");
    require(blowup_threshold > 0.0, "blowup_threshold must be positive");
    require(output_dt > 0.0, "output_dt must be positive");
    require(min_window > 0.0, "min_window must be positive");
    if (lift_delta)
        require(*lift_delta > 0.0, "lift_delta must be positive");
}

const char* to_string(SolveStatus s) noexcept
{
    switch (s) {
    case SolveStatus::Completed: return "completed";
    case SolveStatus::BlowUp: return "blow_up";
    case SolveStatus::ContractionFailure: return "contraction_failure";
    }
    return "unknown";
}

PicardWindow::PicardWindow(const Hamiltonian& H, const Lift& lift, const ComplexField& v_start, double t_start,
                           double t_end, int nodes)
    : H_(H), lift_(lift)
{
    if (!(t_end > t_start) || nodes < 2)
        throw Error(ErrorCode::InvalidArgument, "Picard window needs t_end > t_start and at least two nodes");
    const int N = H.modes();
    const double step = (t_end - t_start) / (nodes - 1);
    tau_.resize(nodes);
    for (int m = 0; m < nodes; ++m)
        tau_[m] = m + 1 == nodes ? t_end : t_start + m * step;
    weights_ = ExpQuadratureWeights(H.eigenvalues(), step);

    const ModalVector c0 = H.to_modes(v_start);
    C0_.resize(N, nodes);
    for (int m = 0; m < nodes; ++m)
        for (int k = 0; k < N; ++k)
            C0_(k, m) = std::exp(cplx(0.0, -H.eigenvalues()[k] * (tau_[m] - t_start))) * c0[k];

    R_ = Eigen::MatrixXcd::Zero(N, nodes);
    S_ = Eigen::MatrixXcd::Zero(N, nodes);
    if (!lift.trivial()) {
        for (int m = 0; m < nodes; ++m) {
            const ComplexField r = lift.lift_r(tau_[m]).r;
            const ComplexField s = lift.source(tau_[m]);
            for (int j = 0; j < N; ++j) {
                R_(j, m) = r[j + 1];
                S_(j, m) = s[j + 1];
            }
        }
    }
}

ModalBlock PicardWindow::apply(const ModalBlock& C) const
{
    const int N = H_.modes();
    const int M = static_cast<int>(tau_.size());
    Eigen::MatrixXcd F = S_;
    const NonlinearitySpec& nl = lift_.nonlinearity();
    if (!nl.is_zero()) {
        const Eigen::MatrixXcd U = H_.from_modes_interior(C) + R_;
        const Grid& g = H_.grid();
        for (int m = 0; m < M; ++m)
            for (int j = 0; j < N; ++j)
                F(j, m) += nl.eval(g.x(j + 1), tau_[m], U(j, m));
    }
    const ModalBlock G = duhamel_modal(weights_, H_.to_modes(F));
    return C0_ - I * G;
}

double PicardWindow::distance(const ModalBlock& a, const ModalBlock& b) const
{
    return std::sqrt(H_.grid().spacing()) * (a - b).colwise().norm().maxCoeff();
}

ComplexField PicardWindow::v_field(const ModalBlock& C, int m) const { return H_.from_modes(C.col(m)); }

ComplexField PicardWindow::solution(const ModalBlock& C, int m) const
{
    ComplexField u = v_field(C, m);
    for (int j = 0; j < H_.modes(); ++j)
        u[j + 1] += R_(j, m);
    u[0] = lift_.trivial() ? cplx{} : lift_.force().f(tau_[m]);
    return u;
}

WindowResult picard_window(const PicardWindow& window, const SolverConfig& cfg, InitialIterate init)
{
    WindowResult out;
    WindowDiagnostics& d = out.diagnostics;
    d.t_start = window.nodes().front();
    d.t_end = window.nodes().back();
    ModalBlock C = init == InitialIterate::FreeFlow ? window.free_flow()
                                                     : ModalBlock::Zero(window.free_flow().rows(),
                                                                        window.free_flow().cols());
    int consecutive = 0;
    for (int k = 1; k <= cfg.picard_max_iter; ++k) {
        ModalBlock next = window.apply(C);
        const double res = window.distance(next, C);
        C = std::move(next);
        d.iterations = k;
        d.residuals.push_back(res);
        if (!std::isfinite(res)) {
            out.failure = "non-finite Picard iterate";
            break;
        }
        if (d.residuals.size() >= 2) {
            const double prev = d.residuals[d.residuals.size() - 2];
            const double ratio = prev > 0.0 ? res / prev : 0.0;
            d.ratios.push_back(ratio);
            if (prev > 100.0 * cfg.picard_tol)
                d.max_ratio = std::max(d.max_ratio, ratio);
            consecutive = ratio >= cfg.contraction_guard ? consecutive + 1 : 0;
        }
        if (res <= cfg.picard_tol) {
            d.converged = true;
            break;
        }
        if (consecutive >= 3) {
            out.failure = "contraction ratio above guard for 3 consecutive sweeps";
            break;
        }
    }
    if (!d.converged && out.failure.empty())
        out.failure = "Picard iteration limit reached";
    out.C = std::move(C);
    return out;
}

WindowResult picard_window(const Hamiltonian& H, const Lift& lift, const ComplexField& v_start, double t_start,
                           double t_end, const SolverConfig& cfg, InitialIterate init)
{
    const PicardWindow window(H, lift, v_start, t_start, t_end, cfg.quad_nodes);
    return picard_window(window, cfg, init);
}

std::vector<double> output_times(double T, double output_dt)
{
    std::vector<double> t;
    const double n = std::floor(T / output_dt + 1e-9);
    for (long k = 0; k <= static_cast<long>(n); ++k)
        t.push_back(std::min(T, k * output_dt));
    if (T - t.back() > 1e-12 * std::max(1.0, T))
        t.push_back(T);
    else
        t.back() = T;
    return t;
}

void validate_problem(const Problem& p, double T)
{
    if (!(p.phi.grid() == p.grid()))
        throw Error(ErrorCode::InvalidArgument, "initial value sampled on a different grid");
    if (!p.phi.all_finite())
        throw Error(ErrorCode::InvalidArgument, "initial value has non-finite samples");
    require_force_consistency(p.force, T);
    if (!compatibility_check(p.phi, p.force))
        throw Error(ErrorCode::Configuration, "initial value does not match the boundary data at x = 0",
                    "compatibility condition phi(0) = f(0)");
    if (!p.nonlinearity.is_zero()) {
        const Grid& g = p.grid();
        std::vector<double> xs;
        for (int i = 0; i <= 4; ++i)
            xs.push_back(g.length() * i / 4.0);
        double R = 1.0 + 2.0 * sup_norm(p.phi);
        for (int i = 0; i <= 8 && !p.force.identically_zero; ++i)
            R = std::max(R, 1.0 + 2.0 * std::abs(p.force.f(T * i / 8.0)));
        const AssumptionAProbe probe = probe_assumption_a(p.nonlinearity, R, 0.0, T, xs);
        if (!probe.finite)
            throw Error(ErrorCode::Configuration, "nonlinearity or its derivatives are not finite on sampled data",
                        "Assumption A: F is continuously differentiable with locally bounded derivatives");
    }
}

namespace {

void append_output(Trajectory& tr, double t, const ComplexField& u, const RealField& q, const Hamiltonian& H,
                   bool monitor_h2)
{
    tr.times.push_back(t);
    tr.fields.push_back(u);
    tr.h1.push_back(h1_norm(u, q));
    if (monitor_h2)
        tr.h2.push_back(h2_norm(u, H, q));
}

} // namespace

Trajectory solve(const Problem& problem, const SolverConfig& cfg)
{
    cfg.validate();
    validate_problem(problem, cfg.T);
    const Grid& g = problem.grid();
    const Hamiltonian H = Hamiltonian::assemble(problem.potential);
    const RealField q = problem.potential.q();
    const double delta = cfg.lift_delta.value_or(default_lift_delta(problem.potential));
    const Lift lift(problem.potential, problem.nonlinearity, problem.force, delta, cfg.lift_laplacian);

    Trajectory tr;
    tr.lift_delta = delta;
    const std::vector<double> outs = output_times(cfg.T, cfg.output_dt);
    append_output(tr, 0.0, problem.phi, q, H, cfg.monitor_h2);

    ComplexField v = problem.phi;
    if (!lift.trivial())
        v -= lift.lift_r(0.0).r;
    v[0] = 0.0;
    v[g.size() - 1] = 0.0;

    bool tail_warned = false;
    double t = 0.0;
    double window = cfg.window_T0;
    std::size_t next_out = 1;
    while (next_out < outs.size()) {
        const double t_end = std::min(t + window, outs[next_out]);
        const PicardWindow pw(H, lift, v, t, t_end, cfg.quad_nodes);
        WindowResult res = picard_window(pw, cfg);
        if (!res.diagnostics.converged) {
            tr.windows.push_back(res.diagnostics);
            window *= 0.5;
            if (window < cfg.min_window) {
                tr.status = SolveStatus::ContractionFailure;
                tr.status_time = t;
                tr.warnings.push_back("window below minimum at t = " + std::to_string(t) + ": " + res.failure);
                return tr;
            }
            continue;
        }
        if (cfg.check_uniqueness) {
            const WindowResult alt = picard_window(pw, cfg, InitialIterate::Zero);
            res.diagnostics.uniqueness_gap =
                alt.diagnostics.converged ? pw.distance(alt.C, res.C) : std::numeric_limits<double>::infinity();
        }
        tr.windows.push_back(res.diagnostics);
        const int last = cfg.quad_nodes - 1;
        const ComplexField u = pw.solution(res.C, last);
        const double h1 = u.all_finite() ? h1_norm(u, q) : std::numeric_limits<double>::infinity();
        if (!(h1 < cfg.blowup_threshold)) {
            tr.status = SolveStatus::BlowUp;
            tr.status_time = t;
            tr.warnings.push_back("H1 norm reached " + std::to_string(h1) + " by t = " + std::to_string(t_end));
            return tr;
        }
        v = pw.v_field(res.C, last);
        t = t_end;
        if (t_end == outs[next_out]) {
            append_output(tr, t, u, q, H, cfg.monitor_h2);
            if (!tail_warned && tail_mass_fraction(u) > 1e-6) {
                tail_warned = true;
                tr.warnings.push_back("more than 1e-6 of the mass lies in the rightmost 10% of [0, L] at t = " +
                                      std::to_string(t) + "; the truncation at L may be felt");
            }
            ++next_out;
        }
    }
    tr.status_time = cfg.T;
    return tr;
}

namespace {

/// LU factors of I + i (dt/2) H on the interior nodes (constant off-diagonal).
class CrankNicolsonMatrix {
public:
    CrankNicolsonMatrix(const Hamiltonian& H, double dt) : dt_(dt)
    {
        const Grid& g = H.grid();
        const int N = g.interior();
        const double ih2 = 1.0 / (g.spacing() * g.spacing());
        off_ = -I * (0.5 * dt) * ih2;
        diag_.resize(N);
        for (int j = 0; j < N; ++j)
            diag_[j] = 1.0 + I * (0.5 * dt) * (2.0 * ih2 + H.potential()[j + 1]);
        // Thomas elimination: store modified diagonal.
        piv_.resize(N);
        piv_[0] = diag_[0];
        for (int j = 1; j < N; ++j)
            piv_[j] = diag_[j] - off_ * off_ / piv_[j - 1];
    }

    double dt() const noexcept { return dt_; }

    /// (I - i dt/2 H) u on the interior, u's boundary values excluded.
    void explicit_half(const std::vector<cplx>& u, std::vector<cplx>& out) const
    {
        const int N = static_cast<int>(u.size());
        out.resize(N);
        for (int j = 0; j < N; ++j) {
            cplx s = (2.0 - diag_[j]) * u[j];  // 1 - i dt/2 (2/h^2 + V)
            if (j > 0)
                s -= off_ * u[j - 1];
            if (j + 1 < N)
                s -= off_ * u[j + 1];
            out[j] = s;
        }
    }

    void solve(std::vector<cplx>& rhs) const
    {
        const int N = static_cast<int>(rhs.size());
        for (int j = 1; j < N; ++j)
            rhs[j] -= off_ / piv_[j - 1] * rhs[j - 1];
        rhs[N - 1] /= piv_[N - 1];
        for (int j = N - 2; j >= 0; --j)
            rhs[j] = (rhs[j] - off_ * rhs[j + 1]) / piv_[j];
    }

private:
    double dt_;
    cplx off_;
    std::vector<cplx> diag_;
    std::vector<cplx> piv_;
};

struct OracleStepper {
    const Problem& p;
    const Hamiltonian& H;
    const OracleConfig& cfg;
    std::map<double, CrankNicolsonMatrix> cache;

    const CrankNicolsonMatrix& matrix(double dt)
    {
        auto it = cache.find(dt);
        if (it == cache.end())
            it = cache.emplace(dt, CrankNicolsonMatrix(H, dt)).first;
        return it->second;
    }

    cplx f(double t) const { return p.force.identically_zero ? cplx{} : p.force.f(t); }

    bool try_step(std::vector<cplx>& u, double t, double dt)
    {
        const CrankNicolsonMatrix& A = matrix(dt);
        const Grid& g = H.grid();
        const int N = g.interior();
        const double ih2 = 1.0 / (g.spacing() * g.spacing());
        std::vector<cplx> base;
        A.explicit_half(u, base);
        base[0] += I * (0.5 * dt) * (f(t) + f(t + dt)) * ih2;
        const NonlinearitySpec& nl = p.nonlinearity;
        if (nl.is_zero()) {
            A.solve(base);
            u = std::move(base);
            return true;
        }
        const double tm = t + 0.5 * dt;
        std::vector<cplx> next = u, rhs(N);
        for (int it = 0; it < cfg.inner_max_iter; ++it) {
            for (int j = 0; j < N; ++j)
                rhs[j] = base[j] - I * dt * nl.eval(g.x(j + 1), tm, 0.5 * (u[j] + next[j]));
            A.solve(rhs);
            double diff = 0.0, size = 0.0;
            for (int j = 0; j < N; ++j) {
                diff = std::max(diff, std::abs(rhs[j] - next[j]));
                size = std::max(size, std::abs(rhs[j]));
            }
            next.swap(rhs);
            if (!std::isfinite(diff))
                return false;
            if (diff <= cfg.inner_tol * (1.0 + size)) {
                u = std::move(next);
                return true;
            }
        }
        return false;
    }

    void step(std::vector<cplx>& u, double t, double dt)
    {
        std::vector<cplx> trial = u;
        if (try_step(trial, t, dt)) {
            u = std::move(trial);
            return;
        }
        if (dt * 0.5 < cfg.min_dt)
            throw Error(ErrorCode::InternalConsistency, "Crank-Nicolson inner iteration failed at the minimum step");
        step(u, t, 0.5 * dt);
        step(u, t + 0.5 * dt, 0.5 * dt);
    }
};

} // namespace

Trajectory oracle_solve(const Problem& problem, const OracleConfig& cfg)
{
    if (!(cfg.T > 0.0) || !(cfg.dt > 0.0) || !(cfg.output_dt > 0.0) || cfg.inner_max_iter < 1)
        throw Error(ErrorCode::InvalidArgument, "oracle configuration: T, dt, output_dt must be positive");
    validate_problem(problem, cfg.T);
    const Grid& g = problem.grid();
    const Hamiltonian H = Hamiltonian::assemble(problem.potential);
    const RealField q = problem.potential.q();
    OracleStepper stepper{problem, H, cfg, {}};

    Trajectory tr;
    const std::vector<double> outs = output_times(cfg.T, cfg.output_dt);
    append_output(tr, 0.0, problem.phi, q, H, false);
    const int N = g.interior();
    std::vector<cplx> u(N);
    for (int j = 0; j < N; ++j)
        u[j] = problem.phi[j + 1];
    for (std::size_t k = 1; k < outs.size(); ++k) {
        const double span = outs[k] - outs[k - 1];
        const long steps = std::max(1L, static_cast<long>(std::ceil(span / cfg.dt - 1e-9)));
        const double dt = span / steps;
        for (long s = 0; s < steps; ++s)
            stepper.step(u, outs[k - 1] + s * dt, dt);
        ComplexField field(g);
        for (int j = 0; j < N; ++j)
            field[j + 1] = u[j];
        field[0] = stepper.f(outs[k]);
        if (!field.all_finite() || !(h1_norm(field, q) < 1e300)) {
            tr.status = SolveStatus::BlowUp;
            tr.status_time = outs[k - 1];
            return tr;
        }
        append_output(tr, outs[k], field, q, H, false);
    }
    tr.status_time = cfg.T;
    return tr;
}

double sup_l2_distance(const Trajectory& a, const Trajectory& b)
{
    double d = 0.0;
    std::size_t j = 0;
    for (std::size_t i = 0; i < a.times.size(); ++i) {
        while (j < b.times.size() && b.times[j] < a.times[i] - 1e-12)
            ++j;
        if (j < b.times.size() && std::abs(b.times[j] - a.times[i]) <= 1e-12)
            d = std::max(d, l2_norm(a.fields[i] - b.fields[j]));
    }
    return d;
}

Perturbation scaled_perturbation(const Problem& base, const ComplexField& eta, const BoundaryForce& zeta, double eps,
                                 std::string label)
{
    Perturbation p{std::move(label), base.phi, base.force};
    ComplexField d = eta;
    d *= cplx(eps);
    p.phi += d;
    const BoundaryForce& b = base.force;
    auto combine = [eps](const TimeFn& x, const TimeFn& y) -> TimeFn {
        return [=](double t) { return x(t) + eps * y(t); };
    };
    BoundaryForce f;
    f.name = b.name + "+eps*" + zeta.name;
    f.f = combine(b.f, zeta.f);
    f.df = combine(b.df, zeta.df);
    f.d2f = combine(b.d2f, zeta.d2f);
    if (b.d3f && zeta.d3f)
        f.d3f = combine(*b.d3f, *zeta.d3f);
    f.identically_zero = b.identically_zero && (zeta.identically_zero || eps == 0.0);
    p.force = std::move(f);
    if (p.label.empty())
        p.label = "eps=" + std::to_string(eps);
    return p;
}

DependenceReport continuous_dependence_experiment(const Problem& base, std::span<const Perturbation> perturbations,
                                                  const SolverConfig& cfg, int threads)
{
    const std::size_t n = perturbations.size();
    std::vector<Trajectory> runs(n + 1);
    parallel_for(static_cast<int>(n + 1), threads, [&](int i) {
        if (i == 0) {
            runs[0] = solve(base, cfg);
            return;
        }
        const Perturbation& pert = perturbations[i - 1];
        Problem p{base.potential, base.nonlinearity, pert.force, pert.phi};
        runs[i] = solve(p, cfg);
    });
    const RealField q = base.potential.q();
    DependenceReport rep;
    rep.base_status = runs[0].status;
    for (std::size_t i = 0; i < n; ++i) {
        const Perturbation& pert = perturbations[i];
        const Trajectory& tr = runs[i + 1];
        DependenceRun r;
        r.label = pert.label;
        r.status = tr.status;
        r.status_time = tr.status_time;
        r.input_deviation = std::max(h1_norm(pert.phi - base.phi, q), c2_distance(pert.force, base.force, cfg.T));
        const std::size_t common = std::min(tr.times.size(), runs[0].times.size());
        for (std::size_t k = 0; k < common; ++k)
            r.output_deviation = std::max(r.output_deviation, h1_norm(tr.fields[k] - runs[0].fields[k], q));
        r.ratio = r.input_deviation > 0.0 ? r.output_deviation / r.input_deviation : 0.0;
        rep.runs.push_back(r);
    }
    std::vector<DependenceRun> sorted = rep.runs;
    std::sort(sorted.begin(), sorted.end(),
              [](const DependenceRun& a, const DependenceRun& b) { return a.input_deviation < b.input_deviation; });
    bool first = true;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i > 0 && sorted[i].output_deviation < sorted[i - 1].output_deviation)
            rep.monotone = false;
        if (sorted[i].input_deviation <= 0.0)
            continue;
        rep.ratio_min = first ? sorted[i].ratio : std::min(rep.ratio_min, sorted[i].ratio);
        rep.ratio_max = first ? sorted[i].ratio : std::max(rep.ratio_max, sorted[i].ratio);
        first = false;
    }
    return rep;
}

} // namespace halfline
