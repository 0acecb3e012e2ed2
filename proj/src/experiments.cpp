#include "halfline/experiments.hpp"

#include "halfline/error.hpp"
#include "halfline/inequalities.hpp"
#include "halfline/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace halfline {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

ordered_json number(double v)
{
    if (!std::isfinite(v))
        return nullptr;
    return v;
}

std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void write_atomic(const std::filesystem::path& path, const std::string& content)
{
    std::error_code ec;
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path(), ec);
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(ErrorCode::Io, "cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out)
            throw Error(ErrorCode::Io, "write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw Error(ErrorCode::Io, "cannot move " + tmp.string() + " into place: " + ec.message());
}

double mass_drift(const Trajectory& tr)
{
    if (tr.fields.empty())
        return 0.0;
    const double m0 = integrate_abs2(tr.fields.front());
    double worst = 0.0;
    for (const auto& u : tr.fields)
        worst = std::max(worst, std::abs(integrate_abs2(u) - m0));
    return m0 > 0.0 ? worst / m0 : worst;
}

double energy_drift(const Trajectory& tr, const PotentialSpec& potential, const NonlinearitySpec& nl)
{
    if (tr.fields.empty())
        return 0.0;
    const RealField V = potential.total();
    const auto W0 = hamiltonian_W(tr.fields.front(), V, nl, tr.times.front());
    if (!W0)
        return nan;
    double worst = 0.0;
    for (std::size_t k = 0; k < tr.fields.size(); ++k)
        worst = std::max(worst, std::abs(*hamiltonian_W(tr.fields[k], V, nl, tr.times[k]) - *W0));
    return worst / (1.0 + std::abs(*W0));
}

IdentityReport uniform_identity_report(const Trajectory& tr, const Problem& problem, bool use_dV)
{
    Trajectory uniform;
    uniform.times = tr.times;
    uniform.fields = tr.fields;
    if (uniform.times.size() >= 3) {
        const std::size_t n = uniform.times.size();
        const double dt = uniform.times[1] - uniform.times[0];
        if (std::abs(uniform.times[n - 1] - uniform.times[n - 2] - dt) > 1e-9 * dt) {
            uniform.times.pop_back();
            uniform.fields.pop_back();
        }
    }
    IdentityOptions opt;
    opt.use_potential_derivative = use_dV;
    return identity_residuals(uniform, problem.potential, problem.nonlinearity, problem.force, opt);
}

double observed_order(double coarse, double fine)
{
    if (!(coarse > 0.0) || !(fine > 0.0) || !std::isfinite(coarse) || !std::isfinite(fine))
        return nan;
    return std::log2(coarse / fine);
}

namespace {

int exit_for(SolveStatus s, bool expect_blowup)
{
    switch (s) {
    case SolveStatus::Completed: return kExitOk;
    case SolveStatus::BlowUp: return expect_blowup ? kExitOk : kExitBlowUp;
    case SolveStatus::ContractionFailure: return kExitContraction;
    }
    return kExitFailure;
}

ordered_json trajectory_summary(const Trajectory& tr, const Problem& problem, const SolverConfig& cfg)
{
    ordered_json j;
    j["status"] = to_string(tr.status);
    j["status_time"] = tr.status_time;
    j["lift_delta"] = tr.lift_delta;
    int converged = 0, halvings = 0, sweeps = 0;
    double max_ratio = 0.0, max_gap = 0.0;
    bool have_gap = false;
    for (const auto& w : tr.windows) {
        sweeps += w.iterations;
        if (!w.converged) {
            ++halvings;
            continue;
        }
        ++converged;
        max_ratio = std::max(max_ratio, w.max_ratio);
        if (w.uniqueness_gap) {
            have_gap = true;
            max_gap = std::max(max_gap, *w.uniqueness_gap);
        }
    }
    j["windows"] = converged;
    j["window_halvings"] = halvings;
    j["picard_sweeps"] = sweeps;
    j["max_contraction_ratio"] = max_ratio;
    j["max_uniqueness_gap"] = have_gap ? number(max_gap) : ordered_json(nullptr);
    j["max_h1"] = tr.h1.empty() ? 0.0 : *std::max_element(tr.h1.begin(), tr.h1.end());
    if (cfg.monitor_h2 && !tr.h2.empty())
        j["max_h2"] = *std::max_element(tr.h2.begin(), tr.h2.end());
    j["mass_drift_relative"] = number(mass_drift(tr));
    j["energy_drift_relative"] = number(energy_drift(tr, problem.potential, problem.nonlinearity));
    j["warnings"] = tr.warnings;
    return j;
}

ordered_json identity_summary(const IdentityReport& r)
{
    ordered_json j;
    j["samples"] = r.size();
    j["max_residual_mass"] = number(r.max_residual_mass());
    j["max_residual_energy"] = number(r.max_residual_energy());
    j["max_residual_momentum"] = number(r.max_residual_momentum());
    j["max_integrated_mass_defect"] = number(r.max_integrated_mass_defect());
    j["energy_applicable"] = r.energy_applicable;
    j["momentum_applicable"] = r.momentum_applicable;
    return j;
}

ordered_json header(const RunConfig& cfg)
{
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["name"] = cfg.name;
    j["experiment"] = cfg.experiment;
    j["grid"] = {{"L", cfg.L}, {"N", cfg.N}};
    j["potential"] = cfg.potential_file ? cfg.potential_file->filename().string() : cfg.potential;
    j["nonlinearity"] = cfg.nonlinearity;
    j["force"] = cfg.force;
    j["initial"] = cfg.initial;
    return j;
}

std::filesystem::path out_path(const RunConfig& cfg, const std::string& suffix)
{
    return cfg.output_dir / (cfg.name + suffix);
}

ExperimentResult run_solve(const RunConfig& cfg)
{
    ExperimentResult res;
    const Problem problem = build_problem(cfg);
    const Trajectory tr = solve(problem, cfg.solver);
    const IdentityReport rep = uniform_identity_report(tr, problem, cfg.identity_use_dV);
    ordered_json j = header(cfg);
    j["trajectory"] = trajectory_summary(tr, problem, cfg.solver);
    j["identities"] = identity_summary(rep);
    j["expect_blowup"] = cfg.expect_blowup;
    res.exit_code = exit_for(tr.status, cfg.expect_blowup);
    j["exit_code"] = res.exit_code;
    const auto csv = out_path(cfg, "_identities.csv");
    write_atomic(csv, identity_csv(rep));
    res.files.push_back(csv);
    res.summary_json = j.dump(2);
    return res;
}

} // namespace

ConvergenceStudy convergence_study(const RunConfig& cfg, int threads)
{
    ConvergenceStudy study;
    study.levels.resize(cfg.levels);
    parallel_for(cfg.levels, threads, [&](int k) {
        const double s = std::ldexp(1.0, -k);
        ConvergenceLevel& lv = study.levels[k];
        lv.N = (cfg.N + 1) * (1 << k) - 1;
        const Grid grid(cfg.L, lv.N);
        lv.h = grid.spacing();
        const Problem problem = build_problem(cfg, grid);
        SolverConfig sc = cfg.solver;
        sc.window_T0 = cfg.solver.window_T0 * s;
        sc.output_dt = cfg.solver.output_dt * s;
        lv.window = sc.window_T0;
        lv.output_dt = sc.output_dt;
        const Trajectory tr = solve(problem, sc);
        lv.status = tr.status;
        const IdentityReport rep = uniform_identity_report(tr, problem, cfg.identity_use_dV);
        lv.residual_mass = rep.max_residual_mass();
        lv.residual_energy = rep.max_residual_energy();
        lv.residual_momentum = rep.max_residual_momentum();
        lv.integrated_mass_defect = rep.max_integrated_mass_defect();
        lv.mass_drift = mass_drift(tr);
        lv.energy_drift = energy_drift(tr, problem.potential, problem.nonlinearity);
        lv.oracle_distance = nan;
        if (cfg.oracle) {
            OracleConfig oc;
            oc.T = sc.T;
            oc.output_dt = sc.output_dt;
            oc.dt = cfg.oracle_dt.value_or(cfg.solver.output_dt / 16.0) * s * s;
            lv.oracle_dt = oc.dt;
            lv.oracle_distance = sup_l2_distance(tr, oracle_solve(problem, oc));
        }
    });
    const std::vector<std::pair<std::string, double ConvergenceLevel::*>> metrics{
        {"residual_mass", &ConvergenceLevel::residual_mass},
        {"residual_energy", &ConvergenceLevel::residual_energy},
        {"residual_momentum", &ConvergenceLevel::residual_momentum},
        {"integrated_mass_defect", &ConvergenceLevel::integrated_mass_defect},
        {"mass_drift", &ConvergenceLevel::mass_drift},
        {"energy_drift", &ConvergenceLevel::energy_drift},
        {"oracle_distance", &ConvergenceLevel::oracle_distance},
    };
    for (const auto& [name, member] : metrics) {
        std::vector<double> o;
        double lo = std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k < study.levels.size(); ++k) {
            o.push_back(observed_order(study.levels[k - 1].*member, study.levels[k].*member));
            lo = std::isnan(o.back()) || std::isnan(lo) ? nan : std::min(lo, o.back());
        }
        study.orders[name] = o;
        study.min_order[name] = lo;
    }
    return study;
}

namespace {

ExperimentResult run_convergence(const RunConfig& cfg, int threads)
{
    ExperimentResult res;
    const ConvergenceStudy st = convergence_study(cfg, threads);
    ordered_json j = header(cfg);
    std::string csv =
        "level,N,h,window,output_dt,oracle_dt,status,residual_mass,residual_energy,residual_momentum,"
        "integrated_mass_defect,mass_drift,energy_drift,oracle_distance\n";
    ordered_json levels = ordered_json::array();
    for (std::size_t k = 0; k < st.levels.size(); ++k) {
        const ConvergenceLevel& l = st.levels[k];
        if (l.status != SolveStatus::Completed && res.exit_code == kExitOk)
            res.exit_code = exit_for(l.status, cfg.expect_blowup);
        csv += std::to_string(k) + "," + std::to_string(l.N) + "," + fmt17(l.h) + "," + fmt17(l.window) + "," +
               fmt17(l.output_dt) + "," + fmt17(l.oracle_dt) + "," + to_string(l.status) + "," +
               fmt17(l.residual_mass) + "," + fmt17(l.residual_energy) + "," + fmt17(l.residual_momentum) + "," +
               fmt17(l.integrated_mass_defect) + "," + fmt17(l.mass_drift) + "," + fmt17(l.energy_drift) + "," +
               fmt17(l.oracle_distance) + "\n";
        levels.push_back({{"N", l.N},
                          {"h", l.h},
                          {"window", l.window},
                          {"output_dt", l.output_dt},
                          {"oracle_dt", number(l.oracle_dt)},
                          {"status", to_string(l.status)},
                          {"residual_mass", number(l.residual_mass)},
                          {"residual_energy", number(l.residual_energy)},
                          {"residual_momentum", number(l.residual_momentum)},
                          {"integrated_mass_defect", number(l.integrated_mass_defect)},
                          {"mass_drift", number(l.mass_drift)},
                          {"energy_drift", number(l.energy_drift)},
                          {"oracle_distance", number(l.oracle_distance)}});
    }
    j["levels"] = levels;
    ordered_json orders, mins;
    for (const auto& [name, o] : st.orders) {
        ordered_json a = ordered_json::array();
        for (double v : o)
            a.push_back(number(v));
        orders[name] = a;
        mins[name] = number(st.min_order.at(name));
    }
    j["orders"] = orders;
    j["min_order"] = mins;
    j["exit_code"] = res.exit_code;
    const auto path = out_path(cfg, "_convergence.csv");
    write_atomic(path, csv);
    res.files.push_back(path);
    res.summary_json = j.dump(2);
    return res;
}

ExperimentResult run_dependence(const RunConfig& cfg, int threads)
{
    ExperimentResult res;
    const Problem base = build_problem(cfg);
    const BoundaryForce zeta = make_force(cfg.zeta);
    const ComplexField eta = make_initial(cfg.eta, base.potential, zeta);
    std::vector<Perturbation> perts;
    for (double e : cfg.eps)
        perts.push_back(scaled_perturbation(base, eta, zeta, e, "eps=" + fmt17(e)));
    const DependenceReport rep = continuous_dependence_experiment(base, perts, cfg.solver, threads);
    ordered_json j = header(cfg);
    j["eta"] = cfg.eta;
    j["zeta"] = cfg.zeta;
    j["base_status"] = to_string(rep.base_status);
    std::string csv = "eps,input_deviation,output_deviation,ratio,status,status_time\n";
    ordered_json runs = ordered_json::array();
    for (std::size_t i = 0; i < rep.runs.size(); ++i) {
        const DependenceRun& r = rep.runs[i];
        csv += fmt17(cfg.eps[i]) + "," + fmt17(r.input_deviation) + "," + fmt17(r.output_deviation) + "," +
               fmt17(r.ratio) + "," + to_string(r.status) + "," + fmt17(r.status_time) + "\n";
        runs.push_back({{"eps", cfg.eps[i]},
                        {"input_deviation", r.input_deviation},
                        {"output_deviation", r.output_deviation},
                        {"ratio", r.ratio},
                        {"status", to_string(r.status)},
                        {"status_time", r.status_time}});
    }
    j["runs"] = runs;
    j["ratio_min"] = rep.ratio_min;
    j["ratio_max"] = rep.ratio_max;
    j["ratio_spread"] = rep.ratio_min > 0.0 ? number(rep.ratio_max / rep.ratio_min) : ordered_json(nullptr);
    j["monotone"] = rep.monotone;
    res.exit_code = exit_for(rep.base_status, cfg.expect_blowup);
    j["exit_code"] = res.exit_code;
    const auto path = out_path(cfg, "_dependence.csv");
    write_atomic(path, csv);
    res.files.push_back(path);
    res.summary_json = j.dump(2);
    return res;
}

ordered_json check_json(const CheckReport& r)
{
    return {{"applicable", r.applicable}, {"pass", r.pass}, {"max_error", number(r.max_error)}, {"samples", r.samples}};
}

ordered_json growth_json(const GrowthBound& g) { return {{"C", number(g.C)}, {"bounded", g.bounded}}; }

ExperimentResult run_hypotheses(const RunConfig& cfg)
{
    ExperimentResult res;
    const Grid grid(cfg.L, cfg.N);
    const PotentialSpec pot = build_potential(cfg, grid);
    const NonlinearitySpec nl = make_nonlinearity(cfg.nonlinearity);
    const BoundaryForce force = make_force(cfg.force);
    const ComplexField phi = make_initial(cfg.initial, pot, force);
    ordered_json j = header(cfg);

    ordered_json jp;
    jp["notes"] = pot.notes;
    jp["delta_reg"] = pot.delta_reg ? number(*pot.delta_reg) : ordered_json(nullptr);
    const std::vector<ComplexField> samples = random_smooth_fields(grid, cfg.samples, cfg.seed);
    ordered_json bounds = ordered_json::array();
    for (double eps : cfg.kato_eps) {
        RelativeBoundOptions opt;
        opt.check_operator_bound = true;
        const RelativeBoundReport r = verify_relative_bound(pot, eps, samples, opt);
        bounds.push_back({{"eps", eps},
                          {"C", r.C},
                          {"K", r.K},
                          {"samples", r.samples},
                          {"violations", r.violations},
                          {"worst_margin", number(r.worst_margin)},
                          {"pass", r.pass},
                          {"operator_C", r.C_sq},
                          {"operator_K", r.K_sq},
                          {"operator_violations", r.operator_violations},
                          {"operator_worst_margin", number(r.operator_worst_margin)}});
    }
    jp["relative_bound"] = bounds;
    try {
        const DerivativeSplitReport d = verify_derivative_split(pot);
        jp["derivative_split"] = {{"applicable", true},
                                  {"holds", d.holds},
                                  {"max_violation", d.max_violation},
                                  {"Q_local_l1", d.Q_local_l1},
                                  {"negative_part_local_l1", d.negative_part_local_l1}};
    } catch (const Error& e) {
        jp["derivative_split"] = {{"applicable", false}, {"reason", e.what()}};
    }
    j["potential_report"] = jp;

    ordered_json jn;
    const double T = cfg.solver.T;
    const double R = std::max(2.0, 2.0 * sup_norm(phi));
    const SampleSet lattice = SampleSet::lattice(cfg.L, T, R);
    jn["sign_condition"] = check_json(check_sign_condition(nl, lattice));
    jn["hamiltonian_structure"] = check_json(check_hamiltonian_structure(nl, lattice));
    jn["wirtinger_consistency"] = check_json(check_wirtinger_consistency(nl, lattice));
    std::vector<double> xs;
    for (int i = 0; i <= 4; ++i)
        xs.push_back(cfg.L * i / 4.0);
    const AssumptionAProbe a = probe_assumption_a(nl, R, 0.0, T, xs);
    jn["assumption_a"] = {{"finite", a.finite},
                          {"derivative_bound", number(a.derivative_bound)},
                          {"x_derivative_ratio", number(a.x_derivative_ratio)},
                          {"t_derivative_at_boundary", number(a.t_derivative_at_boundary)},
                          {"F_at_zero", number(a.F_at_zero)}};
    const double p = nonlinearity_exponent(cfg.nonlinearity);
    const GrowthReport g = check_growth_hypotheses(nl, p, SampleSet::radial(cfg.L, T, 1e-3, 1e3));
    jn["growth"] = {{"applicable", g.applicable},
                    {"space", growth_json(g.space)},
                    {"time", growth_json(g.time)},
                    {"lower", growth_json(g.lower)}};
    j["nonlinearity_report"] = jn;

    ordered_json jf;
    jf["consistency_error"] = number(force.identically_zero ? 0.0 : force_consistency_error(force, T));
    jf["compatible"] = compatibility_check(phi, force);
    jf["lift_admissible"] = force.identically_zero || pot.delta_reg.has_value();
    j["force_report"] = jf;
    j["exit_code"] = res.exit_code;
    res.summary_json = j.dump(2);
    return res;
}

ExperimentResult run_inequalities(const RunConfig& cfg)
{
    ExperimentResult res;
    const Grid grid(cfg.L, cfg.N);
    ordered_json j = header(cfg);
    const std::vector<ComplexField> calib = random_smooth_fields(grid, cfg.calibration_samples, cfg.seed);
    const std::vector<ComplexField> test = random_smooth_fields(grid, cfg.samples, cfg.seed + 0x9e3779b97f4a7c15ULL);
    std::string csv = "p,a,nu,k,C,gn_violations,young_violations,implication_failures,max_ratio\n";
    ordered_json studies = ordered_json::array();
    for (double p : cfg.gn_p) {
        const GNParameters gp = gn_parameters(p);
        const double C = calibrate_gn_constant(calib, p);
        int gn_bad = 0, young_bad = 0, implication_bad = 0;
        double max_ratio = 0.0;
        for (const auto& u : test) {
            const GNCheck c = check_gn(u, p, C);
            max_ratio = std::max(max_ratio, gn_sample(u, p).ratio);
            gn_bad += c.holds ? 0 : 1;
            for (double eps : cfg.young_eps) {
                const YoungCheck y = check_young_split(u, p, eps, C);
                young_bad += y.holds ? 0 : 1;
                implication_bad += (c.holds && !y.holds) ? 1 : 0;
            }
        }
        csv += fmt17(p) + "," + fmt17(gp.a) + "," + fmt17(gp.nu) + "," + fmt17(gp.k) + "," + fmt17(C) + "," +
               std::to_string(gn_bad) + "," + std::to_string(young_bad) + "," + std::to_string(implication_bad) +
               "," + fmt17(max_ratio) + "\n";
        studies.push_back({{"p", p},
                           {"a", gp.a},
                           {"nu", gp.nu},
                           {"k", gp.k},
                           {"identity_defect", gn_identity_defect(gp)},
                           {"C", C},
                           {"test_samples", test.size()},
                           {"max_test_ratio", max_ratio},
                           {"gn_violations", gn_bad},
                           {"young_violations", young_bad},
                           {"implication_failures", implication_bad}});
    }
    j["studies"] = studies;
    const auto path = out_path(cfg, "_inequalities.csv");
    write_atomic(path, csv);
    res.files.push_back(path);
    j["exit_code"] = res.exit_code;
    res.summary_json = j.dump(2);
    return res;
}

} // namespace

ExperimentResult run_experiment(const RunConfig& cfg, int threads)
{
    validate_run_config(cfg);
    ExperimentResult res;
    if (cfg.experiment == "solve")
        res = run_solve(cfg);
    else if (cfg.experiment == "convergence")
        res = run_convergence(cfg, threads);
    else if (cfg.experiment == "dependence")
        res = run_dependence(cfg, threads);
    else if (cfg.experiment == "hypotheses")
        res = run_hypotheses(cfg);
    else if (cfg.experiment == "inequalities")
        res = run_inequalities(cfg);
    else
        throw Error(ErrorCode::Configuration, "unknown experiment kind '" + cfg.experiment + "'");
    res.name = cfg.name;
    res.experiment = cfg.experiment;
    const auto summary = out_path(cfg, "_summary.json");
    write_atomic(summary, res.summary_json + "\n");
    res.files.push_back(summary);
    return res;
}

std::vector<ExperimentResult> run_batch(const std::vector<RunConfig>& configs, int threads)
{
    std::vector<ExperimentResult> out(configs.size());
    const int outer = std::max(1, std::min<int>(threads, static_cast<int>(configs.size())));
    const int inner = std::max(1, threads / outer);
    parallel_for(static_cast<int>(configs.size()), outer, [&](int i) {
        try {
            out[i] = run_experiment(configs[i], inner);
        } catch (const Error& e) {
            out[i].name = configs[i].name;
            out[i].experiment = configs[i].experiment;
            out[i].exit_code = exit_code_for(e);
            out[i].summary_json = error_json(e);
        }
    });
    return out;
}

int exit_code_for(const Error& e)
{
    switch (e.code()) {
    case ErrorCode::Io:
    case ErrorCode::InternalConsistency: return kExitFailure;
    default: return kExitValidation;
    }
}

std::string error_json(const Error& e)
{
    ordered_json j;
    j["error"] = {{"code", to_string(e.code())},
                  {"message", e.what()},
                  {"hypothesis", e.hypothesis().empty() ? ordered_json(nullptr) : ordered_json(e.hypothesis())}};
    return j.dump(2);
}

} // namespace halfline
