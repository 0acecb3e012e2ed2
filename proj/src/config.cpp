#include "halfline/config.hpp"

#include "halfline/error.hpp"
#include "halfline/hamiltonian.hpp"
#include "halfline/inequalities.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace halfline {

using nlohmann::json;

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_real(const std::string& s, double& out)
{
    if (s.empty())
        return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && std::isfinite(out);
}

Error parse_error(const std::string& what) { return Error(ErrorCode::Parse, what); }

double real_arg(const PresetCall& c, std::size_t i, const char* what)
{
    if (i >= c.args.size())
        throw parse_error(c.name + ": missing argument " + what);
    if (c.args[i].imag() != 0.0)
        throw parse_error(c.name + ": argument " + what + " must be real");
    return c.args[i].real();
}

void expect_args(const PresetCall& c, std::size_t lo, std::size_t hi)
{
    if (c.args.size() < lo || c.args.size() > hi)
        throw parse_error("preset " + c.name + " takes " + std::to_string(lo) +
                          (lo == hi ? "" : "-" + std::to_string(hi)) + " arguments, got " +
                          std::to_string(c.args.size()));
}

} // namespace

cplx parse_complex(const std::string& text)
{
    const std::string s = trim(text);
    if (s.empty())
        throw parse_error("empty number");
    double re = 0.0, im = 0.0;
    if (s.back() != 'i') {
        if (!parse_real(s, re))
            throw parse_error("not a number: '" + s + "'");
        return {re, 0.0};
    }
    const std::string body = s.substr(0, s.size() - 1);
    std::size_t split = std::string::npos;
    for (std::size_t k = body.size(); k-- > 1;)
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    const std::string re_part = split == std::string::npos ? "" : body.substr(0, split);
    const std::string im_part = split == std::string::npos ? body : body.substr(split);
    if (!re_part.empty() && !parse_real(re_part, re))
        throw parse_error("not a number: '" + s + "'");
    if (im_part.empty() || im_part == "+")
        im = 1.0;
    else if (im_part == "-")
        im = -1.0;
    else if (!parse_real(im_part, im))
        throw parse_error("not a number: '" + s + "'");
    return {re, im};
}

PresetCall parse_preset(const std::string& text)
{
    const std::string s = trim(text);
    PresetCall c;
    const auto open = s.find('(');
    if (open == std::string::npos) {
        c.name = s;
    } else {
        if (s.back() != ')')
            throw parse_error("preset '" + s + "' is missing ')'");
        c.name = trim(s.substr(0, open));
        const std::string inner = s.substr(open + 1, s.size() - open - 2);
        if (!trim(inner).empty()) {
            std::stringstream ss(inner);
            std::string item;
            while (std::getline(ss, item, ','))
                c.args.push_back(parse_complex(item));
        }
    }
    if (c.name.empty() || !std::all_of(c.name.begin(), c.name.end(), [](char ch) {
            return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_';
        }))
        throw parse_error("bad preset name in '" + s + "'");
    return c;
}

NonlinearitySpec make_nonlinearity(const std::string& preset)
{
    const PresetCall c = parse_preset(preset);
    if (c.name == "zero") {
        expect_args(c, 0, 0);
        return NonlinearitySpec::zero();
    }
    if (c.name == "power") {
        expect_args(c, 2, 2);
        return NonlinearitySpec::power(c.args[0], real_arg(c, 1, "p"));
    }
    if (c.name == "saturating") {
        expect_args(c, 3, 3);
        return NonlinearitySpec::saturating(c.args[0], real_arg(c, 1, "p"), real_arg(c, 2, "s"));
    }
    throw Error(ErrorCode::Configuration, "unknown nonlinearity preset '" + c.name + "'");
}

double nonlinearity_exponent(const std::string& preset)
{
    const PresetCall c = parse_preset(preset);
    if ((c.name == "power" || c.name == "saturating") && c.args.size() >= 2)
        return c.args[1].real();
    return 3.0;
}

BoundaryForce make_force(const std::string& preset)
{
    const PresetCall c = parse_preset(preset);
    if (c.name == "zero") {
        expect_args(c, 0, 0);
        return BoundaryForce::zero();
    }
    if (c.name == "sinusoid") {
        expect_args(c, 2, 2);
        return BoundaryForce::sinusoid(real_arg(c, 0, "A"), real_arg(c, 1, "omega"));
    }
    if (c.name == "ramp") {
        expect_args(c, 2, 2);
        return BoundaryForce::ramp(real_arg(c, 0, "A"), real_arg(c, 1, "T_r"));
    }
    if (c.name == "phase") {
        expect_args(c, 2, 2);
        return BoundaryForce::phase(real_arg(c, 0, "A"), real_arg(c, 1, "omega"));
    }
    if (c.name == "constant") {
        expect_args(c, 1, 1);
        return BoundaryForce::constant(c.args[0]);
    }
    throw Error(ErrorCode::Configuration, "unknown force preset '" + c.name + "'");
}

ComplexField make_initial(const std::string& preset, const PotentialSpec& potential, const BoundaryForce& force)
{
    const PresetCall c = parse_preset(preset);
    const Grid& g = potential.grid();
    const double L = g.length();
    if (c.name == "zero") {
        expect_args(c, 0, 0);
        return ComplexField(g);
    }
    if (c.name == "gaussian") {
        expect_args(c, 3, 4);
        const double x0 = real_arg(c, 0, "x0");
        const double w = real_arg(c, 1, "w");
        const double k0 = real_arg(c, 2, "k0");
        const cplx A = c.args.size() > 3 ? c.args[3] : cplx(1.0);
        if (!(w > 0.0))
            throw Error(ErrorCode::Configuration, "gaussian width must be positive");
        auto G = [=](double x) {
            const double d = (x - x0) / w;
            return A * std::exp(-0.5 * d * d) * std::exp(cplx(0.0, k0 * x));
        };
        const cplx f0 = force.identically_zero ? cplx{} : force.f(0.0);
        const cplx c0 = f0 - G(0.0), cL = -G(L);
        ComplexField phi = ComplexField::sample(g, [&](double x) {
            return G(x) + c0 * std::exp(-x * x) + cL * std::exp(-(L - x) * (L - x));
        });
        phi[0] = f0;
        phi[g.size() - 1] = 0.0;
        return phi;
    }
    if (c.name == "eigenmode") {
        expect_args(c, 1, 2);
        const double k = real_arg(c, 0, "k");
        if (k < 1.0 || k != std::floor(k) || k > g.interior())
            throw Error(ErrorCode::Configuration, "eigenmode index must be an integer in [1, N]");
        ComplexField phi = Hamiltonian::assemble(potential).eigenmode(static_cast<int>(k) - 1);
        if (c.args.size() > 1)
            phi *= c.args[1];
        return phi;
    }
    throw Error(ErrorCode::Configuration, "unknown initial-value preset '" + c.name + "'");
}

const std::vector<std::string>& experiment_kinds()
{
    static const std::vector<std::string> k{"solve", "convergence", "dependence", "hypotheses", "inequalities"};
    return k;
}

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where)
{
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw parse_error("unknown key '" + it.key() + "' in " + where);
}

template <class T>
void read(const json& j, const char* key, T& out)
{
    if (!j.contains(key))
        return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw parse_error(std::string("bad value for '") + key + "': " + e.what());
    }
}

template <class T>
void read_opt(const json& j, const char* key, std::optional<T>& out)
{
    if (!j.contains(key) || j.at(key).is_null())
        return;
    T v{};
    read(j, key, v);
    out = v;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p)
{
    const std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

RunConfig parse_one(const json& j, const std::filesystem::path& base)
{
    if (!j.is_object())
        throw parse_error("run configuration must be a JSON object");
    check_keys(j,
               {"schema_version", "name", "experiment", "grid", "potential", "nonlinearity", "force", "initial",
                "solver", "identities", "expect_blowup", "convergence", "dependence", "hypotheses", "inequalities",
                "output"},
               "run");
    RunConfig c;
    read(j, "name", c.name);
    read(j, "experiment", c.experiment);
    if (std::find(experiment_kinds().begin(), experiment_kinds().end(), c.experiment) == experiment_kinds().end())
        throw Error(ErrorCode::Configuration, "unknown experiment kind '" + c.experiment + "'");
    if (!j.contains("grid"))
        throw parse_error("missing 'grid'");
    const json& g = j.at("grid");
    check_keys(g, {"L", "N"}, "grid");
    read(g, "L", c.L);
    read(g, "N", c.N);
    if (j.contains("potential")) {
        const json& p = j.at("potential");
        if (p.is_string()) {
            c.potential = p.get<std::string>();
        } else {
            check_keys(p, {"preset", "params", "file", "delta_reg"}, "potential");
            read(p, "preset", c.potential);
            if (p.contains("file"))
                c.potential_file = resolve(base, p.at("file").get<std::string>());
            read_opt(p, "delta_reg", c.potential_delta_reg);
            if (p.contains("params")) {
                const json& q = p.at("params");
                check_keys(q, {"omega", "Z", "depth", "a", "b", "c"}, "potential.params");
                read(q, "omega", c.potential_params.omega);
                read(q, "Z", c.potential_params.Z);
                read(q, "depth", c.potential_params.depth);
                read(q, "a", c.potential_params.a);
                read(q, "b", c.potential_params.b);
                read(q, "c", c.potential_params.c);
            }
        }
    }
    read(j, "nonlinearity", c.nonlinearity);
    read(j, "force", c.force);
    read(j, "initial", c.initial);
    read(j, "expect_blowup", c.expect_blowup);
    if (j.contains("solver")) {
        const json& s = j.at("solver");
        check_keys(s,
                   {"T", "window_T0", "picard_tol", "picard_max_iter", "quad_nodes", "contraction_guard",
                    "blowup_threshold", "output_dt", "min_window", "lift_delta", "lift_laplacian",
                    "check_uniqueness", "monitor_h2"},
                   "solver");
        SolverConfig& sc = c.solver;
        read(s, "T", sc.T);
        read(s, "window_T0", sc.window_T0);
        read(s, "picard_tol", sc.picard_tol);
        read(s, "picard_max_iter", sc.picard_max_iter);
        read(s, "quad_nodes", sc.quad_nodes);
        read(s, "contraction_guard", sc.contraction_guard);
        read(s, "blowup_threshold", sc.blowup_threshold);
        read(s, "output_dt", sc.output_dt);
        read(s, "min_window", sc.min_window);
        read_opt(s, "lift_delta", sc.lift_delta);
        read(s, "check_uniqueness", sc.check_uniqueness);
        read(s, "monitor_h2", sc.monitor_h2);
        std::string lap = "discrete";
        read(s, "lift_laplacian", lap);
        if (lap == "discrete")
            sc.lift_laplacian = LiftLaplacian::Discrete;
        else if (lap == "analytic")
            sc.lift_laplacian = LiftLaplacian::Analytic;
        else
            throw parse_error("lift_laplacian must be 'discrete' or 'analytic'");
    }
    if (j.contains("identities")) {
        check_keys(j.at("identities"), {"use_potential_derivative"}, "identities");
        read(j.at("identities"), "use_potential_derivative", c.identity_use_dV);
    }
    if (j.contains("convergence")) {
        const json& s = j.at("convergence");
        check_keys(s, {"levels", "oracle", "oracle_dt"}, "convergence");
        read(s, "levels", c.levels);
        read(s, "oracle", c.oracle);
        read_opt(s, "oracle_dt", c.oracle_dt);
    }
    if (j.contains("dependence")) {
        const json& s = j.at("dependence");
        check_keys(s, {"eps", "eta", "zeta"}, "dependence");
        read(s, "eps", c.eps);
        read(s, "eta", c.eta);
        read(s, "zeta", c.zeta);
    }
    for (const char* key : {"hypotheses", "inequalities"}) {
        if (!j.contains(key))
            continue;
        const json& s = j.at(key);
        check_keys(s, {"samples", "calibration_samples", "p", "young_eps", "kato_eps", "seed"}, key);
        read(s, "samples", c.samples);
        read(s, "calibration_samples", c.calibration_samples);
        read(s, "p", c.gn_p);
        read(s, "young_eps", c.young_eps);
        read(s, "kato_eps", c.kato_eps);
        read(s, "seed", c.seed);
    }
    if (j.contains("output")) {
        const json& o = j.at("output");
        check_keys(o, {"dir"}, "output");
        std::string dir;
        read(o, "dir", dir);
        if (!dir.empty())
            c.output_dir = resolve(base, dir);
    } else if (!base.empty()) {
        c.output_dir = base;
    }
    for (char ch : c.name)
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.'))
            throw parse_error("run name may only contain letters, digits, '_', '-', '.'");
    return c;
}

void check_version(const json& j)
{
    if (!j.contains("schema_version"))
        throw parse_error("missing 'schema_version'");
    if (!j.at("schema_version").is_number_integer() || j.at("schema_version").get<int>() != kSchemaVersion)
        throw parse_error("unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");
}

} // namespace

std::vector<RunConfig> parse_run_configs(const std::string& text, const std::filesystem::path& base)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw parse_error(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object())
        throw parse_error("config must be a JSON object");
    check_version(j);
    std::vector<RunConfig> out;
    if (j.contains("batch")) {
        check_keys(j, {"schema_version", "batch"}, "batch file");
        if (!j.at("batch").is_array() || j.at("batch").empty())
            throw parse_error("'batch' must be a non-empty array");
        std::set<std::string> names;
        for (const auto& item : j.at("batch")) {
            json run = item;
            if (!run.is_object())
                throw parse_error("batch entries must be objects");
            run.erase("schema_version");
            out.push_back(parse_one(run, base));
            if (!names.insert(out.back().name).second)
                throw parse_error("duplicate run name '" + out.back().name + "' in batch");
        }
    } else {
        out.push_back(parse_one(j, base));
    }
    return out;
}

std::vector<RunConfig> load_run_configs(const std::filesystem::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::Io, "cannot read config file " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_configs(ss.str(), file.parent_path());
}

PotentialSpec build_potential(const RunConfig& cfg, const Grid& grid)
{
    if (!cfg.potential_file)
        return make_potential(grid, cfg.potential, cfg.potential_params);
    std::ifstream in(*cfg.potential_file);
    if (!in)
        throw Error(ErrorCode::Io, "cannot read potential file " + cfg.potential_file->string());
    std::vector<double> xs, v1, v2;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#')
            continue;
        if (header) {
            header = false;
            if (std::isalpha(static_cast<unsigned char>(line[0])))
                continue;
        }
        std::stringstream ss(line);
        std::string a, b, d;
        double x, p, q;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, d, ',') ||
            !parse_real(trim(a), x) || !parse_real(trim(b), p) || !parse_real(trim(d), q))
            throw parse_error("potential file: expected 'x,V1,V2' rows, got '" + line + "'");
        xs.push_back(x);
        v1.push_back(p);
        v2.push_back(q);
    }
    PotentialSpec spec = potential_from_samples(grid, xs, v1, v2);
    spec.name = cfg.potential_file->filename().string();
    spec.delta_reg = cfg.potential_delta_reg;
    return spec;
}

Problem build_problem(const RunConfig& cfg, const Grid& grid)
{
    PotentialSpec pot = build_potential(cfg, grid);
    BoundaryForce force = make_force(cfg.force);
    ComplexField phi = make_initial(cfg.initial, pot, force);
    return Problem{std::move(pot), make_nonlinearity(cfg.nonlinearity), std::move(force), std::move(phi)};
}

Problem build_problem(const RunConfig& cfg) { return build_problem(cfg, Grid(cfg.L, cfg.N)); }

void validate_run_config(const RunConfig& cfg)
{
    if (!(cfg.L > 0.0) || cfg.N < 8)
        throw Error(ErrorCode::Configuration, "grid needs L > 0 and N >= 8");
    cfg.solver.validate();
    if (cfg.levels < 2 || cfg.levels > 6)
        throw Error(ErrorCode::Configuration, "convergence levels must be between 2 and 6");
    if (cfg.samples < 1 || cfg.calibration_samples < 1)
        throw Error(ErrorCode::Configuration, "sample counts must be positive");
    for (double e : cfg.eps)
        if (!(e > 0.0))
            throw Error(ErrorCode::Configuration, "perturbation sizes must be positive");
    for (double e : cfg.young_eps)
        if (!(e > 0.0))
            throw Error(ErrorCode::Configuration, "Young split eps must be positive");
    for (double e : cfg.kato_eps)
        if (!(e > 0.0))
            throw Error(ErrorCode::Configuration, "relative-bound eps must be positive");
    for (double p : cfg.gn_p)
        (void)gn_parameters(p);
    const Problem problem = build_problem(cfg);
    if (cfg.experiment == "inequalities")
        return;
    validate_problem(problem, cfg.solver.T);
    if (!problem.force.identically_zero) {
        const double delta = cfg.solver.lift_delta.value_or(default_lift_delta(problem.potential));
        (void)Lift(problem.potential, problem.nonlinearity, problem.force, delta, cfg.solver.lift_laplacian);
    }
    if (cfg.experiment == "dependence") {
        const BoundaryForce zeta = make_force(cfg.zeta);
        const ComplexField eta = make_initial(cfg.eta, problem.potential, zeta);
        if (!zeta.identically_zero)
            require_force_consistency(zeta, cfg.solver.T);
        if (std::abs(eta[0] - (zeta.identically_zero ? cplx{} : zeta.f(0.0))) > 1e-10)
            throw Error(ErrorCode::Configuration, "perturbations must satisfy eta(0) = zeta(0)",
                        "compatibility condition phi(0) = f(0)");
    }
}

std::string presets_json()
{
    json j;
    j["schema_version"] = kSchemaVersion;
    j["experiments"] = experiment_kinds();
    j["potential"] = potential_presets();
    j["nonlinearity"] = nonlinearity_presets();
    j["force"] = force_presets();
    j["initial"] = {"zero", "gaussian(x0,w,k0[,A])", "eigenmode(k[,A])"};
    return j.dump(2);
}

} // namespace halfline
