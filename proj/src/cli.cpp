#include "eulerlab/cli.hpp"

#include "eulerlab/besov.hpp"
#include "eulerlab/calculus.hpp"
#include "eulerlab/commutator.hpp"
#include "eulerlab/error.hpp"
#include "eulerlab/euler_solver.hpp"
#include "eulerlab/extensions.hpp"
#include "eulerlab/mollify.hpp"
#include "eulerlab/parallel.hpp"
#include "eulerlab/rng.hpp"
#include "eulerlab/snapshot.hpp"
#include "eulerlab/synth.hpp"
#include "eulerlab/uniqueness.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace eulerlab::cli {
namespace {

namespace fs = std::filesystem;

constexpr const char* kToolVersion = "1.0.0";

// ---------------------------------------------------------------- config reading

// Object view that records which keys were read so leftovers can be rejected.
class Section {
public:
    Section(const Json& j, std::string path) : j_(&j), path_(std::move(path)) {
        if (!j.is_object()) throw ConfigError("key '" + path_ + "' must be an object");
    }

    bool has(const std::string& key) const { return j_->contains(key); }

    std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const Json& raw(const std::string& key) {
        used_.insert(key);
        return j_->at(key);
    }

    double number(const std::string& key) {
        if (!has(key)) throw ConfigError("missing required key '" + name(key) + "'");
        const Json& v = raw(key);
        if (!v.is_number()) throw ConfigError("key '" + name(key) + "' must be a number");
        return v.get<double>();
    }
    double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }
    std::optional<double> maybe_number(const std::string& key) {
        return has(key) ? std::optional<double>(number(key)) : std::nullopt;
    }

    long long integer(const std::string& key) {
        if (!has(key)) throw ConfigError("missing required key '" + name(key) + "'");
        const Json& v = raw(key);
        if (!v.is_number_integer()) throw ConfigError("key '" + name(key) + "' must be an integer");
        return v.get<long long>();
    }
    long long integer(const std::string& key, long long fallback) { return has(key) ? integer(key) : fallback; }

    std::string text(const std::string& key) {
        if (!has(key)) throw ConfigError("missing required key '" + name(key) + "'");
        const Json& v = raw(key);
        if (!v.is_string()) throw ConfigError("key '" + name(key) + "' must be a string");
        return v.get<std::string>();
    }
    std::string text(const std::string& key, const std::string& fallback) { return has(key) ? text(key) : fallback; }

    std::vector<double> numbers(const std::string& key) {
        const Json& v = raw(key);
        if (!v.is_array()) throw ConfigError("key '" + name(key) + "' must be an array of numbers");
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number()) throw ConfigError("key '" + name(key) + "' must be an array of numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

    Section child(const std::string& key) {
        used_.insert(key);
        return Section(j_->at(key), name(key));
    }

    void finish(const std::string& context) const {
        for (const auto& item : j_->items()) {
            if (!used_.count(item.key())) {
                throw ConfigError("unknown key '" + name(item.key()) + "'" + context);
            }
        }
    }

private:
    const Json* j_;
    std::string path_;
    std::set<std::string> used_;
};

struct ScalarSpec {
    std::string kind = "constant";  // constant | sine | sine_product
    double mean = 0.0;
    double amplitude = 0.0;
    std::array<int, 2> mode{1, 1};
};

struct Parsed {
    std::string experiment;
    std::uint64_t seed = 0;
    std::optional<std::string> output_dir;
    int dims = 2;
    int n = 0;
    SynthSpec synth;
    bool has_solver = false;
    SolverConfig solver;
    // sweep
    std::vector<double> epsilons;
    bool explicit_epsilons = false;
    double p_int = 3.0;
    double slope_tolerance = 0.15;
    std::optional<double> alpha;
    int samples = 1;
    // checks
    double admissibility_tolerance = 1e-7;
    std::optional<double> max_relative_drift;
    // weak
    int test_functions = 10;
    std::optional<double> support_end;
    double vector_tolerance = 1e-6;
    double scalar_tolerance = 1e-10;
    // pipelines
    RunSpec run_a{}, run_b{};
    UniquenessOptions certificate;
    PressureSolveOptions pressure;
    ScalarSpec density{"sine_product", 1.0, 0.2, {1, 1}};
    ScalarSpec theta{"sine", 0.0, 0.1, {1, 0}};
    std::array<double, 2> gravity{0.0, -1.0};
};

bool uses_solver(const std::string& e) {
    return e == "energy_conservation" || e == "weak_residual" || e == "uniqueness" || e == "inhom_uniqueness" ||
           e == "boussinesq_uniqueness";
}
bool is_pipeline(const std::string& e) {
    return e == "uniqueness" || e == "inhom_uniqueness" || e == "boussinesq_uniqueness";
}
bool is_scaling(const std::string& e) { return e == "commutator_scaling" || e == "cet_scaling"; }

ScalarSpec parse_scalar(Section s) {
    ScalarSpec out;
    out.kind = s.text("kind");
    if (out.kind != "constant" && out.kind != "sine" && out.kind != "sine_product") {
        throw ConfigError("key '" + s.name("kind") + "' must be one of constant, sine, sine_product; got '" + out.kind +
                          "'");
    }
    out.mean = s.number("mean", 0.0);
    if (out.kind != "constant") {
        out.amplitude = s.number("amplitude");
        if (s.has("mode")) {
            const auto m = s.numbers("mode");
            if (m.size() != 2 || m[0] != std::round(m[0]) || m[1] != std::round(m[1])) {
                throw ConfigError("key '" + s.name("mode") + "' must be two integers");
            }
            out.mode = {static_cast<int>(m[0]), static_cast<int>(m[1])};
        }
    }
    s.finish("");
    return out;
}

RunSpec parse_run(Section s, const SolverConfig& base) {
    RunSpec r{};
    r.grid_n = static_cast<int>(s.integer("n"));
    r.solver = base;
    r.solver.dt = s.number("dt", base.dt);
    r.solver.T = s.number("T", base.T);
    r.solver.snapshot_stride = static_cast<int>(s.integer("snapshot_stride", base.snapshot_stride));
    r.solver.cfl = s.number("cfl", base.cfl);
    s.finish("");
    return r;
}

Parsed parse(const Json& config, const RunOptions& options) {
    Section top(config, "");
    Parsed p;
    p.experiment = top.text("experiment");
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), p.experiment) == names.end()) {
        std::string list;
        for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
        throw ConfigError("key 'experiment': unknown experiment '" + p.experiment + "' (expected one of " + list + ")");
    }
    const std::string context = " for experiment '" + p.experiment + "'";
    const long long seed = top.integer("seed", 0);
    if (seed < 0) throw ConfigError("key 'seed' must be a non-negative integer");
    p.seed = options.seed_override.value_or(static_cast<std::uint64_t>(seed));
    if (top.has("output_dir")) p.output_dir = top.text("output_dir");

    {
        Section g = top.child("grid");
        p.dims = static_cast<int>(g.integer("dims", 2));
        p.n = static_cast<int>(g.integer("n"));
        g.finish("");
    }
    {
        Section s = top.child("synth");
        p.synth.kind = synth_kind_from_string(s.text("kind"));
        p.synth.alpha = s.maybe_number("alpha");
        if (s.has("j_max")) p.synth.j_max = static_cast<int>(s.integer("j_max"));
        p.synth.slope = s.maybe_number("slope");
        p.synth.amplitude = s.number("amplitude", 1.0);
        p.synth.seed = p.seed;
        s.finish("");
    }
    if (uses_solver(p.experiment)) {
        Section s = top.child("solver");
        p.has_solver = true;
        p.solver.dt = s.number("dt");
        p.solver.T = s.number("T");
        p.solver.snapshot_stride = static_cast<int>(s.integer("snapshot_stride", 10));
        p.solver.cfl = s.number("cfl", 0.5);
        s.finish("");
    }
    if (p.experiment == "besov_fit" || is_scaling(p.experiment)) {
        if (top.has("sweep")) {
            Section s = top.child("sweep");
            p.p_int = s.number("p_int", 3.0);
            p.alpha = s.maybe_number("alpha");
            if (is_scaling(p.experiment)) {
                if (s.has("epsilons")) {
                    p.epsilons = s.numbers("epsilons");
                    p.explicit_epsilons = true;
                }
                p.slope_tolerance = s.number("slope_tolerance", 0.15);
                p.samples = static_cast<int>(s.integer("samples", 1));
            }
            s.finish(context);
        }
    }
    if (p.experiment == "energy_conservation" && top.has("checks")) {
        Section s = top.child("checks");
        p.admissibility_tolerance = s.number("admissibility_tolerance", 1e-7);
        p.max_relative_drift = s.maybe_number("max_relative_drift");
        s.finish("");
    }
    if (p.experiment == "weak_residual" && top.has("weak")) {
        Section s = top.child("weak");
        p.test_functions = static_cast<int>(s.integer("test_functions", 10));
        p.support_end = s.maybe_number("support_end");
        p.vector_tolerance = s.number("vector_tolerance", 1e-6);
        p.scalar_tolerance = s.number("scalar_tolerance", 1e-10);
        s.finish("");
    }
    if (is_pipeline(p.experiment)) {
        Section r = top.child("runs");
        p.run_a = parse_run(r.child("a"), p.solver);
        p.run_b = parse_run(r.child("b"), p.solver);
        r.finish("");
        if (top.has("certificate")) {
            Section c = top.child("certificate");
            p.certificate.p_int = c.number("p_int", 3.0);
            p.certificate.certify_tolerance = c.maybe_number("tolerance");
            p.certificate.working_epsilon = c.maybe_number("working_epsilon");
            if (p.experiment == "inhom_uniqueness") {
                p.pressure.tolerance = c.number("pressure_tolerance", 1e-10);
                p.pressure.max_iterations = static_cast<int>(c.integer("pressure_max_iterations", 500));
            } else {
                const std::string path = c.text("path", "commutator");
                if (path == "trilinear") {
                    p.certificate.path = CertificatePath::trilinear;
                } else if (path == "commutator") {
                    p.certificate.path = CertificatePath::commutator;
                } else {
                    throw ConfigError("key 'certificate.path' must be trilinear or commutator, got '" + path + "'");
                }
                p.certificate.alpha = c.maybe_number("alpha");
                if (c.has("epsilons")) p.certificate.epsilons = c.numbers("epsilons");
            }
            c.finish(context);
        }
    }
    if (p.experiment == "inhom_uniqueness" && top.has("density")) p.density = parse_scalar(top.child("density"));
    if (p.experiment == "boussinesq_uniqueness") {
        if (top.has("theta")) p.theta = parse_scalar(top.child("theta"));
        if (top.has("gravity")) {
            const auto g = top.numbers("gravity");
            if (g.size() != 2) throw ConfigError("key 'gravity' must hold two numbers");
            p.gravity = {g[0], g[1]};
        }
    }
    top.finish(context);
    return p;
}

ScalarField make_scalar(const ScalarSpec& s, const PeriodicGrid& g) {
    if (s.kind == "constant") return ScalarField::constant(g, s.mean);
    if (s.kind == "sine") {
        return ScalarField::sample(g, [&s](const Point& x) {
            return s.mean + s.amplitude * std::sin(kPi * (s.mode[0] * x[0] + s.mode[1] * x[1]));
        });
    }
    return ScalarField::sample(g, [&s](const Point& x) {
        return s.mean + s.amplitude * std::sin(kPi * s.mode[0] * x[0]) * std::sin(kPi * s.mode[1] * x[1]);
    });
}

std::vector<double> default_sweep(const PeriodicGrid& g) { return default_epsilons(g); }

std::string fmt(double v) {
    std::ostringstream o;
    o << std::setprecision(6) << v;
    return o.str();
}

// ---------------------------------------------------------------- validation

template <typename F>
void check(Diagnostics& d, const std::string& what, F&& f) {
    try {
        f();
    } catch (const std::exception& e) {
        const std::string msg = e.what();
        d.errors.push_back(msg.rfind(what + ":", 0) == 0 ? msg : what + ": " + msg);
    }
}

void check_cfl_bound(Diagnostics& d, const std::string& what, const VelocityField& u, const SolverConfig& s) {
    const double umax = max_norm(u);
    const double bound = umax > 0.0 ? s.cfl * u.grid().spacing() / umax : INFINITY;
    d.derived.emplace_back(what + ".cfl_dt_bound", fmt(bound));
    d.derived.emplace_back(what + ".steps", std::to_string(step_count(s.T, s.dt)));
    if (!(s.dt > 0.0)) d.errors.push_back(what + ".dt: must be positive");
    if (!(s.T > 0.0)) d.errors.push_back(what + ".T: must be positive");
    if (s.snapshot_stride < 1) d.errors.push_back(what + ".snapshot_stride: must be >= 1");
    if (!(s.cfl > 0.0)) d.errors.push_back(what + ".cfl: must be positive");
    if (s.dt > bound) {
        d.errors.push_back(what + ".dt: " + fmt(s.dt) + " exceeds the CFL bound " + fmt(bound) + " of the initial data");
    }
}

struct Prepared {
    Parsed cfg;
    std::optional<PeriodicGrid> grid;
    std::optional<VelocityField> u0;
};

Prepared prepare(const Json& config, const RunOptions& options, Diagnostics& d) {
    Prepared p;
    try {
        p.cfg = parse(config, options);
    } catch (const std::exception& e) {
        d.errors.push_back(e.what());
        return p;
    }
    const Parsed& c = p.cfg;
    check(d, "grid", [&] { p.grid = make_grid(c.dims, c.n); });
    if (!p.grid) return p;
    const PeriodicGrid& g = *p.grid;
    d.derived.emplace_back("grid.spacing", fmt(g.spacing()));
    d.derived.emplace_back("epsilon.min", fmt(MollifierKernel::min_epsilon(g)));
    d.derived.emplace_back("epsilon.max", fmt(MollifierKernel::kMaxEpsilon));
    check(d, "synth", [&] { p.u0 = synthesize(c.synth, g); });
    if (p.u0) d.derived.emplace_back("synth.max_speed", fmt(max_norm(*p.u0)));

    if (is_scaling(c.experiment)) {
        const auto eps = c.explicit_epsilons ? c.epsilons : default_sweep(g);
        check(d, "sweep.epsilons", [&] { validate_dyadic_epsilons(g, eps); });
        if (c.samples < 1) d.errors.push_back("sweep.samples: must be >= 1");
        if (c.experiment == "cet_scaling" && c.synth.kind != SynthKind::lacunary &&
            c.synth.kind != SynthKind::random_divfree && c.samples > 1) {
            d.errors.push_back("sweep.samples: ensembles need a seeded synth kind (lacunary or random_divfree)");
        }
    }
    if (c.p_int < 1.0) d.errors.push_back("p_int: must be >= 1");
    if (c.has_solver && c.dims != 2) d.errors.push_back("grid.dims: the solver supports dims == 2 only");
    if (!p.u0) return p;

    if (c.experiment == "energy_conservation" || c.experiment == "weak_residual") {
        check_cfl_bound(d, "solver", *p.u0, c.solver);
    }
    if (c.experiment == "weak_residual") {
        if (c.test_functions < 1 || c.test_functions > 15) d.errors.push_back("weak.test_functions: must lie in [1, 15]");
        if (c.support_end && !(*c.support_end > 0.0)) d.errors.push_back("weak.support_end: must be positive");
    }
    if (is_pipeline(c.experiment) && c.dims == 2) {
        std::optional<PeriodicGrid> ga, gb;
        check(d, "runs.a.n", [&] { ga = make_grid(2, c.run_a.grid_n); });
        check(d, "runs.b.n", [&] { gb = make_grid(2, c.run_b.grid_n); });
        if (ga) check_cfl_bound(d, "runs.a", initial_on_grid(*p.u0, ga->n_per_axis()), c.run_a.solver);
        if (gb) check_cfl_bound(d, "runs.b", initial_on_grid(*p.u0, gb->n_per_axis()), c.run_b.solver);
        if (ga && gb) {
            const PeriodicGrid gc = ga->n_per_axis() <= gb->n_per_axis() ? *ga : *gb;
            d.derived.emplace_back("comparison.n", std::to_string(gc.n_per_axis()));
            d.derived.emplace_back("comparison.epsilon_min", fmt(MollifierKernel::min_epsilon(gc)));
            if (c.certificate.working_epsilon) {
                check(d, "certificate.working_epsilon", [&] { make_kernel(gc, *c.certificate.working_epsilon); });
            }
            for (double e : c.certificate.epsilons) check(d, "certificate.epsilons", [&] { make_kernel(gc, e); });
        }
        if (c.experiment == "inhom_uniqueness") {
            const ScalarField rho = make_scalar(c.density, g);
            double lo = INFINITY;
            for (double v : rho.values()) lo = std::min(lo, v);
            d.derived.emplace_back("density.min", fmt(lo));
            if (!(lo > 0.0)) d.errors.push_back("density: must be strictly positive (minimum " + fmt(lo) + ")");
        }
    }
    if (c.certificate.certify_tolerance && !(*c.certificate.certify_tolerance > 0.0)) {
        d.errors.push_back("certificate.tolerance: must be positive");
    }
    return p;
}

// ---------------------------------------------------------------- serialization

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json to_json(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(finite_or_null(x));
    return a;
}

Json to_json(const HypothesisCheck& h) {
    return Json{{"fitted_alpha", opt(h.fitted_alpha)}, {"required_alpha", h.required_alpha}, {"met", h.met}};
}

Json to_json(const GronwallCertificate& c) {
    return Json{{"tau1", c.tau1},       {"tau2", c.tau2},
                {"lhs", c.lhs},         {"bound", c.bound},
                {"slack", c.slack},     {"commutator_budget", c.commutator_budget},
                {"tolerance", c.tolerance}, {"pass", c.pass}};
}

Json to_json(const UniquenessReport& r) {
    return Json{{"path", to_string(r.path)},
                {"comparison_n", r.comparison_n},
                {"series", {{"t", to_json(r.energy.times)},
                            {"E", to_json(r.energy.values)},
                            {"C", to_json(r.lipschitz.c_values)},
                            {"alpha", to_json(r.slice_alpha)}}},
                {"budgets", {{"epsilon", to_json(r.budget_epsilons)}, {"value", to_json(r.budget_values)}}},
                {"working_epsilon", r.working_epsilon},
                {"working_budget", r.working_budget},
                {"c_fit", r.c_fit},
                {"alpha_used", r.alpha_used},
                {"energy_drift", {r.energy_drift_a, r.energy_drift_b}},
                {"certificate", to_json(r.certificate)},
                {"hypothesis", to_json(r.hypothesis)},
                {"verdict", to_string(r.verdict)}};
}

Json to_json(const ContractionReport& r) {
    Json first = nullptr;
    if (r.first_violation) first = Json::array({r.first_violation->first, r.first_violation->second});
    return Json{{"epsilon", r.epsilon},
                {"tolerance", r.tolerance},
                {"series", {{"t", to_json(r.times)},
                            {"difference", to_json(r.differences)},
                            {"budget_rate", to_json(r.budget_rate)},
                            {"cumulative_budget", to_json(r.cumulative_budget)}}},
                {"worst_slack", r.worst_slack},
                {"worst_pair", {r.worst_index1, r.worst_index2}},
                {"first_violation", first},
                {"pass", r.pass}};
}

Json to_json(const ScalingReport& r) {
    return Json{{"quantity", to_string(r.quantity)},
                {"alpha", r.alpha},
                {"p", r.p_int},
                {"epsilons", to_json(r.epsilons)},
                {"magnitudes", to_json(r.magnitudes)},
                {"fitted_slope", opt(r.fitted_slope)},
                {"theory_slope", r.theory_slope},
                {"slope_tolerance", r.slope_tolerance},
                {"fitted_alpha", r.fitted_alpha},
                {"seminorm", r.seminorm},
                {"constants", to_json(r.constants)},
                {"constant_spread", r.constant_spread},
                {"samples", r.samples},
                {"vacuous", r.vacuous},
                {"pass", r.pass}};
}

class Csv {
public:
    explicit Csv(const std::vector<std::string>& header) {
        for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
        out_ << "\n";
        out_ << std::setprecision(17);
    }
    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << values[i];
        out_ << "\n";
    }
    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
};

struct Artifacts {
    Json report;
    std::vector<std::pair<std::string, std::string>> csv;  // file name, content
    std::vector<std::pair<std::string, std::vector<ScalarField>>> snapshots;
    int exit_code = 0;
    std::string summary;
};

std::vector<ScalarField> components(const VelocityField& u) { return u.components(); }

// ---------------------------------------------------------------- experiments

Artifacts run_besov(const Parsed& c, const VelocityField& u) {
    Artifacts a;
    const double fitted = fit_regularity_exponent(u, c.p_int);
    const double alpha = std::clamp(c.alpha.value_or(fitted), 1e-6, 1.0 - 1e-6);
    const BesovEstimate est = besov_seminorm(u, alpha, c.p_int);
    Json table = Json::array();
    for (const auto& s : est.shift_table) table.push_back({s.magnitude, s.lp_diff_norm});
    a.report = Json{{"alpha", alpha},
                    {"p_int", c.p_int},
                    {"seminorm", est.seminorm},
                    {"fitted_alpha", fitted},
                    {"target_alpha", opt(c.synth.alpha)},
                    {"shift_table", table}};
    a.csv.emplace_back("shift_table.csv", shift_table_csv(est));
    a.snapshots.emplace_back("field.eulb", components(u));
    std::ostringstream s;
    s << "besov_fit: fitted alpha " << fitted << ", seminorm " << est.seminorm;
    a.summary = s.str();
    return a;
}

Artifacts run_scaling(const Parsed& c, const PeriodicGrid& g, const VelocityField& u) {
    Artifacts a;
    const bool cet = c.experiment == "cet_scaling";
    const auto eps = c.explicit_epsilons ? c.epsilons : default_sweep(g);
    std::vector<std::vector<VelocityField>> samples;
    for (int s = 0; s < c.samples; ++s) {
        SynthSpec su = c.synth;
        su.seed = c.seed + static_cast<std::uint64_t>(s);
        const VelocityField us = s == 0 ? u : synthesize(su, g);
        if (cet) {
            SynthSpec sv = su;
            sv.seed = su.seed + 1000;
            samples.push_back({us, synthesize(sv, g)});
        } else {
            samples.push_back({us});
        }
    }
    ScalingOptions opt;
    opt.p_int = c.p_int;
    opt.slope_tolerance = c.slope_tolerance;
    opt.alpha = c.alpha;
    const ScalingReport r = ensemble_scaling_experiment(
        samples, cet ? ScalingQuantity::cet_trilinear : ScalingQuantity::convective_commutator_lp, eps, opt);
    a.report = to_json(r);
    Csv csv({"epsilon", "magnitude", "constant"});
    for (std::size_t i = 0; i < r.epsilons.size(); ++i) csv.row({r.epsilons[i], r.magnitudes[i], r.constants[i]});
    a.csv.emplace_back("scaling.csv", csv.str());
    a.snapshots.emplace_back("field.eulb", components(u));
    a.exit_code = r.pass ? 0 : 2;
    std::ostringstream s;
    s << c.experiment << ": slope ";
    if (r.fitted_slope) {
        s << *r.fitted_slope;
    } else {
        s << "n/a";
    }
    s << " vs theory " << r.theory_slope << (r.vacuous ? " (vacuous)" : "") << " -> " << (r.pass ? "pass" : "fail");
    a.summary = s.str();
    return a;
}

Artifacts run_energy(const Parsed& c, const VelocityField& u0) {
    Artifacts a;
    const Trajectory t = solve(u0, c.solver);
    const AdmissibilityReport adm = admissibility_check(t, c.admissibility_tolerance);
    const double e0 = t.energy_ledger.front();
    const double rel = e0 > 0.0 ? t.max_energy_drift / e0 : t.max_energy_drift;
    const bool drift_ok = !c.max_relative_drift || rel <= *c.max_relative_drift;
    a.report = Json{{"dt", c.solver.dt},
                    {"T", c.solver.T},
                    {"steps", step_count(c.solver.T, c.solver.dt)},
                    {"energy_initial", e0},
                    {"energy_final", t.energy_ledger.back()},
                    {"max_energy_drift", t.max_energy_drift},
                    {"relative_drift", rel},
                    {"max_relative_drift", opt(c.max_relative_drift)},
                    {"admissibility",
                     {{"tolerance", c.admissibility_tolerance},
                      {"max_violation", adm.max_violation},
                      {"first_violation", adm.first_violation ? Json(*adm.first_violation) : Json(nullptr)},
                      {"pass", adm.pass}}},
                    {"pass", adm.pass && drift_ok}};
    Csv csv({"t", "energy", "enstrophy"});
    for (std::size_t i = 0; i < t.states.size(); ++i) {
        csv.row({t.states[i].time, t.energy_ledger[i], t.enstrophy_ledger[i]});
    }
    a.csv.emplace_back("ledger.csv", csv.str());
    auto with_pressure = [](const SolverState& s) {
        auto f = components(s.velocity);
        f.push_back(s.pressure);
        return f;
    };
    a.snapshots.emplace_back("initial.eulb", with_pressure(t.states.front()));
    a.snapshots.emplace_back("final.eulb", with_pressure(t.states.back()));
    a.exit_code = adm.pass && drift_ok ? 0 : 2;
    std::ostringstream s;
    s << "energy_conservation: relative drift " << rel << ", admissibility " << (adm.pass ? "pass" : "fail");
    a.summary = s.str();
    return a;
}

Artifacts run_weak(const Parsed& c, const PeriodicGrid& g, const VelocityField& u0) {
    Artifacts a;
    const Trajectory t = solve(u0, c.solver);
    const double support = c.support_end.value_or(0.5 * c.solver.T);
    const auto vt = low_mode_vector_tests(g, c.test_functions, support);
    const auto st = low_mode_scalar_tests(g, c.test_functions, support);
    std::vector<double> rv(vt.size()), rs(st.size());
    parallel_for(vt.size(), [&](std::size_t i) { rv[i] = weak_residual(t, vt[i]); });
    parallel_for(st.size(), [&](std::size_t i) { rs[i] = weak_residual(t, st[i]); });
    const double mv = *std::max_element(rv.begin(), rv.end());
    const double ms = *std::max_element(rs.begin(), rs.end());
    const bool pass = mv <= c.vector_tolerance && ms <= c.scalar_tolerance;
    a.report = Json{{"support_end", support},
                    {"momentum_residuals", to_json(rv)},
                    {"incompressibility_residuals", to_json(rs)},
                    {"max_momentum_residual", mv},
                    {"max_incompressibility_residual", ms},
                    {"momentum_tolerance", c.vector_tolerance},
                    {"incompressibility_tolerance", c.scalar_tolerance},
                    {"pass", pass}};
    Csv csv({"index", "momentum_residual", "incompressibility_residual"});
    for (std::size_t i = 0; i < rv.size(); ++i) csv.row({static_cast<double>(i), rv[i], rs[i]});
    a.csv.emplace_back("residuals.csv", csv.str());
    a.snapshots.emplace_back("initial.eulb", components(u0));
    a.exit_code = pass ? 0 : 2;
    std::ostringstream s;
    s << "weak_residual: max momentum " << mv << ", max incompressibility " << ms << " -> " << (pass ? "pass" : "fail");
    a.summary = s.str();
    return a;
}

std::string verdict_line(const std::string& name, Verdict v) { return name + ": verdict " + to_string(v); }

Artifacts run_uniqueness(const Parsed& c, const VelocityField& u0) {
    Artifacts a;
    const UniquenessReport r = uniqueness_experiment(u0, c.run_a, c.run_b, c.certificate);
    a.report = to_json(r);
    Csv csv({"t", "E", "C", "alpha"});
    for (std::size_t i = 0; i < r.energy.times.size(); ++i) {
        csv.row({r.energy.times[i], r.energy.values[i], r.lipschitz.c_values[i], r.slice_alpha[i]});
    }
    a.csv.emplace_back("series.csv", csv.str());
    Csv b({"epsilon", "budget"});
    for (std::size_t i = 0; i < r.budget_epsilons.size(); ++i) b.row({r.budget_epsilons[i], r.budget_values[i]});
    a.csv.emplace_back("budgets.csv", b.str());
    a.snapshots.emplace_back("initial.eulb", components(u0));
    a.exit_code = exit_code(r.verdict);
    a.summary = verdict_line("uniqueness", r.verdict);
    return a;
}

std::string contraction_csv(const ContractionReport& r) {
    Csv csv({"t", "difference", "budget_rate", "cumulative_budget"});
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        csv.row({r.times[i], r.differences[i], r.budget_rate[i], r.cumulative_budget[i]});
    }
    return csv.str();
}

Artifacts run_inhom(const Parsed& c, const PeriodicGrid& g, const VelocityField& u0) {
    Artifacts a;
    InhomUniquenessOptions opt;
    opt.p_int = c.certificate.p_int;
    opt.tolerance = c.certificate.certify_tolerance;
    opt.epsilon = c.certificate.working_epsilon;
    opt.pressure = c.pressure;
    const ScalarField rho0 = make_scalar(c.density, g);
    const InhomUniquenessReport r = inhom_uniqueness_experiment(rho0, u0, c.run_a, c.run_b, opt);
    a.report = Json{{"contraction", to_json(r.contraction)},
                    {"weighted_energy", to_json(r.weighted_energy)},
                    {"mass_drift", {r.mass_drift_a, r.mass_drift_b}},
                    {"hypothesis", to_json(r.hypothesis)},
                    {"verdict", to_string(r.verdict)}};
    a.csv.emplace_back("density_series.csv", contraction_csv(r.contraction));
    auto init = components(u0);
    init.push_back(rho0);
    a.snapshots.emplace_back("initial.eulb", init);
    a.exit_code = exit_code(r.verdict);
    a.summary = verdict_line("inhom_uniqueness", r.verdict);
    return a;
}

Artifacts run_boussinesq(const Parsed& c, const PeriodicGrid& g, const VelocityField& u0) {
    Artifacts a;
    const ScalarField theta0 = make_scalar(c.theta, g);
    const BoussinesqUniquenessReport r =
        boussinesq_uniqueness_experiment(theta0, u0, c.gravity, c.run_a, c.run_b, c.certificate);
    a.report = Json{{"gravity", {c.gravity[0], c.gravity[1]}},
                    {"velocity", to_json(r.velocity)},
                    {"theta", to_json(r.theta)},
                    {"hypothesis", to_json(r.hypothesis)},
                    {"verdict", to_string(r.verdict)}};
    Csv csv({"t", "E", "C"});
    for (std::size_t i = 0; i < r.velocity.energy.times.size(); ++i) {
        csv.row({r.velocity.energy.times[i], r.velocity.energy.values[i], r.velocity.lipschitz.c_values[i]});
    }
    a.csv.emplace_back("series.csv", csv.str());
    a.csv.emplace_back("theta_series.csv", contraction_csv(r.theta));
    auto init = components(u0);
    init.push_back(theta0);
    a.snapshots.emplace_back("initial.eulb", init);
    a.exit_code = exit_code(r.verdict);
    a.summary = verdict_line("boussinesq_uniqueness", r.verdict);
    return a;
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

Json effective_config(const Json& config, const RunOptions& options) {
    Json c = config;
    if (options.seed_override) c["seed"] = *options.seed_override;
    c.erase("output_dir");
    return c;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"besov_fit",          "commutator_scaling", "cet_scaling",
                                                "energy_conservation", "uniqueness",         "inhom_uniqueness",
                                                "boussinesq_uniqueness", "weak_residual"};
    return names;
}

Json load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
    }
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash(const Json& config, const RunOptions& options) {
    std::ostringstream o;
    o << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(effective_config(config, options).dump());
    return o.str();
}

Diagnostics validate_config(const Json& config, const RunOptions& options) {
    Diagnostics d;
    prepare(config, options, d);
    return d;
}

Outcome run_config(const Json& config, const RunOptions& options) {
    Outcome out;
    if (options.jobs > 0) set_max_jobs(options.jobs);
    Diagnostics d;
    Prepared p = prepare(config, options, d);
    if (!d.ok()) {
        out.summary = "invalid config: " + d.errors.front();
        return out;
    }
    const Parsed& c = p.cfg;
    const std::string hash = config_hash(config, options);
    if (options.output_dir) {
        out.output_dir = *options.output_dir;
    } else if (c.output_dir) {
        out.output_dir = *c.output_dir;
    } else {
        const char* root = std::getenv("EULERLAB_OUTPUT_ROOT");
        out.output_dir = fs::path(root && *root ? root : "eulerlab_runs") / (c.experiment + "-" + hash);
    }

    const std::string started = utc_now();
    const auto t0 = std::chrono::steady_clock::now();
    Artifacts a;
    try {
        const PeriodicGrid& g = *p.grid;
        const VelocityField& u0 = *p.u0;
        if (c.experiment == "besov_fit") {
            a = run_besov(c, u0);
        } else if (is_scaling(c.experiment)) {
            a = run_scaling(c, g, u0);
        } else if (c.experiment == "energy_conservation") {
            a = run_energy(c, u0);
        } else if (c.experiment == "weak_residual") {
            a = run_weak(c, g, u0);
        } else if (c.experiment == "uniqueness") {
            a = run_uniqueness(c, u0);
        } else if (c.experiment == "inhom_uniqueness") {
            a = run_inhom(c, g, u0);
        } else {
            a = run_boussinesq(c, g, u0);
        }
    } catch (const std::exception& e) {
        out.summary = std::string("error: ") + e.what();
        return out;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    Json report{{"experiment", c.experiment},
                {"seed", c.seed},
                {"config_hash", hash},
                {"grid", {{"dims", c.dims}, {"n", c.n}}},
                {"synth", to_string(c.synth.kind)},
                {"result", a.report},
                {"exit_code", a.exit_code}};
    try {
        fs::create_directories(out.output_dir);
        Json artifacts = Json::array();
        write_text(out.output_dir / "report.json", report.dump(2) + "\n");
        artifacts.push_back("report.json");
        for (const auto& [name, text] : a.csv) {
            write_text(out.output_dir / name, text);
            artifacts.push_back(name);
        }
        for (const auto& [name, fields] : a.snapshots) {
            write_snapshot(out.output_dir / name, fields);
            artifacts.push_back(name);
        }
        artifacts.push_back("metadata.json");
        const Json metadata{{"tool", "eulerlab"},
                            {"version", kToolVersion},
                            {"rng", std::string(CounterRng::kName) + " v" + std::to_string(CounterRng::kVersion)},
                            {"started_utc", started},
                            {"finished_utc", utc_now()},
                            {"wall_seconds", wall},
                            {"jobs", max_jobs()}};
        write_text(out.output_dir / "metadata.json", metadata.dump(2) + "\n");
        const Json manifest{{"config_hash", hash},
                            {"experiment", c.experiment},
                            {"config", effective_config(config, options)},
                            {"artifacts", artifacts}};
        write_text(out.output_dir / "manifest.json", manifest.dump(2) + "\n");
    } catch (const std::exception& e) {
        out.summary = std::string("error: ") + e.what();
        return out;
    }
    out.exit_code = a.exit_code;
    out.summary = a.summary;
    return out;
}

}  // namespace eulerlab::cli
