// entrain: contraction certificates, entrained orbits and approximation
// bounds for periodically forced systems.
//
// Exit codes: 0 success, 2 input error, 3 model/certification error,
// 4 bound violation.

#include "entrain/bounds.hpp"
#include "entrain/io.hpp"
#include "entrain/models.hpp"
#include "entrain/norms.hpp"
#include "entrain/presets.hpp"
#include "entrain/sim.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace entrain;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitModel = 3;
constexpr int kExitViolation = 4;

// ---------------------------------------------------------------------------
// Model selection
// ---------------------------------------------------------------------------

struct ModelFlags {
    std::string model = "rfm2";
    double lam0 = 4.0;
    double lam1 = 0.5;
    double lam2 = 4.0;
    double period = 2.0;
    int n = 2;
    std::vector<double> rates;
    double amp = 1.0;
    double a = 1.0;
    double omega = 1.0;
    double c = 0.0;
    double delta = 1.0;
    double k1 = 1.0;
    double k2 = 5.0;
    double eT = 2.0;
    double u0 = 0.0;
    std::string lti;
};

// Flags each model accepts; anything else given on the command line is an error.
const std::map<std::string, std::set<std::string>>& model_flags() {
    static const std::map<std::string, std::set<std::string>> flags = {
        {"ex33", {"--period"}},
        {"rfm2", {"--lam0", "--lam1", "--lam2", "--period"}},
        {"rfm", {"--n", "--rates", "--amp", "--period"}},
        {"transmod", {"--delta", "--k1", "--k2", "--eT", "--omega", "--u0", "--amp"}},
        {"ex52", {"--a", "--omega", "--c"}},
        {"lti", {"--lti"}},
    };
    return flags;
}

const std::vector<std::string>& all_model_flags() {
    static const std::vector<std::string> names = {"--lam0", "--lam1", "--lam2", "--period", "--n",
                                                   "--rates", "--amp", "--a", "--omega", "--c",
                                                   "--delta", "--k1", "--k2", "--eT", "--u0", "--lti"};
    return names;
}

void add_model_options(CLI::App* cmd, ModelFlags& f) {
    cmd->add_option("--model", f.model, "ex33 | rfm2 | rfm | transmod | ex52 | lti")
        ->check(CLI::IsMember({"ex33", "rfm2", "rfm", "transmod", "ex52", "lti"}))
        ->capture_default_str();
    cmd->add_option("--lam0", f.lam0, "rfm2: mean initiation rate")->capture_default_str();
    cmd->add_option("--lam1", f.lam1, "rfm2: site 1 exit rate")->capture_default_str();
    cmd->add_option("--lam2", f.lam2, "rfm2: exit rate")->capture_default_str();
    cmd->add_option("--period", f.period, "ex33 / rfm2 / rfm: forcing period (ex33 default 2 pi)")
        ->capture_default_str();
    cmd->add_option("--n", f.n, "rfm: number of sites")->capture_default_str();
    cmd->add_option("--rates", f.rates, "rfm: lambda_0..lambda_n (default 4,1,...,1)")->delimiter(',');
    cmd->add_option("--amp", f.amp, "rfm / transmod: forcing amplitude")->capture_default_str();
    cmd->add_option("--a", f.a, "ex52: forcing amplitude")->capture_default_str();
    cmd->add_option("--omega", f.omega, "transmod / ex52: forcing frequency")->capture_default_str();
    cmd->add_option("--c", f.c, "ex52: scaling D = diag(1, c) (default 1e4 a)");
    cmd->add_option("--delta", f.delta, "transmod: degradation rate")->capture_default_str();
    cmd->add_option("--k1", f.k1, "transmod: unbinding rate")->capture_default_str();
    cmd->add_option("--k2", f.k2, "transmod: binding rate")->capture_default_str();
    cmd->add_option("--eT", f.eT, "transmod: total promoter")->capture_default_str();
    cmd->add_option("--u0", f.u0, "transmod: input offset")->capture_default_str();
    cmd->add_option("--lti", f.lti, "lti: JSON file with A, B, offset and input");
}

void reject_foreign_flags(const CLI::App* cmd, const ModelFlags& f, const std::set<std::string>& allowed_extra = {}) {
    const auto& allowed = model_flags().at(f.model);
    for (const auto& name : all_model_flags()) {
        if (cmd->count(name) > 0 && !allowed.count(name) && !allowed_extra.count(name)) {
            throw InputError("flag " + name + " does not apply to model " + f.model);
        }
    }
    if (f.model == "lti" && f.lti.empty()) throw InputError("model lti needs --lti FILE");
}

Setup build_setup(const CLI::App* cmd, const ModelFlags& f, int steps) {
    if (f.model == "ex33") {
        return setup_ex33(cmd->count("--period") ? f.period : kTwoPi);
    }
    if (f.model == "rfm2") {
        return setup_rfm2({f.lam0, f.lam1, f.lam2, f.period});
    }
    if (f.model == "transmod") {
        return setup_transmod({f.delta, f.k1, f.k2, f.eT}, PeriodicInput::cosine(f.u0, f.amp, f.omega), steps);
    }
    if (f.model == "ex52") {
        return setup_ex52(f.a, f.omega, cmd->count("--c") ? f.c : ex52_default_c(f.a));
    }
    if (f.model == "lti") {
        const LtiSpec spec = lti_from_json(parse_json_text(read_text_file(f.lti), f.lti));
        return setup_lti(spec.system, spec.input);
    }
    throw InputError("model " + f.model + " has no certified setup");
}

std::vector<double> rfm_rates(const ModelFlags& f) {
    if (f.n < 1) throw InputError("--n must be at least 1");
    if (f.rates.empty()) {
        std::vector<double> rates(static_cast<std::size_t>(f.n) + 1, 1.0);
        rates[0] = 4.0;
        return rates;
    }
    if (f.rates.size() != static_cast<std::size_t>(f.n) + 1) {
        throw InputError("--rates needs n + 1 = " + std::to_string(f.n + 1) + " values");
    }
    return f.rates;
}

// ---------------------------------------------------------------------------
// Output helpers
// ---------------------------------------------------------------------------

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path, std::ios::binary);
            if (!file_) throw InputError("cannot write '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
    // Human-readable notes go to stderr when data goes to stdout.
    std::ostream& notes() { return file_.is_open() ? std::cout : std::cerr; }

private:
    std::ofstream file_;
};

std::string certificate_text(const ContractionCertificate& cert) {
    std::string s = (cert.kind == CertificateKind::Analytic ? "analytic" : "sampled");
    s += " eta=" + format_number(cert.eta) + " norm=" + cert.norm.describe();
    if (cert.kind == CertificateKind::Sampled) s += " grid=" + std::to_string(cert.grid_per_axis);
    return s;
}

std::vector<double> parse_omega_grid(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    auto num = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            const double x = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return x;
        } catch (const std::exception&) {
            throw InputError("--omega: cannot parse '" + s + "'");
        }
    };
    if (parts.size() == 1) return {num(parts[0])};
    if (parts.size() != 4) throw InputError("--omega expects lo:hi:log:k, lo:hi:lin:k or a single value");
    const double lo = num(parts[0]);
    const double hi = num(parts[1]);
    const double k = num(parts[3]);
    if (k < 1 || k != std::floor(k)) throw InputError("--omega: count must be a positive integer");
    const int count = static_cast<int>(k);
    if (parts[2] == "log") return log_grid(lo, hi, count);
    if (parts[2] == "lin") {
        if (!(lo > 0.0 && hi >= lo)) throw InputError("--omega: need 0 < lo <= hi");
        std::vector<double> out(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
        return out;
    }
    throw InputError("--omega: spacing must be log or lin");
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct MeasureArgs {
    std::string matrix;
    std::string norm = "l1";
    std::vector<double> diag;
};

int run_measure(const MeasureArgs& args) {
    const Matrix a = matrix_from_json(parse_json_text(read_text_file(args.matrix), args.matrix), args.matrix);
    std::vector<NormKind> kinds;
    if (args.norm == "all") {
        kinds = {NormKind::L1, NormKind::L2, NormKind::Linf};
    } else {
        kinds = {parse_norm_kind(args.norm)};
    }
    for (NormKind kind : kinds) {
        NormSpec spec(kind);
        if (!args.diag.empty()) {
            spec = NormSpec::diagonal(kind, Eigen::Map<const Vector>(args.diag.data(), static_cast<Eigen::Index>(args.diag.size())));
        }
        const double mu = matrix_measure(spec, a);
        if (kinds.size() == 1) {
            std::cout << format_number(mu) << '\n';
        } else {
            std::cout << spec.describe() << ' ' << format_number(mu) << '\n';
        }
    }
    return kExitOk;
}

struct RunArgs {
    int steps = kDefaultStepsPerPeriod;
    double tol = kDefaultOrbitTolerance;
    std::string out;
    std::string format = "csv";
    std::string approx = "averaged";
    std::string omega_grid;
    double slack = 1e-4;
};

int run_orbit(const CLI::App* cmd, const ModelFlags& f, const RunArgs& args) {
    reject_foreign_flags(cmd, f);
    OrbitOptions opts;
    opts.steps_per_period = args.steps;
    Meta meta;
    PeriodicOrbit orbit;
    if (f.model == "rfm") {
        const std::vector<double> rates = rfm_rates(f);
        const DynSystem sys = model_rfm(rates, PeriodicInput::sine(rates[0], f.amp, kTwoPi / f.period));
        std::string cert_line;
        if (sys.analytic_certificate) {
            orbit = periodic_orbit(sys, *sys.analytic_certificate, Vector::Constant(sys.dim, 0.5), args.tol, opts);
            cert_line = certificate_text(*sys.analytic_certificate);
        } else {
            orbit = periodic_orbit_uncertified(sys, Vector::Constant(sys.dim, 0.5), NormSpec(NormKind::L1), args.tol,
                                               100000, opts);
            cert_line = sys.uncertifiable_reason.empty() ? "uncertified" : sys.uncertifiable_reason;
        }
        meta.add("model", sys.name).add_params(sys.params).add("certificate", cert_line);
    } else {
        const Setup s = build_setup(cmd, f, args.steps);
        orbit = periodic_orbit(s.sys, s.cert, s.x0, args.tol, opts);
        meta.add("model", s.sys.name).add_params(s.sys.params).add("certificate", certificate_text(s.cert));
        if (!s.note.empty()) meta.add("note", s.note);
    }
    meta.add("N", static_cast<double>(orbit.size())).add("tol", args.tol).add("closure_defect", orbit.closure_defect());
    Output out(args.out);
    write_orbit_csv(out.stream(), orbit, meta);
    return kExitOk;
}

int run_bound(const CLI::App* cmd, const ModelFlags& f, const RunArgs& args) {
    reject_foreign_flags(cmd, f);
    if (f.model == "rfm") throw CertificationError("rfm: bounds need a certified model; use rfm2 or --n 2 via rfm2");
    const Setup s = build_setup(cmd, f, args.steps);
    OrbitOptions opts;
    opts.steps_per_period = args.steps;
    const PeriodicOrbit gamma = periodic_orbit(s.sys, s.cert, s.x0, args.tol, opts);
    BoundOptions bopts;
    bopts.validity_slack = args.slack;
    BoundReport report;
    if (args.approx == "averaged") {
        if (!s.z) throw InputError(f.model + ": no constant-input approximant");
        report = averaged_input_bound(s.sys, gamma, *s.z, s.cert.eta, s.cert.norm, bopts);
    } else {
        report = linearized_bound(s.sys, gamma, *s.lti, *s.lti_input, s.cert.eta, s.cert.norm, bopts);
    }
    Meta meta = report_meta(report);
    meta.add("certificate", certificate_text(s.cert));
    if (!s.note.empty()) meta.add("note", s.note);
    Output out(args.out);
    if (args.format == "json") {
        Json j = report_json(report);
        j["certificate"] = certificate_text(s.cert);
        if (!s.note.empty()) j["note"] = s.note;
        out.stream() << dump_json(j);
    } else {
        write_report_csv(out.stream(), report, meta);
    }
    auto& notes = out.notes();
    notes << "eta " << format_number(report.eta) << " (" << report.norm << ")\n";
    notes << "constant_bound " << format_number(report.constant_bound) << '\n';
    if (report.box_program) {
        notes << "box_program_bound " << format_number(report.box_program->value)
              << (report.box_program->exact ? "" : " (heuristic)") << '\n';
    }
    notes << "max measured " << format_number(report.max_measured()) << ", max curve "
          << format_number(report.max_curve()) << ", max ratio " << format_number(report.max_ratio) << '\n';
    if (const auto bad = report.first_violation()) {
        std::cerr << "error: bound violated at tau = " << format_number(report.tau[*bad]) << " (measured "
                  << format_number(report.measured[*bad]) << " > bound " << format_number(report.curve[*bad]) << ")\n";
        return kExitViolation;
    }
    return kExitOk;
}

SweepFactory sweep_factory(const CLI::App* cmd, const ModelFlags& f, int steps) {
    if (f.model == "ex52") {
        std::optional<double> c;
        if (cmd->count("--c")) c = f.c;
        return ex52_sweep_factory(f.a, c);
    }
    if (f.model == "transmod") {
        return transmod_sweep_factory({f.delta, f.k1, f.k2, f.eT}, f.u0, f.amp, steps);
    }
    throw InputError("sweep supports models ex52 and transmod");
}

int write_sweep(const std::vector<SweepRow>& rows, const Meta& meta, const std::string& path, std::ostream* notes) {
    std::size_t ok = 0;
    for (const auto& r : rows) {
        if (r.ok) {
            ++ok;
        } else {
            std::cerr << "warning: omega = " << format_number(r.omega) << ": " << r.message << '\n';
        }
    }
    Output out(path);
    write_sweep_csv(out.stream(), rows, meta);
    std::ostream& n = notes ? *notes : out.notes();
    if (!rows.empty()) {
        const double hi = rows.back().omega;
        const double lo = std::max(rows.front().omega, hi / 10.0);
        n << "slope " << format_number(loglog_slope(rows, lo, hi)) << " over omega in [" << format_number(lo) << ", "
          << format_number(hi) << "]\n";
    }
    return 10 * ok >= 9 * rows.size() ? kExitOk : kExitModel;
}

int run_sweep(const CLI::App* cmd, const ModelFlags& f, const RunArgs& args) {
    if (f.model != "ex52" && f.model != "transmod") throw InputError("sweep supports models ex52 and transmod");
    // --omega here is the sweep grid, not a model parameter.
    reject_foreign_flags(cmd, f, {"--omega"});
    if (args.omega_grid.empty()) throw InputError("sweep needs --omega lo:hi:log:k");
    const std::vector<double> omegas = parse_omega_grid(args.omega_grid);
    SweepOptions opts;
    opts.orbit.steps_per_period = args.steps;
    opts.tol = args.tol;
    const std::vector<SweepRow> rows = lowpass_sweep(sweep_factory(cmd, f, args.steps), omegas, opts);
    Meta meta;
    meta.add("model", f.model).add("omega", args.omega_grid).add("N", static_cast<double>(args.steps)).add("tol", args.tol);
    if (f.model == "ex52") {
        meta.add("a", f.a).add("c", cmd->count("--c") ? format_number(f.c) : "1e4*a");
    } else {
        meta.add("params", "delta=" + format_number(f.delta) + ";k1=" + format_number(f.k1) + ";k2=" + format_number(f.k2) +
                               ";eT=" + format_number(f.eT) + ";u0=" + format_number(f.u0) + ";amp=" + format_number(f.amp));
    }
    return write_sweep(rows, meta, args.out, nullptr);
}

// ---------------------------------------------------------------------------
// Figures
// ---------------------------------------------------------------------------

struct FigureArgs {
    std::string name;
    std::string dir = ".";
};

std::string figure_path(const FigureArgs& args, const std::string& file) {
    std::filesystem::create_directories(args.dir);
    return (std::filesystem::path(args.dir) / file).string();
}

int figure_fig2(const FigureArgs& args) {
    const Setup s = setup_rfm2();
    const double horizon = 6.0;
    const TransientBound bound = averaged_transient_bound(s.sys, *s.z, s.cert.eta, s.cert.norm, horizon);
    const Trajectory traj = integrate(s.sys, s.x0, 0.0, horizon);
    Meta meta;
    meta.add("figure", "fig2").add("model", s.sys.name).add_params(s.sys.params).add("eta", s.cert.eta);
    meta.add("norm", s.cert.norm.describe()).add("N", static_cast<double>(kDefaultStepsPerPeriod));
    Output out(figure_path(args, "fig2.csv"));
    auto& os = out.stream();
    os << meta.line() << "\nt,error,bound\n";
    const std::size_t n = std::min(bound.times.size(), traj.states.size());
    for (std::size_t k = 0; k < n; ++k) {
        os << format_number(bound.times[k]) << ',' << format_number(vector_norm(s.cert.norm, traj.states[k] - *s.z))
           << ',' << format_number(bound.bound[k]) << '\n';
    }
    return kExitOk;
}

int figure_bound(const FigureArgs& args, const std::string& name, bool linearized) {
    const Setup s = setup_rfm2();
    const PeriodicOrbit gamma = periodic_orbit(s.sys, s.cert, s.x0);
    const BoundReport report = linearized
                                   ? linearized_bound(s.sys, gamma, *s.lti, *s.lti_input, s.cert.eta, s.cert.norm)
                                   : averaged_input_bound(s.sys, gamma, *s.z, s.cert.eta, s.cert.norm);
    Meta meta = report_meta(report);
    Output out(figure_path(args, name + ".csv"));
    auto& os = out.stream();
    os << "# meta figure=" << name << ' ' << meta.line().substr(7) << '\n';
    os << "t,measured,bound_curve,constant_bound" << (linearized ? ",box_program_bound" : "") << '\n';
    for (std::size_t k = 0; k < report.grid; ++k) {
        os << format_number(report.tau[k]) << ',' << format_number(report.measured[k]) << ','
           << format_number(report.curve[k]) << ',' << format_number(report.constant_bound);
        if (linearized) os << ',' << format_number(report.box_program->value);
        os << '\n';
    }
    return report.valid() ? kExitOk : kExitViolation;
}

int figure_fig6(const FigureArgs& args) {
    const double a = 1.0;
    const std::vector<double> omegas = log_grid(0.01, 100.0, 50);
    const std::vector<SweepRow> rows = lowpass_sweep(ex52_sweep_factory(a), omegas);
    Meta meta;
    meta.add("figure", "fig6").add("model", "ex52").add("a", a).add("c", "1e4*a").add("omega", "0.01:100:log:50");
    meta.add("N", static_cast<double>(kDefaultStepsPerPeriod));
    Output out(figure_path(args, "fig6.csv"));
    auto& os = out.stream();
    os << meta.line() << "\nomega,measured_max,bound_max,exact_max,closed_form_bound\n";
    std::size_t ok = 0;
    for (const auto& r : rows) {
        ok += r.ok ? 1 : 0;
        os << format_number(r.omega) << ',' << format_number(r.measured_max) << ',' << format_number(r.bound_max) << ','
           << format_number(ex52_max_gamma1(a, r.omega)) << ',' << format_number(a * a / (1.0 + r.omega * r.omega))
           << '\n';
    }
    std::cout << "slope " << format_number(loglog_slope(rows, 10.0, 100.0)) << " over omega in [10, 100]\n";
    return ok == rows.size() ? kExitOk : kExitModel;
}

int run_figure(const FigureArgs& args) {
    if (args.name == "fig2") return figure_fig2(args);
    if (args.name == "fig3") return figure_bound(args, "fig3", false);
    if (args.name == "fig5") return figure_bound(args, "fig5", true);
    if (args.name == "fig6") return figure_fig6(args);
    throw InputError("unknown figure '" + args.name + "'");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Contraction certificates, entrained orbits and approximation bounds for periodically forced systems"};
    app.set_version_flag("--version", std::string(entrain::kVersion));
    app.require_subcommand(1);

    MeasureArgs measure_args;
    auto* measure = app.add_subcommand("measure", "Matrix measure of a JSON matrix");
    measure->add_option("--matrix", measure_args.matrix, "JSON file: array of rows")->required();
    measure->add_option("--norm", measure_args.norm, "l1 | l2 | linf | all")
        ->check(CLI::IsMember({"l1", "l2", "linf", "all"}))
        ->capture_default_str();
    measure->add_option("--diag", measure_args.diag, "diagonal scaling D, comma separated")->delimiter(',');

    ModelFlags orbit_flags, bound_flags, sweep_flags;
    RunArgs orbit_args, bound_args, sweep_args;

    auto* orbit = app.add_subcommand("orbit", "One period of the entrained orbit as CSV");
    add_model_options(orbit, orbit_flags);
    orbit->add_option("--steps", orbit_args.steps, "RK4 steps per period (also the grid size)")->capture_default_str();
    orbit->add_option("--tol", orbit_args.tol, "period-map tolerance")->capture_default_str();
    orbit->add_option("--out", orbit_args.out, "output file (default stdout)");

    auto* bound = app.add_subcommand("bound", "Bound report for an approximant");
    add_model_options(bound, bound_flags);
    bound->add_option("--approx", bound_args.approx, "averaged | linearized")
        ->check(CLI::IsMember({"averaged", "linearized"}))
        ->capture_default_str();
    bound->add_option("--steps", bound_args.steps, "RK4 steps per period (also the grid size)")->capture_default_str();
    bound->add_option("--tol", bound_args.tol, "period-map tolerance")->capture_default_str();
    bound->add_option("--slack", bound_args.slack, "relative slack of the validity check")->capture_default_str();
    bound->add_option("--format", bound_args.format, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    bound->add_option("--out", bound_args.out, "output file (default stdout)");

    auto* sweep = app.add_subcommand("sweep", "Frequency sweep of max |gamma - kappa| and its bound");
    add_model_options(sweep, sweep_flags);
    sweep->remove_option(sweep->get_option("--omega"));
    sweep->add_option("--omega", sweep_args.omega_grid, "lo:hi:log:k or lo:hi:lin:k")->required();
    sweep->add_option("--steps", sweep_args.steps, "RK4 steps per period")->capture_default_str();
    sweep->add_option("--tol", sweep_args.tol, "period-map tolerance")->capture_default_str();
    sweep->add_option("--out", sweep_args.out, "output file (default stdout)");

    FigureArgs figure_args;
    auto* figure = app.add_subcommand("figure", "Write a figure dataset (fig2, fig3, fig5, fig6)");
    figure->add_option("name", figure_args.name, "fig2 | fig3 | fig5 | fig6")
        ->required()
        ->check(CLI::IsMember({"fig2", "fig3", "fig5", "fig6"}));
    figure->add_option("--dir", figure_args.dir, "output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (measure->parsed()) return run_measure(measure_args);
        if (orbit->parsed()) return run_orbit(orbit, orbit_flags, orbit_args);
        if (bound->parsed()) return run_bound(bound, bound_flags, bound_args);
        if (sweep->parsed()) return run_sweep(sweep, sweep_flags, sweep_args);
        if (figure->parsed()) return run_figure(figure_args);
    } catch (const entrain::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const entrain::ModelError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitModel;
    } catch (const entrain::BoundViolationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitViolation;
    } catch (const entrain::SingularMatrixError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitModel;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
    return kExitOk;
}
