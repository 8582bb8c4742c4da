#include "cli.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "alpha/analysis.hpp"
#include "alpha/data_io.hpp"
#include "alpha/error.hpp"
#include "alpha/eso.hpp"
#include "alpha/trace_io.hpp"

namespace alpha::cli {
namespace {

struct Options {
    std::string data;
    std::string targets;
    std::string loss = "quadratic";
    std::string reg = "none";
    double lambda = 0.0;
    std::string box;
    std::string sampling;
    std::string schedule;
    std::optional<double> theta0;
    std::string preset;
    std::string eso = "auto";
    std::string v;
    std::size_t iters = 100;
    std::uint64_t seed = 0;
    std::string seeds;
    int jobs = 1;
    std::string out;
    bool bound = false;
    std::string xstar;
    bool compute_xstar = false;
    std::string diagnostics;
    std::size_t log_stride = 0;
    bool no_eval = false;
    std::string certify;
    bool normalize = false;
    std::size_t block_size = 1;
    std::optional<double> slack;
    std::string variant = "generic";
    std::size_t trials = 100;
    std::size_t samples = 1000;
    std::size_t reference_iters = 100000;
};

struct Problem {
    std::shared_ptr<const SmoothObjective> obj;
    std::shared_ptr<const Regularizer> reg;
};

struct Experiment {
    Problem problem;
    SolverConfig config;
    Vector x0;
    std::vector<std::uint64_t> seeds;
    bool sweep = false;  // --seeds given
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_reals(const std::string& text, const std::string& flag) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != tok.size()) throw ConfigError(flag + ": cannot parse '" + tok + "' as a number");
        values.push_back(x);
    }
    if (values.empty()) throw ConfigError(flag + " is empty");
    return values;
}

std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) throw ConfigError("--seeds expects a..b");
    try {
        std::size_t ua = 0;
        std::size_t ub = 0;
        const std::string sa = text.substr(0, dots);
        const std::string sb = text.substr(dots + 2);
        const auto a = std::stoull(sa, &ua);
        const auto b = std::stoull(sb, &ub);
        if (ua != sa.size() || ub != sb.size() || sa.empty() || sb.empty()) throw std::invalid_argument("seeds");
        if (b < a) throw ConfigError("--seeds a..b needs a <= b");
        std::vector<std::uint64_t> seeds;
        for (auto s = a; s <= b; ++s) seeds.push_back(s);
        return seeds;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("--seeds expects a..b with nonnegative integers, got '" + text + "'");
    }
}

std::string seed_path(const std::string& out, std::uint64_t seed) {
    const std::filesystem::path p(out);
    std::filesystem::path name = p.stem();
    name += ".seed" + std::to_string(seed);
    name += p.extension();
    return (p.parent_path() / name).string();
}

Problem build_problem(const Options& o) {
    if (o.data.empty()) throw ConfigError("--data is required");
    Dataset d = load_dataset(o.data, o.targets);
    if (o.normalize) d.normalize_columns();
    d.check_no_zero_columns();
    if (o.block_size == 0) throw ConfigError("--block-size must be positive");
    const PartitionPtr part = make_partition(d.cols, o.block_size);
    const auto A = d.matrix(part);

    Problem p;
    if (o.loss == "quadratic")
        p.obj = std::make_shared<const SmoothObjective>(SmoothObjective::least_squares(A, d.targets));
    else if (o.loss == "logistic")
        p.obj = std::make_shared<const SmoothObjective>(SmoothObjective::logistic(A, d.targets));
    else
        throw ConfigError("--loss must be quadratic or logistic");

    if (o.reg != "box" && !o.box.empty()) throw ConfigError("--box only applies to --reg box");
    if (o.reg == "none") {
        p.reg = std::make_shared<const Regularizer>(Regularizer::zero(part));
    } else if (o.reg == "l1") {
        p.reg = std::make_shared<const Regularizer>(Regularizer::l1(part, o.lambda));
    } else if (o.reg == "sql2") {
        p.reg = std::make_shared<const Regularizer>(Regularizer::sq_l2(part, o.lambda));
    } else if (o.reg == "box") {
        const auto b = parse_reals(o.box, "--box");
        if (b.size() != 2) throw ConfigError("--box expects lo,hi");
        p.reg = std::make_shared<const Regularizer>(Regularizer::box(part, b[0], b[1]));
    } else {
        throw ConfigError("--reg must be none, l1, sql2 or box");
    }
    return p;
}

std::optional<Weights> user_v(const Options& o, std::size_t n) {
    if (o.v.empty()) return std::nullopt;
    const auto vals = parse_reals(o.v, "--v");
    if (vals.size() == 1) return Weights::constant(n, vals[0]);
    if (vals.size() != n)
        throw ConfigError("--v needs 1 or " + std::to_string(n) + " values, got " + std::to_string(vals.size()));
    return Weights(Eigen::Map<const Vector>(vals.data(), static_cast<Eigen::Index>(vals.size())));
}

Weights resolve_v(const Options& o, const SmoothObjective& obj, const Sampling& s) {
    const auto given = user_v(o, obj.num_blocks());
    if (o.eso == "user") {
        if (!given) throw ConfigError("--eso user needs --v");
        return *given;
    }
    if (given && o.eso != "auto") throw ConfigError("--v is only used with --eso user or auto");
    if (o.eso == "serial") {
        if (!s.is_serial()) throw ConfigError("--eso serial needs a serial sampling, got " + s.describe());
        return serial_eso(obj);
    }
    if (o.eso == "full") return full_eso(obj);
    if (o.eso == "auto") return given ? *given : default_eso(obj, s);
    throw ConfigError("--eso must be serial, full, user or auto");
}

SolverConfig build_config(const Options& o, const CLI::App& cmd, const Problem& problem, std::ostream& err) {
    const auto& obj = *problem.obj;
    const auto& reg = *problem.reg;
    const std::size_t n = obj.num_blocks();

    std::optional<Sampling> sampling;
    if (!o.sampling.empty()) sampling = Sampling::parse(o.sampling, n);

    if (!o.preset.empty()) {
        const Preset preset = parse_preset(o.preset);
        if (cmd.count("--schedule") > 0 || cmd.count("--theta0") > 0)
            err << "note: preset " << o.preset << " overrides --schedule and --theta0\n";
        std::optional<Weights> v;
        if (o.eso != "auto" || !o.v.empty())
            v = resolve_v(o, obj, sampling ? *sampling : preset_default_sampling(preset, n));
        return make_preset(preset, obj, reg, sampling, v);
    }
    const Sampling s = sampling ? *sampling : Sampling::serial_uniform(n);
    const Weights v = resolve_v(o, obj, s);
    const double theta0 = o.theta0.value_or(s.probability_vector().min());
    if (o.schedule.empty() || o.schedule == "constant") return SolverConfig{s, v, ThetaSchedule::constant(theta0)};
    if (o.schedule == "accelerated") return SolverConfig{s, v, ThetaSchedule::accelerated(theta0)};
    throw ConfigError("--schedule must be constant or accelerated");
}

Experiment build_experiment(const Options& o, const CLI::App& cmd, std::ostream& err) {
    Problem problem = build_problem(o);
    SolverConfig config = build_config(o, cmd, problem, err);
    config.iterations = o.iters;
    config.variant = parse_variant(o.variant);
    config.log_stride = o.log_stride;
    config.evaluate = !o.no_eval;

    std::vector<std::uint64_t> seeds{o.seed};
    if (!o.seeds.empty()) {
        if (cmd.count("--seed") > 0) throw ConfigError("use either --seed or --seeds");
        seeds = parse_seed_range(o.seeds);
    }
    if (o.jobs < 1) throw ConfigError("--jobs must be at least 1");

    Vector x0 = initial_point(*problem.reg);
    validate(*problem.obj, *problem.reg, config, x0);
    return Experiment{std::move(problem), std::move(config), std::move(x0), std::move(seeds), !o.seeds.empty()};
}

/// Returns true when certified; prints the certificate either way.
bool certify(const std::string& mode, const Options& o, const Experiment& e, std::ostream& out) {
    const auto& obj = *e.problem.obj;
    const auto& s = e.config.sampling;
    const auto& v = e.config.v;
    EsoCertificate cert{v};
    std::ostringstream line;
    line << std::setprecision(6);
    if (mode == "psd") {
        cert.certification = CertificationKind::quadratic_psd;
        cert.value = certify_quadratic(obj, s, v);
        line << "certify psd lambda_min=" << cert.value;
    } else if (mode == "mc") {
        const auto rep = falsify_monte_carlo(obj, s, v, o.trials, e.seeds.front(), o.samples);
        cert.certification = CertificationKind::monte_carlo;
        cert.value = rep.worst;
        cert.trials = rep.trials;
        line << "certify mc worst_violation=" << rep.worst << " trials=" << rep.trials
             << (rep.exact ? " exact" : " sampled");
        if (!rep.exact) line << " std_error=" << rep.std_error;
    } else {
        throw ConfigError("--certify must be psd, mc or off");
    }
    line << (cert.certified() ? " CERTIFIED" : " NOT CERTIFIED");
    out << line.str() << '\n';
    return cert.certified();
}

Vector reference_point(const Options& o, const Problem& p) {
    if (!o.xstar.empty()) {
        std::ifstream in(o.xstar);
        if (!in) throw DataError("cannot open " + o.xstar);
        Vector x;
        try {
            x = read_targets(in);
        } catch (const DataError& ex) {
            throw DataError(o.xstar + ": " + ex.what(), ex.line());
        }
        if (static_cast<std::size_t>(x.size()) != p.obj->dim())
            throw DataError(o.xstar + ": expected " + std::to_string(p.obj->dim()) + " values");
        return x;
    }
    if (o.compute_xstar) return reference_solution(*p.obj, *p.reg, o.reference_iters);
    throw ConfigError("a reference point is required: pass --xstar <file> or --compute-xstar");
}

struct GammaReport {
    std::size_t k = 0;
    bool premise = true;  // theta0 <= min p
    double min_gamma = 0.0;
    double sum_deviation = 0.0;
    double identity_error = 0.0;
    double reconstruction_error = 0.0;
    double psi_excess = -std::numeric_limits<double>::infinity();

    bool ok() const {
        return (!premise || (min_gamma >= -1e-12 && sum_deviation <= 1e-10)) && reconstruction_error <= 1e-8 &&
               psi_excess <= 1e-10;
    }
};

std::vector<RunResult> run_seeds(const Experiment& e, int jobs, GammaReport* gamma) {
    const auto& obj = *e.problem.obj;
    const auto& reg = *e.problem.reg;
    std::vector<RunResult> results(e.seeds.size());
    std::vector<std::exception_ptr> errors(e.seeds.size());

    if (gamma) {
        SolverConfig config = e.config;
        config.seed = e.seeds.front();
        GammaTable table(config.sampling.probability_vector());
        gamma->premise = config.schedule.theta0 <= config.sampling.probability_vector().min();
        const double scale = std::max(1.0, e.x0.lpNorm<Eigen::Infinity>());
        auto observer = [&](const IterationView& it) {
            table.push_z(it.z);
            const Vector xr = table.reconstruct_x(obj.partition());
            const double xscale = std::max(scale, it.x.lpNorm<Eigen::Infinity>());
            gamma->reconstruction_error =
                std::max(gamma->reconstruction_error, (xr - it.x).lpNorm<Eigen::Infinity>() / xscale);
            gamma->psi_excess = std::max(gamma->psi_excess, reg.value(it.x) - table.psi_hat(reg));
            table.step(it.theta);
        };
        results[0] = run(obj, reg, config, e.x0, observer);
        gamma->k = table.k();
        gamma->min_gamma = table.min_gamma();
        gamma->sum_deviation = table.max_sum_deviation();
        gamma->identity_error = table.identity_error();
        return results;
    }

    const auto count = static_cast<std::ptrdiff_t>(e.seeds.size());
#pragma omp parallel for num_threads(jobs) schedule(dynamic)
    for (std::ptrdiff_t j = 0; j < count; ++j) {
        try {
            SolverConfig config = e.config;
            config.seed = e.seeds[static_cast<std::size_t>(j)];
            results[static_cast<std::size_t>(j)] = run(obj, reg, config, e.x0);
        } catch (...) {
            errors[static_cast<std::size_t>(j)] = std::current_exception();
        }
    }
    for (const auto& ex : errors)
        if (ex) std::rethrow_exception(ex);
    return results;
}

TraceBounds trace_bounds(const Trace& trace, double C, double theta0) {
    TraceBounds b;
    for (const auto& row : trace) {
        b.nonacc.push_back(bound_nonaccelerated(C, theta0, row.k));
        b.acc.push_back(bound_accelerated(C, theta0, row.k));
    }
    return b;
}

double bound_constant_at(const Experiment& e, const Vector& xstar) {
    const auto& obj = *e.problem.obj;
    const auto& reg = *e.problem.reg;
    const double F0 = obj.value(e.x0) + reg.value(e.x0);
    const double Fs = obj.value(xstar) + reg.value(xstar);
    return bound_constant(e.x0, xstar, F0, Fs, e.config.v, e.config.sampling.probability_vector(),
                          e.config.schedule.theta0, obj.metric());
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path);
    f << text;
    if (!f) throw ConfigError("failed writing " + path);
}

std::string format_real(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

int solve_command(const Options& o, const CLI::App& cmd, std::ostream& out, std::ostream& err) {
    const Experiment e = build_experiment(o, cmd, err);
    if (e.seeds.size() > 1 && o.out.empty()) throw ConfigError("a seed sweep needs --out");

    std::ostream& info = o.out.empty() ? err : out;
    if (!o.certify.empty() && o.certify != "off" && !certify(o.certify, o, e, info)) {
        err << "error: the ESO certificate failed; refusing to run\n";
        return kFail;
    }

    std::optional<double> C;
    if (o.bound) {
        if (o.no_eval) throw ConfigError("--bound needs per-iteration evaluation; drop --no-eval");
        C = bound_constant_at(e, reference_point(o, e.problem));
    }

    std::optional<GammaReport> gamma;
    if (!o.diagnostics.empty()) {
        if (o.diagnostics != "gamma") throw ConfigError("--diagnostics supports only gamma");
        if (e.seeds.size() != 1) throw ConfigError("--diagnostics gamma runs a single seed");
        if (o.iters > 200) throw ConfigError("--diagnostics gamma is capped at 200 iterations");
        gamma.emplace();
    }

    const auto results = run_seeds(e, o.jobs, gamma ? &*gamma : nullptr);

    for (std::size_t j = 0; j < results.size(); ++j) {
        const auto& r = results[j];
        std::ostringstream csv;
        if (C) {
            const TraceBounds b = trace_bounds(r.trace, *C, e.config.schedule.theta0);
            write_trace(csv, r.trace, &b);
        } else {
            write_trace(csv, r.trace);
        }
        if (o.out.empty())
            out << csv.str();
        else
            write_file(e.sweep ? seed_path(o.out, e.seeds[j]) : o.out, csv.str());

        const double F = r.trace.empty() ? std::numeric_limits<double>::quiet_NaN() : r.trace.back().F;
        info << "seed=" << e.seeds[j] << " iterations=" << e.config.iterations << " F=" << format_real(F)
             << " touched_nnz=" << r.cost.touched << '\n';
    }

    if (gamma) {
        info << "gamma k=" << gamma->k << " min_gamma=" << gamma->min_gamma
             << " max_sum_deviation=" << gamma->sum_deviation << " identity_error=" << gamma->identity_error
             << " reconstruction_error=" << gamma->reconstruction_error
             << " psi_excess=" << gamma->psi_excess << (gamma->premise ? "" : " (theta0 > min p: sign checks skipped)")
             << (gamma->ok() ? " PASS" : " FAIL") << '\n';
        if (!gamma->ok()) return kFail;
    }
    return kOk;
}

int check_command(const Options& o, const CLI::App& cmd, std::ostream& out, std::ostream& err) {
    if (o.no_eval) throw ConfigError("check needs per-iteration evaluation; drop --no-eval");
    const Experiment e = build_experiment(o, cmd, err);
    const Vector xstar = reference_point(o, e.problem);

    if (!o.certify.empty() && o.certify != "off" && !certify(o.certify, o, e, out)) {
        err << "error: the ESO certificate failed; refusing to run\n";
        return kFail;
    }

    const auto& obj = *e.problem.obj;
    const auto& reg = *e.problem.reg;
    const double Fstar = obj.value(xstar) + reg.value(xstar);
    const double C = bound_constant_at(e, xstar);
    const double theta0 = e.config.schedule.theta0;
    const bool accelerated = e.config.schedule.kind == ThetaSchedule::Kind::accelerated;
    const double slack = o.slack.value_or(e.config.sampling.is_deterministic() ? 1e-9 : 0.05);

    const auto results = run_seeds(e, o.jobs, nullptr);
    const std::size_t rows = results.front().trace.size();

    std::ostringstream report;
    report << "k,mean_gap,bound,ratio\n";
    double max_ratio = -std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < rows; ++r) {
        double mean = 0.0;
        for (const auto& res : results) mean += res.trace[r].F;
        mean /= static_cast<double>(results.size());
        // Constant schedules bound the best iterate so far; accelerated ones bound every iterate.
        best = std::min(best, mean);
        const double gap = (accelerated ? mean : best) - Fstar;
        const std::size_t k = results.front().trace[r].k;
        const double bound = accelerated ? bound_accelerated(C, theta0, k) : bound_nonaccelerated(C, theta0, k);
        const double ratio = bound > 0.0 ? gap / bound : (gap <= 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
        max_ratio = std::max(max_ratio, ratio);
        report << k << ',' << format_real(gap) << ',' << format_real(bound) << ',' << format_real(ratio) << '\n';
    }
    if (!o.out.empty()) write_file(o.out, report.str());

    const bool pass = max_ratio <= 1.0 + slack;
    out << "check " << (pass ? "PASS" : "FAIL") << " max_ratio=" << format_real(max_ratio) << " slack=" << slack
        << " seeds=" << results.size() << " rows=" << rows << " C=" << format_real(C) << '\n';
    return pass ? kOk : kFail;
}

int certify_command(const Options& o, const CLI::App& cmd, std::ostream& out, std::ostream& err) {
    const Experiment e = build_experiment(o, cmd, err);
    const std::string mode = o.certify.empty() ? "psd" : o.certify;
    if (mode == "off") throw ConfigError("certify needs --certify psd or mc");
    return certify(mode, o, e, out) ? kOk : kFail;
}

void add_options(CLI::App& c, Options& o) {
    c.add_option("--config", "key = value file whose entries act as flags (command-line flags win)");
    c.add_option("--data", o.data, "Matrix: coordinate list (with --targets) or LIBSVM");
    c.add_option("--targets", o.targets, "Targets, one per line");
    c.add_option("--loss", o.loss, "quadratic | logistic");
    c.add_option("--reg", o.reg, "none | l1 | sql2 | box");
    c.add_option("--lambda", o.lambda, "Regularization weight");
    c.add_option("--box", o.box, "lo,hi");
    c.add_option("--sampling", o.sampling, "full | serial-uniform | serial:<q,...> | tau-nice:<t> | distributed:<c>,<t>");
    c.add_option("--schedule", o.schedule, "constant | accelerated");
    c.add_option("--theta0", o.theta0, "Initial theta (default min_i p_i)");
    c.add_option("--preset", o.preset, "gd | agd | pcd | apcd | prox_gd | acc_prox_gd | pcdm | approxis");
    c.add_option("--eso", o.eso, "serial | full | user | auto");
    c.add_option("--v", o.v, "ESO weights, comma separated (one value broadcasts)");
    c.add_option("--iters", o.iters, "Iterations");
    c.add_option("--seed", o.seed, "Random seed");
    c.add_option("--seeds", o.seeds, "Seed range a..b (inclusive)");
    c.add_option("--jobs", o.jobs, "Concurrent runs in a seed sweep");
    c.add_option("--out", o.out, "Output path");
    c.add_flag("--bound", o.bound, "Append bound_nonacc,bound_acc columns");
    c.add_option("--xstar", o.xstar, "Reference minimizer, one value per line");
    c.add_flag("--compute-xstar", o.compute_xstar, "Compute the reference minimizer");
    c.add_option("--reference-iters", o.reference_iters, "Iterations of the reference run");
    c.add_option("--diagnostics", o.diagnostics, "gamma");
    c.add_option("--log-stride", o.log_stride, "Trace every k-th iteration (0: auto)");
    c.add_flag("--no-eval", o.no_eval, "Skip per-iteration objective evaluation");
    c.add_option("--certify", o.certify, "psd | mc | off");
    c.add_option("--trials", o.trials, "Monte Carlo trials");
    c.add_option("--samples", o.samples, "Monte Carlo draws per trial when atoms are not enumerable");
    c.add_flag("--normalize", o.normalize, "Scale columns to unit norm");
    c.add_option("--block-size", o.block_size, "Columns per block");
    c.add_option("--slack", o.slack, "check: allowed ratio excess");
    c.add_option("--variant", o.variant, "generic | smooth | efficient");
}

/// Moves the entries of every `--config` file to just after the subcommand.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    if (args.empty()) return args;
    std::vector<std::string> rest;
    std::vector<std::string> from_files;
    for (std::size_t i = 1; i < args.size(); ++i) {
        const std::string& a = args[i];
        std::string path;
        if (a == "--config") {
            if (i + 1 >= args.size()) throw ConfigError("--config needs a path");
            path = args[++i];
        } else if (a.rfind("--config=", 0) == 0) {
            path = a.substr(9);
        } else {
            rest.push_back(a);
            continue;
        }
        const auto extra = config_file_arguments(path);
        from_files.insert(from_files.end(), extra.begin(), extra.end());
    }
    std::vector<std::string> expanded{args.front()};
    expanded.insert(expanded.end(), from_files.begin(), from_files.end());
    expanded.insert(expanded.end(), rest.begin(), rest.end());
    return expanded;
}

}  // namespace

std::vector<std::string> config_file_arguments(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::vector<std::string> args;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
        if (key == "config") throw ConfigError(path + ":" + std::to_string(lineno) + ": nested config files");
        if (value == "true") {
            args.push_back("--" + key);
        } else if (value != "false") {
            args.push_back("--" + key);
            args.push_back(value);
        }
    }
    return args;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Randomized block coordinate descent (ALPHA) runner", "alpha"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    auto* solve = app.add_subcommand("solve", "Run the method and write trace CSVs");
    auto* check = app.add_subcommand("check", "Compare the mean trace against the theoretical bound");
    auto* cert = app.add_subcommand("certify", "Certify the ESO weights v for the sampling");
    for (auto* c : {solve, check, cert}) add_options(*c, o);

    try {
        std::vector<std::string> argv = expand_config(args);
        std::reverse(argv.begin(), argv.end());
        app.parse(argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kOk;
        }
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }

    try {
        if (solve->parsed()) return solve_command(o, *solve, out, err);
        if (check->parsed()) return check_command(o, *check, out, err);
        return certify_command(o, *cert, out, err);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const AtomCapExceeded& e) {
        err << "error: " << e.what() << "; try --certify mc or raise ALPHA_ATOM_CAP\n";
        return kConfigError;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFail;
    }
}

}  // namespace alpha::cli
