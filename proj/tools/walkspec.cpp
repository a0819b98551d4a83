#include <CLI11.hpp>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "walkspec/asymptotics.hpp"
#include "walkspec/closed_form.hpp"
#include "walkspec/error.hpp"
#include "walkspec/fixed_point.hpp"
#include "walkspec/format.hpp"
#include "walkspec/graph_models.hpp"
#include "walkspec/montecarlo.hpp"
#include "walkspec/quotient_dp.hpp"
#include "walkspec/verify.hpp"

#ifndef WALKSPEC_VERSION
#define WALKSPEC_VERSION "0.0.0"
#endif

using namespace walkspec;
using nlohmann::ordered_json;

namespace {

struct Common {
    std::string model = "free:2,1";
    double lambda = 1.0;
    std::string out;
    std::string json;
    std::uint64_t seed = 1;
    unsigned jobs = 1;
    std::size_t nmax = 4000;
    std::size_t steps = 100000;
    std::size_t replicas = 200;
    bool timing = false;
    std::string command_line;
};

struct CheckFailure {};

std::string quote(const std::string& arg) {
    if (!arg.empty() && arg.find_first_of(" \t\"'\\$") == std::string::npos) return arg;
    std::string q = "'";
    for (char c : arg) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

std::string join_command(int argc, char** argv) {
    std::string s = "walkspec";
    for (int i = 1; i < argc; ++i) s += " " + quote(argv[i]);
    return s;
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

ordered_json opt_json(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json metadata(const Common& c) {
    return ordered_json{{"schema", 1},
                        {"version", WALKSPEC_VERSION},
                        {"command", c.command_line},
                        {"model", c.model},
                        {"seed", c.seed},
                        {"rng_id", mc::kRngId}};
}

void write_csv_preamble(std::ostream& os, const Common& c) {
    os << "schema=1\n";
    os << "# version=" << WALKSPEC_VERSION << '\n';
    os << "# command=" << c.command_line << '\n';
    os << "# model=" << c.model << '\n';
    os << "# seed=" << c.seed << '\n';
    os << "# rng_id=" << mc::kRngId << '\n';
}

// Writes to the named file, or to stdout when the name is empty or "-".
template <class Writer>
void emit(const std::string& path, Writer&& writer) {
    if (path.empty() || path == "-") {
        writer(std::cout);
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw Error(ErrorKind::InvalidArgument, "cannot open " + path + " for writing");
    writer(file);
}

void emit_json(const std::string& path, const ordered_json& doc) {
    if (path.empty()) return;
    emit(path, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
}

void add_model(CLI::App* cmd, Common& c) {
    cmd->add_option("--model", c.model, "tree:d=<d> or free:<m1>,<m2>,...")
        ->delimiter(',')
        ->multi_option_policy(CLI::MultiOptionPolicy::Join)
        ->capture_default_str();
    cmd->add_option("--lambda", c.lambda, "bias lambda >= 0")->capture_default_str();
}

void add_outputs(CLI::App* cmd, Common& c) {
    cmd->add_option("--out", c.out, "CSV output file (default stdout)");
    cmd->add_option("--json", c.json, "JSON output file");
}

void add_seed(CLI::App* cmd, Common& c, std::uint64_t& seed) {
    cmd->add_option("--seed", seed, "master seed")->envname("WALKSPEC_SEED")->capture_default_str();
    cmd->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
}

void add_mc(CLI::App* cmd, Common& c) {
    cmd->add_option("--steps", c.steps, "steps per path")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--replicas", c.replicas, "independent paths")->check(CLI::PositiveNumber)->capture_default_str();
}

double critical_bias(const GraphModel& model) {
    if (model.is_tree()) return model.tree_degree() - 1.0;
    return fixed_point::lambda_c_free_product(model.ms());
}

// --- rho ---------------------------------------------------------------------

void cmd_rho(const Common& c, const std::string& method) {
    const GraphModel model = parse_model(c.model);
    asymptotics::SweepOptions so;
    so.closed = method == "closed" || method == "all";
    so.solver = method == "solver" || method == "all";
    so.n_max = (method == "dp" || method == "all") ? c.nmax : 0;

    // Run the requested sources directly so that domain errors surface instead of nulls.
    if (so.closed) {
        if (model.is_tree()) {
            closed_form::rho_tree(model.tree_degree(), c.lambda);
        } else if (model.is_two_factor()) {
            closed_form::rho_two_complete(model.ms()[0], model.ms()[1], c.lambda, model.is_degenerate_line());
        } else if (method == "closed") {
            throw Error(ErrorKind::UnsupportedModel, "no closed form for " + model.to_string());
        }
    }
    if (so.solver && method == "solver") {
        fixed_point::rho_free_product(model.is_tree() ? std::vector<int>(static_cast<std::size_t>(model.tree_degree()), 1)
                                                      : model.ms(),
                                      c.lambda);
    }
    if (so.n_max > 0) QuotientChain(model, c.lambda);

    asymptotics::SweepRecord rec = asymptotics::sweep_point(model, c.lambda, so);
    if (model.is_degenerate_line() && so.closed) {
        rec.rho_closed = closed_form::rho_two_complete(1, 1, c.lambda, true);
    }
    if (!rec.rho()) throw Error(ErrorKind::DomainError, "no method produced a value at lambda=" + format_double(c.lambda));

    std::cout << "model=" << c.model << " lambda=" << format_double(c.lambda) << '\n';
    if (rec.rho_closed) std::cout << "rho_closed=" << format_double(*rec.rho_closed) << '\n';
    if (rec.rho_solver) std::cout << "rho_solver=" << format_double(*rec.rho_solver) << '\n';
    if (rec.rho_dp) std::cout << "rho_dp=" << format_double(*rec.rho_dp) << " (n_max=" << c.nmax << ")\n";
    if (rec.gap_closed_solver) std::cout << "gap_closed_solver=" << format_double(*rec.gap_closed_solver) << '\n';
    if (rec.gap_closed_dp) std::cout << "gap_closed_dp=" << format_double(*rec.gap_closed_dp) << '\n';
    if (rec.gap_solver_dp) std::cout << "gap_solver_dp=" << format_double(*rec.gap_solver_dp) << '\n';

    ordered_json doc = metadata(c);
    doc["lambda"] = c.lambda;
    doc["method"] = method;
    doc["rho_closed"] = opt_json(rec.rho_closed);
    doc["rho_solver"] = opt_json(rec.rho_solver);
    doc["rho_dp"] = opt_json(rec.rho_dp);
    doc["n_max"] = so.n_max;
    emit_json(c.json, doc);
}

// --- speed -------------------------------------------------------------------

void cmd_speed(const Common& c) {
    const GraphModel model = parse_model(c.model);
    if (!model.is_two_factor()) {
        throw Error(ErrorKind::HypothesisViolated, "the speed formula covers two-factor free products only, got " + c.model);
    }
    const bool line = model.is_degenerate_line();
    const double closed = closed_form::speed_two_complete(model.ms()[0], model.ms()[1], c.lambda, line);
    mc::SimConfig cfg;
    cfg.model = model;
    cfg.lambda = c.lambda;
    cfg.steps = c.steps;
    cfg.replicas = c.replicas;
    cfg.seed = c.seed;
    cfg.jobs = c.jobs;
    cfg.allow_degenerate = line;
    const mc::Estimate e = mc::estimate_speed(cfg);
    const double z = e.se > 0.0 ? (e.mean - closed) / e.se : (e.mean == closed ? 0.0 : INFINITY);
    std::cout << "model=" << c.model << " lambda=" << format_double(c.lambda) << '\n'
              << "speed_closed=" << format_double(closed) << '\n'
              << "speed_mc=" << format_double(e.mean) << '\n'
              << "speed_se=" << format_double(e.se) << '\n'
              << "z_score=" << format_double(z) << '\n';
    ordered_json doc = metadata(c);
    doc["lambda"] = c.lambda;
    doc["steps"] = c.steps;
    doc["replicas"] = c.replicas;
    doc["estimates"] = {{"speed", e.mean}};
    doc["se"] = {{"speed", e.se}};
    doc["speed_closed"] = closed;
    doc["z_score"] = z;
    emit_json(c.json, doc);
}

// --- dp ----------------------------------------------------------------------

void cmd_dp(const Common& c) {
    const GraphModel model = parse_model(c.model);
    const SeriesTable table = series(QuotientChain(model, c.lambda), c.nmax);
    emit(c.out, [&](std::ostream& os) {
        write_csv_preamble(os, c);
        os << "# lambda=" << format_double(c.lambda) << '\n';
        write_series_csv(os, table);
    });
    ordered_json doc = metadata(c);
    doc["lambda"] = c.lambda;
    doc["n_max"] = c.nmax;
    const double residual = renewal_check(table);
    doc["renewal_residual"] = residual;
    std::cerr << "renewal_residual=" << format_double(residual) << '\n';
    try {
        const RhoEstimate est = rho_from_series(table);
        doc["rho_hat"] = est.rho;
        doc["rho_error"] = est.error;
        std::cerr << "rho_hat=" << format_double(est.rho) << " +- " << format_double(est.error) << '\n';
        const auto fit = asymptotics::fit_tail(table);
        doc["tail_fit"] = {{"rho_hat", fit.rho_hat},         {"exponent_hat", fit.exponent_hat},
                           {"constant_hat", fit.constant_hat}, {"n_lo", fit.n_lo},
                           {"n_hi", fit.n_hi},                 {"residual_rms", fit.residual_rms}};
    } catch (const Error& e) {
        std::cerr << "note: " << e.what() << '\n';
    }
    emit_json(c.json, doc);
}

// --- simulate ----------------------------------------------------------------

void cmd_simulate(const Common& c, std::size_t burn_in) {
    const GraphModel model = parse_model(c.model);
    mc::SimConfig cfg;
    cfg.model = model;
    cfg.lambda = c.lambda;
    cfg.steps = c.steps;
    cfg.replicas = c.replicas;
    cfg.seed = c.seed;
    cfg.jobs = c.jobs;
    cfg.burn_in = burn_in;
    cfg.allow_degenerate = true;
    const auto paths = mc::run_replicas(cfg);
    const auto s = mc::summarize(cfg, paths);
    const int types = model.type_count();

    emit(c.out, [&](std::ostream& os) {
        write_csv_preamble(os, c);
        os << "# lambda=" << format_double(c.lambda) << " steps=" << c.steps << " burn_in=" << burn_in << '\n';
        os << "replica,final_level,origin_visits";
        for (int t = 1; t <= types; ++t) os << ",occupation_" << t;
        os << '\n';
        for (std::size_t i = 0; i < paths.size(); ++i) {
            os << i << ',' << paths[i].final_level << ',' << paths[i].origin_visits;
            for (int t = 1; t <= types; ++t) os << ',' << paths[i].occupation[static_cast<std::size_t>(t)];
            os << '\n';
        }
    });

    ordered_json estimates{{"speed", s.speed.mean}, {"origin_fraction", s.origin.mean}};
    ordered_json se{{"speed", s.speed.se}, {"origin_fraction", s.origin.se}};
    for (int t = 1; t <= types; ++t) {
        estimates["occupation_" + std::to_string(t)] = s.occupation[static_cast<std::size_t>(t)].mean;
        se["occupation_" + std::to_string(t)] = s.occupation[static_cast<std::size_t>(t)].se;
    }
    if (model.is_two_factor()) {
        for (const auto& fit : mc::excursion_stats(cfg, paths)) {
            const std::string key = "excursion_" + std::to_string(fit.type);
            estimates[key] = {{"p", fit.p},
                              {"count", fit.excursions},
                              {"mean_extension", fit.mean_extension},
                              {"chi_square", fit.chi_square},
                              {"dof", fit.dof},
                              {"p_value", fit.p_value}};
        }
    }
    ordered_json doc = metadata(c);
    doc["lambda"] = c.lambda;
    doc["steps"] = c.steps;
    doc["replicas"] = c.replicas;
    doc["burn_in"] = burn_in;
    doc["estimates"] = estimates;
    doc["se"] = se;
    if (c.json.empty()) {
        std::cerr << doc.dump(2) << '\n';
    } else {
        emit_json(c.json, doc);
    }
}

// --- sweep -------------------------------------------------------------------

void write_gnuplot(const std::string& path, const std::string& csv, const GraphModel& model) {
    emit(path, [&](std::ostream& os) {
        os << "# gnuplot script for " << csv << '\n'
           << "set datafile separator ','\n"
           << "set datafile commentschars '#sm'\n"
           << "set xlabel 'lambda'\n"
           << "set ylabel 'rho'\n"
           << "set key left top\n"
           << "plot '" << csv << "' using 2:3 with lines title 'rho closed', \\\n"
           << "     '' using 2:4 with points title 'rho solver', \\\n"
           << "     '' using 2:5 with points title 'rho dp'\n";
        if (model.is_two_factor()) {
            os << "pause -1\n"
               << "set ylabel 'speed'\n"
               << "plot '" << csv << "' using 2:9 with lines title 'speed closed', \\\n"
               << "     '' using 2:10:11 with yerrorbars title 'speed mc'\n";
        }
    });
}

void cmd_sweep(const Common& c, double lo, double hi, std::size_t points, bool with_dp, bool with_mc,
               const std::string& gnuplot) {
    const GraphModel model = parse_model(c.model);
    asymptotics::SweepOptions so;
    so.n_max = with_dp ? c.nmax : 0;
    so.steps = with_mc ? c.steps : 0;
    so.replicas = with_mc ? c.replicas : 0;
    so.seed = c.seed;
    so.jobs = c.jobs;
    const auto records = asymptotics::continuity_sweep(model, asymptotics::linspace(lo, hi, points), so);

    emit(c.out, [&](std::ostream& os) {
        write_csv_preamble(os, c);
        os << "model,lambda,rho_closed,rho_solver,rho_dp,gap_closed_solver,gap_closed_dp,gap_solver_dp,"
              "speed_closed,speed_mc,speed_se,rho_hat,exponent_hat,constant_hat,fit_residual_rms,"
              "n_max,steps,replicas,seed,rng_id,wall_time_ms\n";
        for (const auto& r : records) {
            const auto f = [&](auto member) -> std::string { return r.fit ? format_double((*r.fit).*member) : ""; };
            os << r.model << ',' << format_double(r.lambda) << ',' << opt(r.rho_closed) << ',' << opt(r.rho_solver)
               << ',' << opt(r.rho_dp) << ',' << opt(r.gap_closed_solver) << ',' << opt(r.gap_closed_dp) << ','
               << opt(r.gap_solver_dp) << ',' << opt(r.speed_closed) << ',' << opt(r.speed_mc) << ','
               << opt(r.speed_se) << ',' << f(&asymptotics::TailFit::rho_hat) << ','
               << f(&asymptotics::TailFit::exponent_hat) << ',' << f(&asymptotics::TailFit::constant_hat) << ','
               << f(&asymptotics::TailFit::residual_rms) << ',' << r.n_max << ',' << r.steps << ',' << r.replicas
               << ',' << r.seed << ',' << r.rng_id << ',' << (c.timing ? opt(r.wall_time_ms) : "") << '\n';
        }
    });

    if (!c.json.empty()) {
        ordered_json doc = metadata(c);
        ordered_json rows = ordered_json::array();
        for (const auto& r : records) {
            ordered_json row{{"model", r.model},
                             {"lambda", r.lambda},
                             {"rho_closed", opt_json(r.rho_closed)},
                             {"rho_solver", opt_json(r.rho_solver)},
                             {"rho_dp", opt_json(r.rho_dp)},
                             {"gap_closed_solver", opt_json(r.gap_closed_solver)},
                             {"gap_closed_dp", opt_json(r.gap_closed_dp)},
                             {"gap_solver_dp", opt_json(r.gap_solver_dp)},
                             {"speed_closed", opt_json(r.speed_closed)},
                             {"speed_mc", opt_json(r.speed_mc)},
                             {"speed_se", opt_json(r.speed_se)}};
            if (r.fit) {
                row["tail_fit"] = {{"rho_hat", r.fit->rho_hat},
                                   {"exponent_hat", r.fit->exponent_hat},
                                   {"constant_hat", r.fit->constant_hat},
                                   {"residual_rms", r.fit->residual_rms}};
            } else {
                row["tail_fit"] = nullptr;
            }
            row["n_max"] = r.n_max;
            row["steps"] = r.steps;
            row["replicas"] = r.replicas;
            row["seed"] = r.seed;
            row["rng_id"] = r.rng_id;
            row["wall_time_ms"] = c.timing ? opt_json(r.wall_time_ms) : ordered_json(nullptr);
            rows.push_back(row);
        }
        doc["records"] = rows;
        emit_json(c.json, doc);
    }
    if (!gnuplot.empty()) write_gnuplot(gnuplot, c.out.empty() ? "sweep.csv" : c.out, model);

    const auto checks = asymptotics::check_sweep(records);
    std::cerr << "points=" << records.size() << " max_jump=" << format_double(checks.max_jump)
              << " increasing=" << (checks.increasing ? "yes" : "no") << '\n';
}

// --- verify ------------------------------------------------------------------

void cmd_verify(const Common& c, const std::string& suite, bool fast) {
    verify::VerifyOptions vo;
    vo.seed = c.seed;
    vo.jobs = c.jobs;
    (void)fast;  // every suite already finishes in seconds
    const auto results = verify::run_suite(suite, vo);
    std::size_t failed = 0;
    ordered_json doc = metadata(c);
    doc["suite"] = suite;
    ordered_json checks = ordered_json::array();
    for (const auto& r : results) {
        std::cout << verify::format_result(r) << '\n';
        failed += r.passed ? 0 : 1;
        checks.push_back({{"id", r.id}, {"name", r.name}, {"suite", r.suite}, {"passed", r.passed}, {"detail", r.detail}});
    }
    std::cout << results.size() - failed << '/' << results.size() << " checks passed\n";
    doc["checks"] = checks;
    emit_json(c.json, doc);
    if (failed > 0) throw CheckFailure{};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Biased random walks on regular trees and free products of complete graphs"};
    app.set_version_flag("--version", WALKSPEC_VERSION);
    app.set_config("--config", "", "key=value configuration file; command-line flags take precedence");
    app.require_subcommand(1);

    Common c;
    c.command_line = join_command(argc, argv);

    auto* rho = app.add_subcommand("rho", "spectral radius by closed form, fixed-point solver and/or DP");
    std::string method = "all";
    add_model(rho, c);
    add_outputs(rho, c);
    rho->add_option("--method", method, "closed, solver, dp or all")
        ->check(CLI::IsMember({"closed", "solver", "dp", "all"}))
        ->capture_default_str();
    rho->add_option("--nmax", c.nmax, "DP horizon")->capture_default_str();

    auto* speed = app.add_subcommand("speed", "closed-form speed against Monte Carlo");
    add_model(speed, c);
    add_outputs(speed, c);
    add_seed(speed, c, c.seed);
    add_mc(speed, c);

    auto* dp = app.add_subcommand("dp", "return and first-return probabilities as CSV");
    add_model(dp, c);
    add_outputs(dp, c);
    dp->add_option("--nmax", c.nmax, "largest n")->capture_default_str();

    auto* sim = app.add_subcommand("simulate", "simulate replicas and report estimators");
    std::size_t burn_in = 0;
    add_model(sim, c);
    add_outputs(sim, c);
    add_seed(sim, c, c.seed);
    add_mc(sim, c);
    sim->add_option("--burn-in", burn_in, "steps excluded from occupation counts")->capture_default_str();

    auto* sweep = app.add_subcommand("sweep", "lambda sweep of rho (and speed) sources");
    double lo = 0.05;
    double hi = 1.0;  // replaced by lambda_c unless given
    std::size_t points = 60;
    bool with_dp = false;
    bool with_mc = false;
    std::string gnuplot;
    add_model(sweep, c);
    add_outputs(sweep, c);
    add_seed(sweep, c, c.seed);
    add_mc(sweep, c);
    sweep->add_option("--lambda-lo", lo, "first grid point")->capture_default_str();
    sweep->add_option("--lambda-hi", hi, "last grid point (default lambda_c)");
    sweep->add_option("--points", points, "grid points")->check(CLI::Range(2, 100000))->capture_default_str();
    sweep->add_option("--nmax", c.nmax, "DP horizon when --dp is set")->capture_default_str();
    sweep->add_flag("--dp", with_dp, "add DP estimates and tail fits");
    sweep->add_flag("--mc", with_mc, "add Monte Carlo speed estimates");
    sweep->add_flag("--timing", c.timing, "fill wall_time_ms (output is then not reproducible)");
    sweep->add_option("--gnuplot-script", gnuplot, "also write a gnuplot script for the CSV");

    auto* ver = app.add_subcommand("verify", "run verification suites");
    std::string suite = "all";
    bool fast = false;
    ver->add_option("--suite", suite, "closedform, dp, oracle, mc, asymptotics or all")
        ->check(CLI::IsMember({"closedform", "dp", "oracle", "mc", "asymptotics", "all"}))
        ->capture_default_str();
    ver->add_flag("--fast", fast, "accepted for scripts; all suites run at full size");
    add_outputs(ver, c);
    std::uint64_t verify_seed = verify::kDefaultSeed;
    add_seed(ver, c, verify_seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*rho) cmd_rho(c, method);
        if (*speed) cmd_speed(c);
        if (*dp) cmd_dp(c);
        if (*sim) cmd_simulate(c, burn_in);
        if (*sweep) {
            if (sweep->count("--lambda-hi") == 0) hi = critical_bias(parse_model(c.model));
            cmd_sweep(c, lo, hi, points, with_dp, with_mc, gnuplot);
        }
        if (*ver) {
            c.seed = verify_seed;
            cmd_verify(c, suite, fast);
        }
    } catch (const CheckFailure&) {
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
