#include "anticonc/errors.hpp"
#include "anticonc_cli/cli.hpp"

#include <CLI11.hpp>

#include <ostream>

namespace anticonc::cli {

namespace {

void add_inputs(CLI::App* app, RunConfig& c) {
    app->add_option("--coeffs", c.coeffs, "coefficient vector JSON file");
    app->add_option("--x", c.x, "law of X: rademacher, gaussian:k, or a measure JSON file");
    app->add_option("--g", c.g, "symmetrized law G as a measure JSON file (default: symmetrize the --x law)");
}

void add_quadrature(CLI::App* app, RunConfig& c) {
    app->add_option("--quad-nodes", c.quadrature.nodes_per_panel, "Gauss-Legendre nodes per panel")
        ->check(CLI::Range(1, 256));
    app->add_option("--quad-tol", c.quadrature.tolerance, "absolute tolerance between refinements")
        ->check(CLI::PositiveNumber);
    app->add_option("--quad-max-refine", c.quadrature.max_refinements, "maximum number of panel halvings");
}

void add_output(CLI::App* app, RunConfig& c) {
    app->add_option("--format", c.format, "output format")->check(CLI::IsMember({"json", "csv"}));
    app->add_option("--out", c.out, "write the report to this file instead of stdout");
}

void add_bound_params(CLI::App* app, RunConfig& c) {
    add_inputs(app, c);
    app->add_option("--eps", c.eps, "radius of the H_1^lambda factor")->required();
    app->add_option("--tau", c.tau, "concentration radius")->required();
    app->add_option("--method", c.method, "q-proxy: esseen or mc")->check(CLI::IsMember({"esseen", "mc"}));
    app->add_option("--samples", c.samples, "Monte Carlo sample count for --method mc");
    app->add_option("--seed", c.seed, "random seed");
    add_quadrature(app, c);
    add_output(app, c);
}

}  // namespace

std::optional<RunConfig> parse_arguments(int argc, const char* const* argv, std::ostream& out) {
    RunConfig c;
    CLI::App app{"Concentration functions of weighted sums: exact values, Esseen functionals, bounds and structure"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "anticonc 0.1.0");

    auto* conc = app.add_subcommand("concentration", "Q(F, tau) of F_a, of a measure file, or of H_1^lambda");
    add_inputs(conc, c);
    conc->add_option("--measure", c.measure, "measure JSON file (instead of --coeffs/--x)");
    conc->add_option("--lambda", c.lambda, "use H_1^lambda built from --coeffs");
    conc->add_option("--tau", c.tau, "ball diameter")->required();
    conc->add_option("--method", c.method, "exact, mc or dp")->check(CLI::IsMember({"exact", "mc", "dp"}));
    conc->add_option("--samples", c.samples, "Monte Carlo sample count");
    conc->add_option("--seed", c.seed, "random seed");
    add_output(conc, c);

    auto* ess = app.add_subcommand("esseen", "tau^d times the integral of |cf| over |t| <= 1/tau");
    add_inputs(ess, c);
    ess->add_option("--lambda", c.lambda, "integrate H^_1^lambda instead of the cf of S_a");
    ess->add_option("--tau", c.tau, "radius")->required();
    add_quadrature(ess, c);
    add_output(ess, c);

    auto* bound = app.add_subcommand("bound", "upper bounds for Q(F_a, tau)");
    bound->require_subcommand(1);
    auto* thm = bound->add_subcommand("theorem1", "general sub-measure V = f G");
    add_bound_params(thm, c);
    thm->add_option("--v-weights", c.v_weights, "weights f on the atoms of G (JSON array)")->required();
    auto* thr = bound->add_subcommand("cor-threshold", "f = indicator{|z| >= delta}");
    add_bound_params(thr, c);
    thr->add_option("--delta", c.delta, "threshold")->required();
    auto* logw = bound->add_subcommand("cor-logweight", "f = 1 / max{1, log-factor}");
    add_bound_params(logw, c);
    auto* opt = bound->add_subcommand("optimize", "best threshold over a grid, plus the log-weight choice");
    add_bound_params(opt, c);
    opt->add_option("--delta-grid", c.delta_grid, "comma-separated thresholds (default: the distinct |z| of G)")
        ->delimiter(',');

    auto* st = app.add_subcommand("structure", "generator search for [K_1(u)]_tau coverings");
    st->require_subcommand(1);
    auto* search = st->add_subcommand("search", "search generators covering a measure");
    search->add_option("--measure", c.measure, "measure M JSON file")->required();
    search->add_option("--alpha", c.alpha, "weight alpha (default 1)");
    search->add_option("--tau", c.tau, "neighborhood radius")->required();
    search->add_option("--rmax", c.rmax, "maximum number of generators");
    search->add_option("--method", c.method, "greedy or exact")->check(CLI::IsMember({"greedy", "exact"}));
    search->add_option("--seed", c.seed, "seed for candidate-pool thinning");
    add_output(search, c);
    auto* scaling = st->add_subcommand("scaling", "gamma, generators and diagnostic ratios");
    scaling->add_option("--measure", c.measure, "jump law M (with --alpha)");
    scaling->add_option("--alpha", c.alpha, "compound Poisson intensity");
    scaling->add_option("--coeffs", c.coeffs, "build the model of H_1^lambda from coefficients (with --lambda)");
    scaling->add_option("--lambda", c.lambda, "power lambda for --coeffs");
    scaling->add_option("--factors", c.factors, "product mode: comma-separated factor measure files")
        ->delimiter(',');
    scaling->add_option("--tau", c.tau, "radius")->required();
    scaling->add_option("--rmax", c.rmax, "maximum number of generators");
    scaling->add_option("--samples", c.samples, "Monte Carlo sample count for gamma");
    scaling->add_option("--seed", c.seed, "random seed");
    add_output(scaling, c);

    auto* verify = app.add_subcommand("verify", "run the randomized invariant suite");
    verify->add_option("--seed", c.seed, "random seed");
    add_output(verify, c);

    auto* scan = app.add_subcommand("scan", "sweep eps or tau and emit one row per grid point");
    scan->add_option("target", c.action, "theorem1, cor-threshold, cor-logweight, optimize, concentration or esseen")
        ->required()
        ->check(CLI::IsMember({"theorem1", "cor-threshold", "cor-logweight", "optimize", "concentration", "esseen"}));
    add_inputs(scan, c);
    scan->add_option("--v-weights", c.v_weights, "weights for theorem1");
    scan->add_option("--measure", c.measure, "measure file for concentration");
    scan->add_option("--lambda", c.lambda, "H_1^lambda for concentration/esseen");
    scan->add_option("--sweep", c.sweep, "eps or tau")->required()->check(CLI::IsMember({"eps", "tau"}));
    scan->add_option("--grid", c.grid, "comma-separated values of the swept parameter")->required()->delimiter(',');
    scan->add_option("--eps", c.eps, "fixed eps");
    scan->add_option("--tau", c.tau, "fixed tau");
    scan->add_option("--delta", c.delta, "threshold for cor-threshold");
    scan->add_option("--delta-grid", c.delta_grid, "thresholds for optimize")->delimiter(',');
    scan->add_option("--method", c.method, "method of the underlying command");
    scan->add_option("--samples", c.samples, "Monte Carlo sample count");
    scan->add_option("--seed", c.seed, "random seed");
    add_quadrature(scan, c);
    scan->add_option("--format", c.format, "output format")->check(CLI::IsMember({"json", "csv"}));
    scan->add_option("--out", c.out, "output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() != 0) throw InvalidInputError(std::string("usage: ") + e.what());
        app.exit(e, out, out);  // help or version
        return std::nullopt;
    }

    for (auto* sub : app.get_subcommands()) {
        c.command = sub->get_name();
        for (auto* leaf : sub->get_subcommands()) c.action = leaf->get_name();
    }
    if (c.command == "scan" && c.format == "json" && !scan->count("--format")) c.format = "csv";
    return c;
}

}  // namespace anticonc::cli
