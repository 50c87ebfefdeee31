#include "anticonc_cli/cli.hpp"

#include "anticonc/bounds.hpp"
#include "anticonc/charfn.hpp"
#include "anticonc/concentration.hpp"
#include "anticonc/errors.hpp"
#include "anticonc/idiv.hpp"
#include "anticonc/io.hpp"
#include "anticonc/structure.hpp"
#include "format.hpp"
#include "verify.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>

namespace anticonc::cli {

namespace {

template <class T>
const T& need(const std::optional<T>& v, const char* flag) {
    if (!v) throw InvalidInputError(std::string("missing required option ") + flag);
    return *v;
}

CoefficientVector load_coeffs(const RunConfig& c) { return parse_coefficients(read_text_file(need(c.coeffs, "--coeffs"))); }

FiniteDiscreteMeasure load_x(const RunConfig& c) {
    const std::string& spec = need(c.x, "--x");
    if (spec == "rademacher") return rademacher();
    if (spec.rfind("gaussian", 0) == 0) {
        std::size_t k = 256;
        if (spec.size() > 8) {
            if (spec[8] != ':') throw InvalidInputError("--x gaussian takes the form gaussian:k");
            try {
                std::size_t used = 0;
                const long long v = std::stoll(spec.substr(9), &used);
                if (used != spec.size() - 9 || v < 1) throw InvalidInputError("");
                k = static_cast<std::size_t>(v);
            } catch (const std::exception&) {
                throw InvalidInputError("--x gaussian:k needs a positive integer k, got '" + spec + "'");
            }
        }
        return discretize_gaussian(k);
    }
    auto law = parse_measure(read_text_file(spec));
    if (law.dim() != 1) throw DimensionError("--x must be a law on R");
    if (law.kind() != MeasureKind::probability) throw InvalidMeasureError("--x must be a probability measure");
    return law;
}

FiniteDiscreteMeasure load_g(const RunConfig& c) {
    if (c.g) {
        auto g = parse_measure(read_text_file(*c.g));
        if (g.dim() != 1) throw DimensionError("--g must be a measure on R");
        return g;
    }
    if (c.x) return symmetrize(load_x(c));
    throw InvalidInputError("need --g or --x");
}

BatchSampler measure_sampler(FiniteDiscreteMeasure f) {
    auto law = std::make_shared<const FiniteDiscreteMeasure>(std::move(f));
    auto table = std::make_shared<const AliasTable>(law->masses());
    return [law, table](std::size_t n, std::uint64_t seed) {
        return sample_in_batches(law->dim(), n, seed, [&](CounterRng& rng, std::span<double> out) {
            const auto p = law->point((*table)(rng));
            std::copy(p.begin(), p.end(), out.begin());
        });
    };
}

Json quadrature_json(const QuadratureResult& q) {
    return Json{{"panels_per_axis", q.panels_per_axis},
                {"evaluations", q.evaluations},
                {"last_change", q.last_change},
                {"converged", q.converged}};
}

Json config_json(const RunConfig& c) {
    auto opt_str = [](const std::optional<std::string>& s) { return s ? Json(*s) : Json(nullptr); };
    return Json{{"command", c.command},
                {"action", c.action},
                {"coeffs", opt_str(c.coeffs)},
                {"x", opt_str(c.x)},
                {"g", opt_str(c.g)},
                {"v_weights", opt_str(c.v_weights)},
                {"measure", opt_str(c.measure)},
                {"factors", c.factors},
                {"tau", optional_real(c.tau)},
                {"eps", optional_real(c.eps)},
                {"delta", optional_real(c.delta)},
                {"lambda", optional_real(c.lambda)},
                {"alpha", optional_real(c.alpha)},
                {"delta_grid", c.delta_grid},
                {"rmax", c.rmax},
                {"method", c.method},
                {"seed", c.seed},
                {"samples", c.samples},
                {"sweep", c.sweep},
                {"grid", c.grid},
                {"format", c.format},
                {"out", opt_str(c.out)},
                {"quadrature",
                 {{"nodes_per_panel", c.quadrature.nodes_per_panel},
                  {"tolerance", c.quadrature.tolerance},
                  {"max_refinements", c.quadrature.max_refinements}}}};
}

// --- concentration -----------------------------------------------------------

std::string concentration_method(const RunConfig& c) {
    if (!c.method.empty()) return c.method;
    return c.lambda ? "mc" : "exact";
}

ConcentrationResult compute_concentration(const RunConfig& c) {
    const double tau = need(c.tau, "--tau");
    const std::string method = concentration_method(c);
    if (c.measure) {
        const auto f = parse_measure(read_text_file(*c.measure));
        if (method == "exact") return concentration_exact(f, tau);
        if (method == "mc") {
            if (f.kind() != MeasureKind::probability) throw InvalidMeasureError("Monte Carlo needs a probability measure");
            return concentration_mc(measure_sampler(f), tau, c.samples, c.seed);
        }
        throw InvalidInputError("--method dp needs --coeffs with --x rademacher");
    }
    const auto a = load_coeffs(c);
    if (c.lambda) {
        if (method != "mc") throw InvalidInputError("H_1^lambda has infinite support; use --method mc");
        return concentration_mc(compound_poisson_sampler(spectral_of_coefficients(a, *c.lambda)), tau, c.samples,
                                c.seed);
    }
    if (method == "dp") {
        if (need(c.x, "--x") != "rademacher") throw InvalidInputError("--method dp requires --x rademacher");
        return rademacher_sum_concentration(a, tau);
    }
    const auto x = load_x(c);
    if (method == "mc") return concentration_mc(weighted_sum_sampler(x, a), tau, c.samples, c.seed);
    return concentration_exact(weighted_sum_law(x, a), tau);
}

Json concentration_json(double tau, const ConcentrationResult& r) {
    return Json{{"tau", tau},
                {"value", r.value},
                {"method", to_string(r.method)},
                {"half_width", r.half_width},
                {"samples", r.samples}};
}

// --- esseen ------------------------------------------------------------------

EsseenResult compute_esseen(const RunConfig& c, CharFn* used = nullptr) {
    const auto a = load_coeffs(c);
    CharFn cf = c.lambda ? make_H_cf(a, 1.0, *c.lambda) : make_weighted_sum_cf(load_x(c), a);
    if (used) *used = cf;
    return esseen_functional(cf, need(c.tau, "--tau"), c.quadrature);
}

// --- bounds ------------------------------------------------------------------

BoundOptions bound_options(const RunConfig& c) {
    BoundOptions o;
    o.quadrature = c.quadrature;
    o.q_mode = c.method == "mc" ? QProxyMode::monte_carlo : QProxyMode::esseen;
    o.mc_samples = c.samples;
    o.seed = c.seed;
    return o;
}

std::vector<double> default_delta_grid(const FiniteDiscreteMeasure& g) {
    std::set<double> s;
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double z = std::abs(g.location(j));
        if (z > 0.0) s.insert(z);
    }
    return {s.begin(), s.end()};
}

Json bound_json(const BoundReport& r) {
    return Json{{"method", r.method},
                {"dim", r.dim},
                {"eps", r.eps},
                {"tau", r.tau},
                {"delta", optional_real(r.delta)},
                {"p_delta", optional_real(r.p_delta)},
                {"lambda", r.lambda},
                {"q_proxy", r.q_proxy},
                {"q_half_width", r.q_half_width},
                {"exponent", real_or_null(r.exponent_integral)},
                {"bounding_exponent", optional_real(r.bounding_exponent)},
                {"rhs", real_or_null(r.rhs)},
                {"infinite", r.infinite},
                {"quadrature", quadrature_json(r.quadrature)},
                {"notes", r.notes}};
}

std::vector<std::string> bound_csv_row(const BoundReport& r) {
    return {csv_cell(r.delta),         csv_cell(r.p_delta),       format_real(r.lambda),
            format_real(r.exponent_integral), format_real(r.q_proxy), format_real(r.rhs)};
}

const std::vector<std::string> kBoundColumns{"delta", "p_delta", "lambda", "exponent", "q_proxy", "rhs"};

BoundReport compute_bound(const RunConfig& c, const std::string& action) {
    const auto a = load_coeffs(c);
    const auto g = load_g(c);
    const double eps = need(c.eps, "--eps");
    const double tau = need(c.tau, "--tau");
    const auto opts = bound_options(c);
    if (action == "theorem1") {
        const auto w = parse_weights(read_text_file(need(c.v_weights, "--v-weights")));
        return theorem1_rhs(a, SubMeasureSpec(g, w), eps, tau, opts);
    }
    if (action == "cor-threshold") return corollary_threshold_rhs(a, g, need(c.delta, "--delta"), eps, tau, opts);
    if (action == "cor-logweight") return corollary_logweight_rhs(a, g, eps, tau, opts);
    if (action == "optimize") {
        const auto grid = c.delta_grid.empty() ? default_delta_grid(g) : c.delta_grid;
        return optimize_threshold(a, g, eps, tau, grid, opts).best;
    }
    throw InvalidInputError("unknown bound action '" + action + "'");
}

// --- structure ---------------------------------------------------------------

Json structure_json(const StructureReport& r) {
    Json gens = Json::array();
    for (std::size_t j = 0; j < r.generators.size(); ++j) {
        const auto u = r.generators[j];
        gens.push_back(std::vector<double>(u.begin(), u.end()));
    }
    return Json{{"mode", r.mode},
                {"r", r.r},
                {"generators", gens},
                {"deficit", r.deficit},
                {"uncovered", r.uncovered},
                {"deficit_history", r.deficit_history},
                {"pool_size", r.pool_size},
                {"gamma", optional_real(r.gamma)},
                {"gamma_half_width", r.gamma_half_width},
                {"ratio_r", optional_real(r.ratio_r)},
                {"ratio_deficit", optional_real(r.ratio_deficit)},
                {"notes", r.notes}};
}

CsvTable structure_csv(const StructureReport& r) {
    return CsvTable{{"r", "deficit", "gamma", "ratio_r", "ratio_deficit"},
                    {{std::to_string(r.r), format_real(r.deficit), csv_cell(r.gamma), csv_cell(r.ratio_r),
                      csv_cell(r.ratio_deficit)}}};
}

StructureReport compute_structure(const RunConfig& c) {
    const double tau = need(c.tau, "--tau");
    if (c.action == "search") {
        const auto m = parse_measure(read_text_file(need(c.measure, "--measure")));
        const SearchMode mode = c.method == "exact" ? SearchMode::exact : SearchMode::greedy;
        return search_generators(m, c.alpha.value_or(1.0), tau, c.rmax, mode, std::nullopt, c.seed);
    }
    if (!c.factors.empty()) {
        std::vector<FiniteDiscreteMeasure> factors;
        for (const auto& path : c.factors) factors.push_back(parse_measure(read_text_file(path)));
        return product_scaling_report(factors, tau, c.rmax, c.samples, c.seed);
    }
    if (c.coeffs) {
        const auto model = spectral_of_coefficients(load_coeffs(c), need(c.lambda, "--lambda"));
        return theorem_scaling_report(model, tau, c.rmax, c.samples, c.seed);
    }
    const std::string text = read_text_file(need(c.measure, "--measure"));
    const CompoundPoissonModel model =
        c.alpha ? CompoundPoissonModel(*c.alpha, parse_measure(text)) : parse_compound_poisson(text);
    return theorem_scaling_report(model, tau, c.rmax, c.samples, c.seed);
}

// --- output ------------------------------------------------------------------

void emit(const RunConfig& c, const Json& result, const CsvTable& table, std::ostream& out) {
    std::ofstream file;
    if (c.out) {
        file.open(*c.out, std::ios::binary);
        if (!file) throw InvalidInputError("cannot open output file '" + *c.out + "'");
    }
    std::ostream& os = c.out ? static_cast<std::ostream&>(file) : out;
    if (c.format == "csv") {
        os << "# config: " << config_json(c).dump() << '\n';
        table.write(os);
    } else {
        Json doc{{"command", c.command}, {"config", config_json(c)}, {"result", result}};
        os << doc.dump(2) << '\n';
    }
    if (c.out && !file) throw InvalidInputError("failed writing '" + *c.out + "'");
}

int run_scan(const RunConfig& c, std::ostream& out) {
    if ((c.action == "concentration" || c.action == "esseen") && c.sweep != "tau") {
        throw InvalidInputError("scan " + c.action + " sweeps tau only");
    }
    Json rows = Json::array();
    CsvTable table;
    const bool is_bound = c.action != "concentration" && c.action != "esseen";
    table.header = {"eps", "tau"};
    if (is_bound) {
        table.header.insert(table.header.end(), kBoundColumns.begin(), kBoundColumns.end());
    } else {
        table.header.insert(table.header.end(), {"value", "half_width"});
    }
    for (double v : c.grid) {
        RunConfig point = c;
        (c.sweep == "eps" ? point.eps : point.tau) = v;
        std::vector<std::string> row{csv_cell(point.eps), csv_cell(point.tau)};
        if (is_bound) {
            const auto r = compute_bound(point, c.action);
            const auto cells = bound_csv_row(r);
            row.insert(row.end(), cells.begin(), cells.end());
            rows.push_back(bound_json(r));
        } else if (c.action == "concentration") {
            const auto r = compute_concentration(point);
            row.push_back(format_real(r.value));
            row.push_back(format_real(r.half_width));
            rows.push_back(concentration_json(*point.tau, r));
        } else {
            const auto r = compute_esseen(point);
            row.push_back(format_real(r.value));
            row.push_back(format_real(0.0));
            rows.push_back(Json{{"tau", *point.tau}, {"value", r.value}, {"quadrature", quadrature_json(r.quadrature)}});
        }
        table.rows.push_back(std::move(row));
    }
    emit(c, Json{{"target", c.action}, {"rows", rows}}, table, out);
    return kExitOk;
}

int dispatch(const RunConfig& c, std::ostream& out) {
    if (c.command == "concentration") {
        const auto r = compute_concentration(c);
        emit(c, concentration_json(*c.tau, r),
             CsvTable{{"tau", "value", "half_width", "method", "samples"},
                      {{format_real(*c.tau), format_real(r.value), format_real(r.half_width), to_string(r.method),
                        std::to_string(r.samples)}}},
             out);
        return kExitOk;
    }
    if (c.command == "esseen") {
        CharFn cf;
        const auto r = compute_esseen(c, &cf);
        emit(c,
             Json{{"tau", *c.tau},
                  {"value", r.value},
                  {"dim", cf.dim},
                  {"nonnegative", cf.nonnegative},
                  {"quadrature", quadrature_json(r.quadrature)}},
             CsvTable{{"tau", "value", "panels_per_axis", "converged"},
                      {{format_real(*c.tau), format_real(r.value), std::to_string(r.quadrature.panels_per_axis),
                        r.quadrature.converged ? "true" : "false"}}},
             out);
        return kExitOk;
    }
    if (c.command == "bound") {
        if (c.action == "optimize") {
            const auto a = load_coeffs(c);
            const auto g = load_g(c);
            const auto grid = c.delta_grid.empty() ? default_delta_grid(g) : c.delta_grid;
            const auto s = optimize_threshold(a, g, need(c.eps, "--eps"), need(c.tau, "--tau"), grid, bound_options(c));
            Json rows = Json::array();
            CsvTable table{kBoundColumns, {}};
            for (const auto& row : s.table) {
                Json j = row.feasible ? bound_json(row.report) : Json{{"delta", optional_real(row.delta)}};
                j["feasible"] = row.feasible;
                rows.push_back(j);
                table.rows.push_back(row.feasible ? bound_csv_row(row.report)
                                                  : std::vector<std::string>{csv_cell(row.delta), "", "", "", "", ""});
            }
            emit(c, Json{{"best_row", s.best_row}, {"best_delta", optional_real(s.best_delta)}, {"best", bound_json(s.best)},
                         {"table", rows}},
                 table, out);
            return kExitOk;
        }
        const auto r = compute_bound(c, c.action);
        emit(c, bound_json(r), CsvTable{kBoundColumns, {bound_csv_row(r)}}, out);
        return kExitOk;
    }
    if (c.command == "structure") {
        const auto r = compute_structure(c);
        emit(c, structure_json(r), structure_csv(r), out);
        return kExitOk;
    }
    if (c.command == "verify") {
        const auto checks = run_invariant_suite(c.seed);
        std::size_t failed = 0;
        std::size_t trials = 0;
        Json list = Json::array();
        CsvTable table{{"check", "trials", "failures"}, {}};
        for (const auto& ch : checks) {
            failed += ch.failures > 0 ? 1 : 0;
            trials += ch.trials;
            list.push_back(Json{{"name", ch.name}, {"trials", ch.trials}, {"failures", ch.failures}});
            table.rows.push_back({ch.name, std::to_string(ch.trials), std::to_string(ch.failures)});
        }
        emit(c,
             Json{{"checks_passed", checks.size() - failed},
                  {"checks_failed", failed},
                  {"trials", trials},
                  {"checks", list}},
             table, out);
        return failed == 0 ? kExitOk : kExitVerifyFailed;
    }
    if (c.command == "scan") return run_scan(c, out);
    throw InvalidInputError("unknown command '" + c.command + "'");
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(config, out);
    } catch (const UnconvergedError& e) {
        err << "error: " << e.what() << '\n';
        RunConfig c = config;
        c.format = "json";
        try {
            emit(c,
                 Json{{"error", e.what()},
                      {"converged", false},
                      {"best_estimate", real_or_null(e.best_estimate())},
                      {"last_change", real_or_null(e.last_change())}},
                 CsvTable{}, out);
        } catch (const Error& nested) {
            err << "error: " << nested.what() << '\n';
        }
        return kExitUnconverged;
    } catch (const ParseError& e) {
        err << "error: malformed input at " << e.what() << '\n';
        return kExitInputError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::optional<RunConfig> config;
    try {
        config = parse_arguments(argc, argv, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    }
    if (!config) return kExitOk;
    return run(*config, out, err);
}

}  // namespace anticonc::cli
