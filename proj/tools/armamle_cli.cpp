// Command-line front end: fit, aic-table, profile, study, simulate.
//
// Exit codes: 0 success, 2 input error, 3 numerical failure.

#include <chrono>
#include <iomanip>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "armamle/inference.hpp"
#include "armamle/parallel.hpp"
#include "armamle/report.hpp"
#include "armamle/sim.hpp"
#include "io.hpp"

namespace {

using namespace armamle;
using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct FitOptions {
    int p = 0;
    int q = 0;
    bool mean = true;
    bool single = false;
    int M = 10;
    int max_starts = 200;
    double eps = 1e-5;
    std::uint64_t seed = SamplerConfig{}.seed;
    double alpha = SamplerConfig{}.alpha;
    double gamma = SamplerConfig{}.gamma;
    std::string method = "bfgs";
    int threads = default_threads();

    MultistartConfig config() const {
        MultistartConfig c;
        c.M = M;
        c.max_starts = max_starts;
        c.improvement_eps = eps;
        c.sampler.seed = seed;
        c.sampler.alpha = alpha;
        c.sampler.gamma = gamma;
        c.optimizer.method = method == "nelder-mead" ? OptimizerMethod::Simplex : OptimizerMethod::QuasiNewton;
        c.threads = threads;
        return c;
    }
    ArmaOrder order() const { return ArmaOrder(p, q, mean); }
};

void add_search_options(CLI::App* cmd, FitOptions& o) {
    cmd->add_flag("--mean,!--no-mean", o.mean, "Estimate a mean term (default on)");
    cmd->add_flag("--single,!--multistart", o.single, "Use only the CSS-initialized start");
    cmd->add_option("--M", o.M, "Stop after M consecutive non-improving starts")->check(CLI::PositiveNumber);
    cmd->add_option("--max-starts", o.max_starts, "Cap on starts, including the CSS start")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--improvement-eps", o.eps, "Minimum log-likelihood gain counted as improvement");
    cmd->add_option("--seed", o.seed, "Root sampler seed");
    cmd->add_option("--alpha", o.alpha, "Minimum AR/MA inverted-root distance");
    cmd->add_option("--gamma", o.gamma, "Inverted-root moduli lie in [gamma, 1 - gamma]");
    cmd->add_option("--method", o.method, "Local optimizer")->check(CLI::IsMember({"bfgs", "nelder-mead"}));
    cmd->add_option("--threads", o.threads, "Worker threads (default: ARMAMLE_THREADS)")
        ->check(CLI::PositiveNumber);
}

void add_order_options(CLI::App* cmd, FitOptions& o, bool required) {
    auto* p = cmd->add_option("-p,--p", o.p, "AR order")->check(CLI::Range(0, 20));
    auto* q = cmd->add_option("-q,--q", o.q, "MA order")->check(CLI::Range(0, 20));
    if (required) {
        p->required();
        q->required();
    }
}

json fit_options_json(const FitOptions& o) {
    json j = report::to_json(o.config());
    j["p"] = o.p;
    j["q"] = o.q;
    j["include_mean"] = o.mean;
    j["single"] = o.single;
    return j;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json envelope(const json& manifest) { return json{{"schema_version", report::kSchemaVersion}, {"manifest", manifest}}; }

void emit_json(const json& doc, const std::string& path) {
    const std::string text = doc.dump(2) + "\n";
    if (path.empty() || path == "-") {
        std::cout << text;
    } else {
        cli::write_file(path, text);
    }
}

FitResult run_fit(const TimeSeries& series, const FitOptions& o) {
    const MultistartConfig cfg = o.config();
    return o.single ? fit_single(series, o.order(), cfg) : fit_multistart(series, o.order(), cfg);
}

std::string coefficient_table(const FitResult& fit) {
    std::ostringstream out;
    const auto names = parameter_names(fit.order);
    const auto est = to_vector(fit.params, fit.order);
    out << "ARMA(" << fit.order.p << "," << fit.order.q << ")" << (fit.order.include_mean ? " with mean" : "")
        << "\n";
    out << std::left << std::setw(10) << "" << std::right << std::setw(12) << "Estimate" << std::setw(12) << "s.e."
        << '\n';
    out << std::fixed << std::setprecision(4);
    for (std::size_t i = 0; i < names.size(); ++i) {
        out << std::left << std::setw(10) << names[i] << std::right << std::setw(12) << est[i];
        const bool has = fit.se && (*fit.se)[i];
        if (has) {
            out << std::setw(12) << *(*fit.se)[i];
        } else {
            out << std::setw(12) << "NA";
        }
        out << '\n';
    }
    out << "sigma2 " << fit.params.sigma2 << "  loglik " << fit.loglik << "  aic " << fit.aic << "  starts "
        << fit.n_starts_used << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------

struct FitCommand {
    std::string input;
    std::string json_out;
    bool skip_se = false;
    FitOptions o;

    void setup(CLI::App& app) {
        auto* cmd = app.add_subcommand("fit", "Fit an ARMA(p,q) model by maximum likelihood");
        cmd->add_option("input", input, "CSV series")->required();
        add_order_options(cmd, o, true);
        add_search_options(cmd, o);
        cmd->add_option("--json", json_out, "Write JSON here (default: stdout)");
        cmd->add_flag("--no-se", skip_se, "Skip Fisher standard errors");
        cmd->callback([this] { run(); });
    }

    void run() {
        const auto t0 = std::chrono::steady_clock::now();
        const auto csv = cli::read_series_csv(input);
        const TimeSeries series = cli::to_series(csv);
        FitResult fit = run_fit(series, o);
        json doc;
        std::optional<FisherResult> fisher;
        if (!skip_se) {
            fisher = fisher_se(fit, series);
            fit.se = fisher->se;
        }
        doc = envelope(cli::make_manifest("fit", fit_options_json(o), o.seed, csv.digest, seconds_since(t0)));
        doc["fit"] = report::to_json(fit);
        if (fisher) doc["fisher"] = report::to_json(*fisher, fit.order);
        emit_json(doc, json_out);
        if (!json_out.empty() && json_out != "-") {
            std::cout << coefficient_table(fit);
            if (fisher) {
                for (const auto& w : fisher->warnings) std::cout << "warning: " << w << '\n';
            }
        }
    }
};

struct AicTableCommand {
    std::string input;
    std::string json_out;
    int max_p = 3;
    int max_q = 3;
    FitOptions o;

    void setup(CLI::App& app) {
        auto* cmd = app.add_subcommand("aic-table", "AIC over a grid of orders with nesting diagnostics");
        cmd->add_option("input", input, "CSV series")->required();
        cmd->add_option("--max-p", max_p, "Largest AR order")->check(CLI::Range(0, kMaxTableOrder));
        cmd->add_option("--max-q", max_q, "Largest MA order")->check(CLI::Range(0, kMaxTableOrder));
        add_search_options(cmd, o);
        cmd->add_option("--json", json_out, "Also write the table as JSON");
        cmd->callback([this] { run(); });
    }

    void run() {
        const auto t0 = std::chrono::steady_clock::now();
        const auto csv = cli::read_series_csv(input);
        const TimeSeries series = cli::to_series(csv);
        const AicTable table = build_aic_table(series, max_p, max_q, o.mean, o.config(),
                                               o.single ? FitArm::Single : FitArm::Multistart);
        std::cout << render_aic_table(table);
        if (table.consistent()) {
            std::cout << "table is consistent\n";
        } else {
            std::cout << table.inconsistencies.size() << " nested violation(s); implicated cells marked *\n";
        }
        if (!json_out.empty()) {
            json cfg = fit_options_json(o);
            cfg["max_p"] = max_p;
            cfg["max_q"] = max_q;
            json doc = envelope(cli::make_manifest("aic-table", cfg, o.seed, csv.digest, seconds_since(t0)));
            doc["table"] = report::to_json(table);
            emit_json(doc, json_out);
        }
    }
};

struct ProfileCommand {
    std::string input;
    std::string param;
    std::string out;
    std::string json_out;
    double level = 0.95;
    int points = 41;
    FitOptions o;

    void setup(CLI::App& app) {
        auto* cmd = app.add_subcommand("profile", "Profile-likelihood interval for one parameter");
        cmd->add_option("input", input, "CSV series")->required();
        add_order_options(cmd, o, true);
        add_search_options(cmd, o);
        cmd->add_option("--param", param, "Parameter name, e.g. phi1, theta1, mean")->required();
        cmd->add_option("--level", level, "Confidence level")->check(CLI::Range(0.5, 0.9999));
        cmd->add_option("--points", points, "Initial grid size")->check(CLI::Range(5, 1001));
        cmd->add_option("--out", out, "Curve CSV (default: stdout)");
        cmd->add_option("--json", json_out, "Write the interval and curve as JSON");
        cmd->callback([this] { run(); });
    }

    void run() {
        const auto t0 = std::chrono::steady_clock::now();
        const auto csv = cli::read_series_csv(input);
        const TimeSeries series = cli::to_series(csv);
        const auto id = parameter_index(o.order(), param);
        if (!id) throw cli::InputError("unknown parameter '" + param + "' for this order");
        FitResult fit = fit_multistart(series, o.order(), o.config());
        fit.se = fisher_se(fit, series).se;
        ProfileConfig pc;
        pc.level = level;
        pc.min_points = points;
        const ProfileCurve curve = profile_ci(series, fit, *id, pc, o.config());

        json cfg = fit_options_json(o);
        cfg["param"] = param;
        cfg["level"] = level;
        cfg["points"] = points;
        const json manifest = cli::make_manifest("profile", cfg, o.seed, csv.digest, seconds_since(t0));
        const std::string text = cli::manifest_comment(manifest) + report::profile_csv(curve);
        if (out.empty() || out == "-") {
            std::cout << text;
        } else {
            cli::write_file(out, text);
        }
        if (!json_out.empty()) {
            json doc = envelope(manifest);
            doc["profile"] = report::to_json(curve);
            emit_json(doc, json_out);
        }
        std::cerr << std::setprecision(6) << curve.parameter_name << " " << level * 100 << "% interval ["
                  << curve.ci_low << (curve.lower_open ? " (open)" : "") << ", " << curve.ci_high
                  << (curve.upper_open ? " (open)" : "") << "]\n";
    }
};

// "p=1,2;q=1;n=50,100;M=1,3,10" -> key -> integer list.
std::map<std::string, std::vector<int>> parse_grid(const std::string& text) {
    std::map<std::string, std::vector<int>> out;
    std::istringstream in(text);
    std::string part;
    while (std::getline(in, part, ';')) {
        if (part.find_first_not_of(" ") == std::string::npos) continue;
        const auto eq = part.find('=');
        if (eq == std::string::npos) throw cli::InputError("grid entry '" + part + "' is not key=values");
        std::string key = part.substr(0, eq);
        key.erase(0, key.find_first_not_of(' '));
        key.erase(key.find_last_not_of(' ') + 1);
        if (key != "p" && key != "q" && key != "n" && key != "M") {
            throw cli::InputError("unknown grid key '" + key + "'");
        }
        auto values = cli::parse_int_list(part.substr(eq + 1));
        if (values.empty()) throw cli::InputError("grid key '" + key + "' has no values");
        out[key] = std::move(values);
    }
    return out;
}

std::vector<int> grid_or(const std::map<std::string, std::vector<int>>& g, const std::string& key,
                         std::vector<int> fallback) {
    const auto it = g.find(key);
    return it == g.end() ? fallback : it->second;
}

ArmaOrder parse_order(const std::string& text, bool mean) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw cli::InputError("order '" + text + "' is not p:q");
    const auto p = cli::parse_int_list(text.substr(0, colon));
    const auto q = cli::parse_int_list(text.substr(colon + 1));
    if (p.size() != 1 || q.size() != 1 || p[0] < 0 || q[0] < 0) {
        throw cli::InputError("order '" + text + "' is not p:q");
    }
    return ArmaOrder(p[0], q[0], mean);
}

struct StudyCommand {
    std::string kind;
    std::string grid;
    std::string out_dir;
    std::string input;
    std::string models = "1:0,2:1";
    std::string refit = "2:1";
    int replicates = 100;
    std::uint64_t seed = 20240101;
    int points = 41;
    FitOptions o;

    void setup(CLI::App& app) {
        auto* cmd = app.add_subcommand("study", "Run a simulation study and write its report files");
        cmd->add_option("kind", kind, "improvement | coverage | consistency | bootstrap")
            ->required()
            ->check(CLI::IsMember({"improvement", "coverage", "consistency", "bootstrap"}));
        cmd->add_option("--grid", grid, "Grid, e.g. \"p=1,2,3;q=1,2,3;n=50,100\" or \"M=1,3,10;n=100\"");
        cmd->add_option("--replicates", replicates, "Replicates per cell")->check(CLI::NonNegativeNumber);
        cmd->add_option("--seed", seed, "Study seed");
        cmd->add_option("--out", out_dir, "Output directory")->required();
        cmd->add_option("--input", input, "Series to fit (bootstrap)");
        cmd->add_option("--models", models, "Orders fitted to --input and simulated from (bootstrap)");
        cmd->add_option("--refit", refit, "Order refitted to each simulated series (bootstrap)");
        cmd->add_option("--profile-points", points, "Profile grid size (coverage)")->check(CLI::Range(5, 1001));
        cmd->add_option("--M", o.M, "Stopping window for fits")->check(CLI::PositiveNumber);
        cmd->add_option("--max-starts", o.max_starts, "Cap on starts per fit")->check(CLI::PositiveNumber);
        cmd->add_flag("--mean,!--no-mean", o.mean, "Mean term in bootstrap fits (default on)");
        cmd->add_option("--threads", o.threads, "Worker threads (default: ARMAMLE_THREADS)")
            ->check(CLI::PositiveNumber);
        cmd->callback([this] { run(); });
    }

    StudyConfig study_config() const {
        StudyConfig sc;
        sc.replicates = replicates;
        sc.seed = seed;
        sc.fit = o.config();
        sc.fit.threads = 1;
        sc.threads = o.threads;
        return sc;
    }

    void write(const report::StudyFiles& files, const json& cfg, const std::string& digest,
               std::chrono::steady_clock::time_point t0) {
        fs::create_directories(out_dir);
        const json manifest = cli::make_manifest("study " + kind, cfg, seed, digest, seconds_since(t0));
        const std::string comment = cli::manifest_comment(manifest);
        cli::write_file((fs::path(out_dir) / "replicates.csv").string(), comment + files.replicates_csv);
        cli::write_file((fs::path(out_dir) / "figure.csv").string(), comment + files.figure_csv);
        json summary = envelope(manifest);
        summary["summary"] = files.summary;
        cli::write_file((fs::path(out_dir) / "summary.json").string(), summary.dump(2) + "\n");
        cli::write_file((fs::path(out_dir) / "manifest.json").string(), envelope(manifest).dump(2) + "\n");
        std::cout << files.figure_csv;
    }

    void run() {
        const auto t0 = std::chrono::steady_clock::now();
        const auto g = parse_grid(grid);
        json cfg{{"kind", kind}, {"grid", grid}, {"replicates", replicates}, {"fit", report::to_json(o.config())}};
        const StudyConfig sc = study_config();

        if (kind == "improvement") {
            std::vector<ImprovementCellSpec> cells;
            for (int p : grid_or(g, "p", {1, 2, 3})) {
                for (int q : grid_or(g, "q", {1, 2, 3})) {
                    for (int n : grid_or(g, "n", {50, 100, 500, 1000})) cells.push_back({p, q, n});
                }
            }
            check_cells(cells.size());
            write(report::render(run_improvement_study(cells, sc)), cfg, "", t0);
        } else if (kind == "coverage") {
            std::vector<CoverageCellSpec> cells;
            for (int n : grid_or(g, "n", {50, 500})) {
                cells.push_back({"ar1", ArmaOrder(1, 0), ArmaParams{{0.7}, {}, 1.0, 0.0}, n});
                cells.push_back({"arma21", ArmaOrder(2, 1), ArmaParams{{0.6, -0.3}, {0.4}, 1.0, 0.0}, n});
            }
            CoverageConfig cc;
            cc.study = sc;
            cc.profile.min_points = points;
            cfg["profile_points"] = points;
            write(report::render(run_coverage_study(cells, cc)), cfg, "", t0);
        } else if (kind == "consistency") {
            ConsistencyConfig cc;
            cc.study = sc;
            cc.windows = grid_or(g, "M", {1, 3, 10});
            const auto ns = grid_or(g, "n", {100});
            if (ns.size() != 1) throw cli::InputError("consistency takes a single n");
            cc.n = ns[0];
            const auto ps = grid_or(g, "p", {2});
            const auto qs = grid_or(g, "q", {1});
            if (ps.size() != 1 || qs.size() != 1) throw cli::InputError("consistency takes one generator order");
            cc.generator = ArmaOrder(ps[0], qs[0], false);
            write(report::render(run_consistency_study(cc)), cfg, "", t0);
        } else {
            if (input.empty()) throw cli::InputError("bootstrap needs --input");
            const auto csv = cli::read_series_csv(input);
            const TimeSeries series = cli::to_series(csv);
            std::vector<BootstrapModel> list;
            std::istringstream in(models);
            std::string item;
            while (std::getline(in, item, ',')) {
                const ArmaOrder order = parse_order(item, o.mean);
                const FitResult fit = fit_multistart(series, order, o.config());
                list.push_back({"ARMA(" + std::to_string(order.p) + "," + std::to_string(order.q) + ")", order,
                                fit.params});
            }
            BootstrapConfig bc;
            bc.study = sc;
            bc.n = static_cast<int>(series.size());
            bc.refit = parse_order(refit, o.mean);
            cfg["models"] = models;
            cfg["refit"] = refit;
            write(report::render(run_bootstrap_refit(list, bc)), cfg, csv.digest, t0);
        }
    }

    static void check_cells(std::size_t n) {
        if (n == 0) throw cli::InputError("empty study grid");
    }
};

struct SimulateCommand {
    int p = 0;
    int q = 0;
    std::string phi;
    std::string theta;
    double sigma2 = 1.0;
    double mean = 0.0;
    int n = 100;
    int burn_in = 1000;
    std::uint64_t seed = 1;
    std::string out;

    void setup(CLI::App& app) {
        auto* cmd = app.add_subcommand("simulate", "Simulate a Gaussian ARMA series as CSV");
        cmd->add_option("-p,--p", p, "AR order")->required()->check(CLI::Range(0, 20));
        cmd->add_option("-q,--q", q, "MA order")->required()->check(CLI::Range(0, 20));
        cmd->add_option("--phi", phi, "AR coefficients, comma separated");
        cmd->add_option("--theta", theta, "MA coefficients, comma separated");
        cmd->add_option("--sigma2", sigma2, "Innovation variance");
        cmd->add_option("--mean", mean, "Process mean");
        cmd->add_option("--n", n, "Length")->check(CLI::PositiveNumber);
        cmd->add_option("--burn-in", burn_in, "Discarded leading values")->check(CLI::NonNegativeNumber);
        cmd->add_option("--seed", seed, "Random seed");
        cmd->add_option("--out", out, "Output CSV (default: stdout)");
        cmd->callback([this] { run(); });
    }

    void run() {
        const auto t0 = std::chrono::steady_clock::now();
        GeneratorSpec spec;
        spec.order = ArmaOrder(p, q, false);
        spec.params.phi = cli::parse_double_list(phi);
        spec.params.theta = cli::parse_double_list(theta);
        spec.params.sigma2 = sigma2;
        spec.params.mean = mean;
        spec.n = n;
        spec.burn_in = burn_in;
        spec.seed = seed;
        if (static_cast<int>(spec.params.phi.size()) != p || static_cast<int>(spec.params.theta.size()) != q) {
            throw cli::InputError("--phi/--theta lengths must equal p and q");
        }
        if (!validate_params(spec.params, spec.order).ok()) {
            throw cli::InputError("parameters are not causal, invertible and positive-variance");
        }
        const TimeSeries series = simulate(spec);
        json cfg{{"p", p},       {"q", q},         {"phi", spec.params.phi}, {"theta", spec.params.theta},
                 {"sigma2", sigma2}, {"mean", mean}, {"n", n},                 {"burn_in", burn_in}};
        std::ostringstream text;
        text << cli::manifest_comment(cli::make_manifest("simulate", cfg, seed, "", seconds_since(t0)));
        text << "value\n";
        for (double v : series.values()) text << report::fmt(v) << '\n';
        if (out.empty() || out == "-") {
            std::cout << text.str();
        } else {
            cli::write_file(out, text.str());
        }
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian ARMA maximum likelihood with multi-start initialization"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(cli::tool_version()));
    FitCommand fit;
    AicTableCommand table;
    ProfileCommand profile;
    StudyCommand study;
    SimulateCommand sim;
    fit.setup(app);
    table.setup(app);
    profile.setup(app);
    study.setup(app);
    sim.setup(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitInput;
    } catch (const cli::InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitInput;
    } catch (const PreconditionError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitInput;
    } catch (const DimensionError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitInput;
    } catch (const InvalidSeriesError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
    return 0;
}
