#include "armamle/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace armamle::report {

std::string fmt(double v) {
    if (std::isnan(v)) return "NA";
    if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

// JSON has no NaN/Inf; they become null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json num_vec(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

json opt_vec(const std::vector<std::optional<double>>& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(x ? num(*x) : json(nullptr));
    return a;
}

json order_pair(const std::pair<int, int>& pq) { return json::array({pq.first, pq.second}); }

const char* status(bool ok) { return ok ? "ok" : "failed"; }

// Error messages go into a quoted CSV field.
std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + '"';
}

json study_json(const StudyConfig& cfg) {
    return json{{"replicates", cfg.replicates}, {"seed", cfg.seed}, {"fit", to_json(cfg.fit)}};
}

}  // namespace

json to_json(const ArmaOrder& order) {
    return json{{"p", order.p}, {"q", order.q}, {"include_mean", order.include_mean}};
}

json to_json(const ArmaParams& params, const ArmaOrder& order) {
    json j{{"phi", num_vec(params.phi)}, {"theta", num_vec(params.theta)}, {"sigma2", num(params.sigma2)}};
    if (order.include_mean) j["mean"] = num(params.mean);
    return j;
}

json to_json(const FitResult& fit) {
    json j{{"order", to_json(fit.order)},
           {"params", to_json(fit.params, fit.order)},
           {"parameter_names", parameter_names(fit.order)},
           {"loglik", num(fit.loglik)},
           {"aic", num(fit.aic)},
           {"converged", fit.converged},
           {"n_starts_used", fit.n_starts_used},
           {"best_start", fit.best_start},
           {"css_fallback", fit.css_fallback},
           {"per_start_logliks", num_vec(fit.per_start_logliks)}};
    j["estimates"] = num_vec(to_vector(fit.params, fit.order));
    j["se"] = fit.se ? opt_vec(*fit.se) : json(nullptr);
    return j;
}

json to_json(const FisherResult& fisher, const ArmaOrder& order) {
    json info = json::array();
    for (Eigen::Index i = 0; i < fisher.information.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < fisher.information.cols(); ++k) row.push_back(num(fisher.information(i, k)));
        info.push_back(row);
    }
    return json{{"parameter_names", parameter_names(order)},
                {"se", opt_vec(fisher.se)},
                {"singular", fisher.singular},
                {"boundary", fisher.boundary},
                {"warnings", fisher.warnings},
                {"information", info}};
}

json to_json(const AicTable& table) {
    json cells = json::array();
    for (const auto& c : table.cells) {
        json cell{{"p", c.p}, {"q", c.q}, {"implicated", table.implicated(c.p, c.q)}};
        if (c.fit) {
            cell["aic"] = num(c.fit->aic);
            cell["loglik"] = num(c.fit->loglik);
            cell["n_starts_used"] = c.fit->n_starts_used;
        } else {
            cell["aic"] = nullptr;
            cell["loglik"] = nullptr;
            cell["error"] = c.error;
        }
        cells.push_back(cell);
    }
    json viol = json::array();
    for (const auto& v : table.inconsistencies) {
        viol.push_back(json{{"smaller", order_pair(v.smaller)},
                            {"larger", order_pair(v.larger)},
                            {"loglik_gap", num(v.loglik_gap)}});
    }
    json j{{"max_p", table.max_p},       {"max_q", table.max_q},          {"include_mean", table.include_mean},
           {"cells", cells},             {"consistent", table.consistent()}, {"inconsistencies", viol}};
    const auto best = table.best();
    j["best"] = best ? order_pair(*best) : json(nullptr);
    return j;
}

json to_json(const ProfileCurve& curve) {
    return json{{"parameter", curve.parameter_name},
                {"parameter_index", curve.parameter_id},
                {"mle", num(curve.mle_value)},
                {"mle_loglik", num(curve.mle_loglik)},
                {"cutoff", num(curve.cutoff)},
                {"ci_low", num(curve.ci_low)},
                {"ci_high", num(curve.ci_high)},
                {"lower_open", curve.lower_open},
                {"upper_open", curve.upper_open},
                {"dropped_points", curve.dropped_points},
                {"grid", num_vec(curve.grid)},
                {"profile_loglik", num_vec(curve.profile_loglik)}};
}

std::string profile_csv(const ProfileCurve& curve) {
    std::ostringstream out;
    out << curve.parameter_name << ",profile_loglik\n";
    for (std::size_t i = 0; i < curve.grid.size(); ++i) {
        out << fmt(curve.grid[i]) << ',' << fmt(curve.profile_loglik[i]) << '\n';
    }
    return out.str();
}

json to_json(const MultistartConfig& cfg) {
    return json{{"M", cfg.M},
                {"max_starts", cfg.max_starts},
                {"improvement_eps", cfg.improvement_eps},
                {"sampler",
                 {{"alpha", cfg.sampler.alpha},
                  {"p_real", cfg.sampler.p_real},
                  {"same_sign_prob", cfg.sampler.same_sign_prob},
                  {"gamma", cfg.sampler.gamma},
                  {"seed", cfg.sampler.seed}}},
                {"optimizer",
                 {{"method", method_name(cfg.optimizer.method)},
                  {"max_iters", cfg.optimizer.max_iters},
                  {"grad_step", cfg.optimizer.grad_step},
                  {"tol", cfg.optimizer.tol}}}};
}

// ---------------------------------------------------------------------------

StudyFiles render(const ImprovementReport& rep) {
    StudyFiles f;
    std::ostringstream rows;
    rows << "cell,p,q,n,replicate,status,loglik_single,loglik_multi,delta,improved,n_starts,error\n";
    for (const auto& r : rep.records) {
        const auto& c = rep.cells[r.cell];
        rows << r.cell << ',' << c.p << ',' << c.q << ',' << c.n << ',' << r.replicate << ',' << status(r.ok)
             << ',' << fmt(r.ok ? r.loglik_single : NAN) << ',' << fmt(r.ok ? r.loglik_multi : NAN) << ','
             << fmt(r.ok ? r.delta : NAN) << ',' << (r.improved ? 1 : 0) << ',' << r.n_starts << ','
             << quoted(r.error) << '\n';
    }
    f.replicates_csv = rows.str();

    std::ostringstream fig;
    fig << "p,q,n,replicates,excluded,improved,proportion,delta_q25,delta_median,delta_q75\n";
    json cells = json::array();
    int total = 0, improved = 0, excluded = 0;
    for (const auto& s : rep.summary) {
        fig << s.spec.p << ',' << s.spec.q << ',' << s.spec.n << ',' << s.replicates << ',' << s.excluded << ','
            << s.improved << ',' << fmt(s.proportion) << ',' << fmt(s.delta_q25) << ',' << fmt(s.delta_median)
            << ',' << fmt(s.delta_q75) << '\n';
        cells.push_back(json{{"p", s.spec.p},
                             {"q", s.spec.q},
                             {"n", s.spec.n},
                             {"replicates", s.replicates},
                             {"excluded", s.excluded},
                             {"improved", s.improved},
                             {"proportion", num(s.proportion)},
                             {"delta_quantiles", {num(s.delta_q25), num(s.delta_median), num(s.delta_q75)}}});
        total += s.replicates;
        improved += s.improved;
        excluded += s.excluded;
    }
    f.figure_csv = fig.str();
    f.summary = json{{"study", "improvement"},
                     {"config", study_json(rep.config)},
                     {"include_mean", false},
                     {"improvement_threshold", rep.config.fit.improvement_eps},
                     {"cells", cells},
                     {"replicates", total},
                     {"excluded", excluded},
                     {"improved", improved},
                     {"proportion", num(total ? static_cast<double>(improved) / total : NAN)},
                     {"timing", {{"seconds", rep.seconds}}}};
    return f;
}

StudyFiles render(const CoverageReport& rep) {
    StudyFiles f;
    std::ostringstream rows;
    rows << "cell,label,n,replicate,status,loglik,fisher_available,fisher_covered,profile_available,"
            "profile_covered,error\n";
    for (const auto& r : rep.records) {
        const auto& c = rep.cells[r.cell];
        rows << r.cell << ',' << c.label << ',' << c.n << ',' << r.replicate << ',' << status(r.ok) << ','
             << fmt(r.ok ? r.loglik : NAN) << ',' << r.fisher_available << ',' << r.fisher_covered << ','
             << r.profile_available << ',' << r.profile_covered << ',' << quoted(r.error) << '\n';
    }
    f.replicates_csv = rows.str();

    std::ostringstream fig;
    fig << "label,p,q,n,method,coverage,mcse,replicates,unavailable\n";
    json cells = json::array();
    for (const auto& s : rep.summary) {
        const auto& o = s.spec.order;
        fig << s.spec.label << ',' << o.p << ',' << o.q << ',' << s.spec.n << ",fisher," << fmt(s.fisher_coverage)
            << ',' << fmt(s.fisher_mcse) << ',' << s.replicates << ',' << s.fisher_unavailable << '\n';
        fig << s.spec.label << ',' << o.p << ',' << o.q << ',' << s.spec.n << ",profile,"
            << fmt(s.profile_coverage) << ',' << fmt(s.profile_mcse) << ',' << s.replicates << ','
            << s.profile_unavailable << '\n';
        cells.push_back(json{{"label", s.spec.label},
                             {"order", to_json(o)},
                             {"truth", to_json(s.spec.truth, o)},
                             {"n", s.spec.n},
                             {"replicates", s.replicates},
                             {"excluded", s.excluded},
                             {"fisher", {{"coverage", num(s.fisher_coverage)},
                                         {"mcse", num(s.fisher_mcse)},
                                         {"unavailable", s.fisher_unavailable}}},
                             {"profile", {{"coverage", num(s.profile_coverage)},
                                          {"mcse", num(s.profile_mcse)},
                                          {"unavailable", s.profile_unavailable}}}});
    }
    f.figure_csv = fig.str();
    f.summary = json{{"study", "coverage"},
                     {"config", study_json(rep.config.study)},
                     {"level", rep.config.level},
                     {"adjustment", "bonferroni"},
                     {"coverage", "joint"},
                     {"profile_points", rep.config.profile.min_points},
                     {"cells", cells},
                     {"timing", {{"seconds", rep.seconds}}}};
    return f;
}

StudyFiles render(const ConsistencyReport& rep) {
    StudyFiles f;
    const auto& windows = rep.config.windows;
    std::ostringstream rows;
    rows << "replicate,status,M,consistent,violations,error\n";
    for (const auto& r : rep.records) {
        if (!r.ok) {
            rows << r.replicate << ",failed,NA,NA,NA," << quoted(r.error) << '\n';
            continue;
        }
        for (std::size_t w = 0; w < windows.size(); ++w) {
            rows << r.replicate << ",ok," << windows[w] << ',' << (r.consistent[w] ? 1 : 0) << ','
                 << r.violations[w] << ",\"\"\n";
        }
    }
    f.replicates_csv = rows.str();

    std::ostringstream fig;
    fig << "M,consistent_proportion,replicates\n";
    const int used = static_cast<int>(rep.records.size()) - rep.excluded;
    json curve = json::array();
    for (std::size_t w = 0; w < windows.size(); ++w) {
        fig << windows[w] << ',' << fmt(rep.consistent_proportion[w]) << ',' << used << '\n';
        curve.push_back(json{{"M", windows[w]}, {"consistent_proportion", num(rep.consistent_proportion[w])}});
    }
    f.figure_csv = fig.str();
    f.summary = json{{"study", "consistency"},
                     {"config", study_json(rep.config.study)},
                     {"generator", to_json(rep.config.generator)},
                     {"n", rep.config.n},
                     {"max_p", rep.config.max_p},
                     {"max_q", rep.config.max_q},
                     {"baseline", "M=1 is the single-start fit"},
                     {"curve", curve},
                     {"replicates", used},
                     {"excluded", rep.excluded},
                     {"timing", {{"seconds", rep.seconds}}}};
    return f;
}

StudyFiles render(const BootstrapReport& rep) {
    StudyFiles f;
    const auto names = parameter_names(rep.config.refit);
    std::ostringstream rows;
    rows << "model,replicate,status,loglik";
    for (const auto& n : names) rows << ',' << n;
    rows << ",error\n";
    for (const auto& r : rep.records) {
        rows << rep.models[r.model].label << ',' << r.replicate << ',' << status(r.ok) << ','
             << fmt(r.ok ? r.loglik : NAN);
        for (std::size_t j = 0; j < names.size(); ++j) rows << ',' << fmt(r.ok ? r.estimates[j] : NAN);
        rows << ',' << quoted(r.error) << '\n';
    }
    f.replicates_csv = rows.str();

    std::ostringstream fig;
    fig << "model,parameter,bin_low,bin_high,count\n";
    for (const auto& h : rep.histograms) {
        for (std::size_t b = 0; b < h.counts.size(); ++b) {
            fig << h.model << ',' << h.parameter << ',' << fmt(h.edges[b]) << ',' << fmt(h.edges[b + 1]) << ','
                << h.counts[b] << '\n';
        }
    }
    f.figure_csv = fig.str();

    json models = json::array();
    for (const auto& m : rep.models) {
        models.push_back(json{{"label", m.label}, {"order", to_json(m.order)}, {"params", to_json(m.params, m.order)}});
    }
    int failed = 0;
    for (const auto& r : rep.records) failed += !r.ok;
    f.summary = json{{"study", "bootstrap"},
                     {"config", study_json(rep.config.study)},
                     {"n", rep.config.n},
                     {"refit", to_json(rep.config.refit)},
                     {"models", models},
                     {"records", static_cast<int>(rep.records.size())},
                     {"excluded", failed},
                     {"timing", {{"seconds", rep.seconds}}}};
    return f;
}

}  // namespace armamle::report
