#include <gtest/gtest.h>

#include "armamle/report.hpp"

using namespace armamle;

TEST(Report, FormatsNumbersRoundTrip) {
    EXPECT_EQ(report::fmt(0.1), "0.1");
    EXPECT_EQ(std::stod(report::fmt(1.0 / 3)), 1.0 / 3);
    EXPECT_EQ(report::fmt(NAN), "NA");
}

TEST(Report, FitJsonCarriesTraceAndStandardErrors) {
    FitResult fit;
    fit.order = ArmaOrder(1, 1, true);
    fit.params = {{0.5}, {0.2}, 1.5, 3.0};
    fit.loglik = -10.0;
    fit.aic = 28.0;
    fit.per_start_logliks = {-11.0, -10.0};
    fit.n_starts_used = 2;
    fit.best_start = 1;
    fit.se = std::vector<std::optional<double>>{0.1, std::nullopt, 0.3};
    const auto j = report::to_json(fit);
    EXPECT_EQ(j["params"]["mean"].get<double>(), 3.0);
    EXPECT_TRUE(j["se"][1].is_null());
    EXPECT_EQ(j["per_start_logliks"].size(), 2u);
    EXPECT_EQ(j["parameter_names"][2].get<std::string>(), "mean");
}

TEST(Report, StudyFilesRecomputeFromRows) {
    StudyConfig cfg;
    cfg.replicates = 4;
    const auto rep = run_improvement_study({{1, 1, 60}}, cfg);
    const auto files = report::render(rep);
    // One header plus one row per replicate.
    EXPECT_EQ(std::count(files.replicates_csv.begin(), files.replicates_csv.end(), '\n'), 5);
    int improved = 0;
    for (const auto& r : rep.records) improved += r.improved;
    EXPECT_EQ(files.summary["improved"].get<int>(), improved);
    EXPECT_TRUE(files.summary.contains("timing"));
}
