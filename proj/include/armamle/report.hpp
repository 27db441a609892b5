#pragma once

#include "json.hpp"
#include <string>

#include "armamle/inference.hpp"
#include "armamle/sim.hpp"

namespace armamle::report {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

json to_json(const ArmaOrder& order);
json to_json(const ArmaParams& params, const ArmaOrder& order);
json to_json(const FitResult& fit);
json to_json(const FisherResult& fisher, const ArmaOrder& order);
json to_json(const AicTable& table);
json to_json(const ProfileCurve& curve);

/// Profile curve as `value,profile_loglik` rows.
std::string profile_csv(const ProfileCurve& curve);

/// Files produced by a study: one row per replicate, a JSON summary and the
/// tidy per-cell data behind the corresponding figure. Wall-clock times are
/// kept under summary["timing"] so the rest is reproducible byte for byte.
struct StudyFiles {
    std::string replicates_csv;
    std::string figure_csv;
    json summary;
};

StudyFiles render(const ImprovementReport& rep);
StudyFiles render(const CoverageReport& rep);
StudyFiles render(const ConsistencyReport& rep);
StudyFiles render(const BootstrapReport& rep);

json to_json(const MultistartConfig& cfg);

/// Shortest round-trip decimal text for a double ("NA" for NaN).
std::string fmt(double v);

}  // namespace armamle::report
