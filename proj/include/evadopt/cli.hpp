#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "evadopt/calibration.hpp"
#include "evadopt/control.hpp"
#include "evadopt/model.hpp"
#include "evadopt/stability.hpp"

namespace evadopt::cli {

inline constexpr int kSchemaVersion = 1;

/// A budget written either as an absolute number or as a multiple of the
/// community count ("n", "0.75n").
struct Budget {
    double value = 0.0;
    bool per_community = false;  // value is a multiple of n

    static Budget parse(const nlohmann::json& j);
    double resolve(std::size_t n) const { return per_community ? value * static_cast<double>(n) : value; }
    nlohmann::json to_json() const;
};

struct PolicySpec {
    ControlKind kind = ControlKind::None;
    AllocationRule rule = AllocationRule::SizeProportional;
    Budget budget;
};

struct RunConfig {
    std::filesystem::path survey_csv;
    std::filesystem::path schema;
    std::filesystem::path out_dir = "out";
    std::string country = "Germany";
    std::optional<std::uint64_t> seed;

    double beta = 0.01;
    double gamma = 0.02;
    std::vector<double> mobility{1, 2, 3, 4, 5};  // per mobility class
    InfluenceMode influence = InfluenceMode::Unweighted;
    OpinionWeightSpec weights;
    std::optional<Vector> delta_override;

    double cutoff = 0.9;
    double damping = 0.85;
    int k_min = 2;
    int k_max = 9;
    int restarts = 10;

    std::size_t horizon = 1000;
    double tolerance = 1e-10;
    bool per_community = false;

    // simulate: single policy
    PolicySpec policy;
    // compare: policy list
    std::vector<PolicySpec> policies;
    // sweep
    ControlKind sweep_kind = ControlKind::DissatisfactionReduction;
    std::vector<Budget> sweep_budgets;

    /// Paths inside `j` are taken relative to `base`. Missing survey/schema
    /// paths fall back to survey.csv/schema.json in `data_dir`.
    static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base,
                               const std::filesystem::path& data_dir);
    static RunConfig defaults(const std::filesystem::path& data_dir);

    /// Everything that influences results (output directory excluded).
    nlohmann::json to_json() const;
    std::string hash() const;
    std::filesystem::path run_dir() const;
};

/// Default comparison set: opinion shift at U = n and dissatisfaction
/// reduction at U = 0.75n, each under all four allocation rules.
std::vector<PolicySpec> default_policies();

/// Mobility index per class: "ordinal" (1..5) or "km_midpoint" (km band
/// midpoints / 5000).
std::vector<double> mobility_preset(const std::string& name);

/// Model assembled from calibrated inputs, sampled opinion weights and W.
CommunityModel build_model(const RunConfig& config, const CalibratedInputs& inputs,
                           const OpinionWeights& weights, const Matrix& W);

nlohmann::json report_to_json(const StabilityReport& report);

/// Structural check of a stability document; returns the problems found.
std::vector<std::string> validate_stability_json(const nlohmann::json& doc);

/// Entry point. args[0] is the program name. Returns the process exit code:
/// 0 success, 1 runtime/model error, 2 input/config error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace evadopt::cli
