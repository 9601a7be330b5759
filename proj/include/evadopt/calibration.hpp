#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "evadopt/model.hpp"
#include "evadopt/network.hpp"
#include "evadopt/survey.hpp"

namespace evadopt {

struct JointDistribution {
    Vector f;       // length 25, sums to 1
    Vector counts;  // respondents per community
    std::size_t counted = 0;
    std::size_t dropped = 0;  // rows with a missing or unmapped band
};

JointDistribution joint_distribution(const SurveyTable& table);

struct ProfileResult {
    std::vector<OpinionProfile> profiles;  // one per community, flat order
    Vector x0;
    std::vector<int> empty_communities;
};

/// Per-community item means after neutral recoding and reverse flipping,
/// min-max scaled per item across populated communities. An item whose
/// community means coincide scales to 0.5; an empty community gets the
/// neutral 0.5 profile and x0 = 0.5. Missing answers are left out of the
/// item means. Throws UnknownCode for values off the declared scale.
ProfileResult opinion_profiles(const SurveyTable& table);

/// Share of each community that drove an EV and explicitly does not want
/// one (denominator: every respondent of the community). Empty communities
/// get 0.
Vector estimate_delta(const SurveyTable& table);

/// Share of each community with an EV in the household (0 when empty).
Vector initial_adopters(const SurveyTable& table);

struct OpinionWeightSpec {
    double lambda_min = 0.3;
    double lambda_max = 0.6;
    double xi_min = 0.1;
    double xi_max = 0.35;
    double total_cap = 0.99;  // lambda + xi never exceeds this

    static OpinionWeightSpec from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct OpinionWeights {
    Vector lambda;
    Vector xi;
};

/// lambda_j ~ U[lambda_min, lambda_max], then
/// xi_j ~ U[xi_min, min(xi_max, total_cap - lambda_j)], all from one
/// mt19937_64 stream so results are identical across platforms.
OpinionWeights sample_opinion_weights(std::uint64_t seed, const OpinionWeightSpec& spec,
                                      int n = kCommunities);

struct CalibratedInputs {
    std::string country;
    std::size_t respondents = 0;  // usable rows (both bands present)
    std::size_t dropped = 0;
    Vector f;
    std::vector<OpinionProfile> profiles;
    Vector x0;
    Vector a0;
    Vector delta;
    std::vector<int> empty_communities;

    SystemState initial_state() const;

    nlohmann::json to_json() const;
    static CalibratedInputs from_json(const nlohmann::json& j);
};

CalibratedInputs calibrate(const SurveyTable& table, const std::string& country);

/// z-scored socio-demographic matrix over respondents that answered every
/// socio-demographic field. `rows` receives the kept row indices.
Matrix socio_demographic_matrix(const SurveyTable& table, std::vector<std::size_t>* rows = nullptr);

}  // namespace evadopt
