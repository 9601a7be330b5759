#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evadopt/survey.hpp"

namespace evadopt {

// Generator for survey exports with the same shape as the public EV survey,
// used for fixtures, tests and demos when the real data is not at hand.
struct SyntheticSurveySpec {
    std::vector<std::string> countries{"Germany", "Norway"};
    int respondents_per_country = 1500;
    double missing_band_rate = 0.02;   // rows dropped by the joint distribution
    double missing_answer_rate = 0.01; // "NA" on opinion items
    double dont_know_rate = 0.05;      // non-informative "6" on opinion items
};

/// CSV text (header + rows), byte-identical for equal seed and spec.
std::string synthetic_survey_csv(std::uint64_t seed, const SyntheticSurveySpec& spec = {});

/// Column mapping for synthetic_survey_csv. Also the shipped default schema.
SurveySchema default_schema();

}  // namespace evadopt
