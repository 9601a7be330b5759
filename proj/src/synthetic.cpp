#include "evadopt/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "evadopt/io.hpp"

namespace evadopt {

namespace {

const std::array<std::string, 5> kAgeLabels{"18-24", "25-34", "35-44", "45-54", "55+"};
const std::array<std::string, 5> kKmLabels{"<5000", "5000-9999", "10000-19999", "20000-29999", "30000+"};
const std::array<std::string, 5> kEducationLabels{"primary", "secondary", "vocational", "bachelor", "master"};

struct Item {
    const char* column;
    bool reverse;
    double loading;
};

const std::array<Item, 6> kItems{{{"op_costs", false, 1.0},
                                  {"op_range", false, 0.8},
                                  {"op_boring", true, 0.6},
                                  {"op_environment", false, 1.2},
                                  {"op_charging_hassle", true, 0.9},
                                  {"op_status", false, 0.5}}};

class Draw {
public:
    explicit Draw(std::uint64_t seed) : rng_(seed) {}
    double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
    bool chance(double p) { return unit() < p; }
    double normal() {
        // Box-Muller, one value per call keeps the stream simple to reason about.
        const double u1 = 1.0 - unit();
        const double u2 = unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    int pick(const std::array<double, 5>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double t = unit() * total;
        for (int i = 0; i < 5; ++i) {
            t -= weights[static_cast<std::size_t>(i)];
            if (t < 0.0) return i;
        }
        return 4;
    }

private:
    std::mt19937_64 rng_;
};

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::string likert(double latent, Draw& draw) {
    const long v = std::lround(3.0 + latent + 0.8 * draw.normal());
    return std::to_string(std::clamp<long>(v, 1, 5));
}

}  // namespace

std::string synthetic_survey_csv(std::uint64_t seed, const SyntheticSurveySpec& spec) {
    Draw draw(seed);
    std::ostringstream os;
    io::Row header{"respondent_id", "country", "age", "education", "political", "annual_km",
                   "ev_household", "drove_ev", "wants_ev", "reward_ev"};
    for (const auto& item : kItems) header.emplace_back(item.column);
    io::write_csv_row(os, header);

    int id = 0;
    for (std::size_t c = 0; c < spec.countries.size(); ++c) {
        const double country_shift = 0.3 * static_cast<double>(c);
        for (int r = 0; r < spec.respondents_per_country; ++r) {
            const int age = draw.pick({0.12, 0.2, 0.22, 0.24, 0.22});
            // Mileage peaks in working ages.
            const double working = (age >= 1 && age <= 3) ? 1.0 : 0.0;
            const int km = draw.pick({0.18, 0.22, 0.3 + 0.1 * working, 0.18 + 0.05 * working, 0.1});
            const int education = draw.pick({0.08, 0.3, 0.25, 0.22, 0.15});
            const int political = std::clamp(static_cast<int>(std::lround(5.5 + 2.0 * draw.normal())), 1, 10);

            const double attitude = 0.45 - 0.25 * age + 0.12 * km + 0.15 * (education - 2) -
                                    0.08 * (political - 5.5) + country_shift + 0.7 * draw.normal();

            io::Row row;
            row.push_back(std::to_string(++id));
            row.push_back(spec.countries[c]);
            row.push_back(draw.chance(spec.missing_band_rate) ? "NA" : kAgeLabels[static_cast<std::size_t>(age)]);
            row.push_back(kEducationLabels[static_cast<std::size_t>(education)]);
            row.push_back(std::to_string(political));
            row.push_back(draw.chance(spec.missing_band_rate) ? "" : kKmLabels[static_cast<std::size_t>(km)]);

            const bool household = draw.chance(logistic(-1.6 + 0.9 * attitude + 0.1 * km));
            const bool drove = household || draw.chance(logistic(-0.8 + 0.3 * attitude));
            row.push_back(household ? "Yes" : "No");
            row.push_back(drove ? "Yes" : "No");
            const double want = logistic(0.4 + 1.3 * attitude);
            row.push_back(draw.chance(0.06) ? "Don't know" : (draw.chance(want) ? "Yes" : "No"));
            row.push_back(likert(0.9 * attitude, draw));

            for (const auto& item : kItems) {
                const double u = draw.unit();
                if (u < spec.missing_answer_rate) {
                    row.push_back("NA");
                } else if (u < spec.missing_answer_rate + spec.dont_know_rate) {
                    row.push_back("6");
                } else {
                    const double latent = item.loading * attitude;
                    row.push_back(likert(item.reverse ? -latent : latent, draw));
                }
            }
            io::write_csv_row(os, row);
        }
    }
    return os.str();
}

SurveySchema default_schema() {
    SurveySchema s;
    s.country_column = "country";
    s.missing_codes = {"", "NA"};
    auto bands = [](const std::array<std::string, 5>& labels) {
        std::map<std::string, double> codes;
        for (std::size_t i = 0; i < labels.size(); ++i) codes[labels[i]] = static_cast<double>(i + 1);
        return codes;
    };
    s.fields[field::kAgeBand] = {"age", bands(kAgeLabels), {}, {}};
    s.fields[field::kAnnualKmBand] = {"annual_km", bands(kKmLabels), {}, {}};
    s.fields["education"] = {"education", bands(kEducationLabels), {}, {}};
    s.fields["political_orientation"] = {"political", {}, {}, {}};
    s.fields[field::kEvInHousehold] = {"ev_household", {}, {"Yes"}, {}};
    s.fields[field::kDroveEvBefore] = {"drove_ev", {}, {"Yes"}, {}};
    s.fields[field::kWantsEvFuture] = {"wants_ev", {}, {"Yes"}, {"No"}};
    s.fields[field::kRewardStatement] = {"reward_ev", {}, {"4", "5"}, {}};
    for (const auto& item : kItems) s.opinion_items.push_back({item.column, item.reverse, 1.0, 5.0, {"6"}});
    s.socio_demographic = {field::kAgeBand, "education", "political_orientation"};
    return s;
}

}  // namespace evadopt
