#include "evadopt/calibration.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <limits>
#include <random>

#include "evadopt/clustering.hpp"
#include "evadopt/errors.hpp"
#include "evadopt/io.hpp"

namespace evadopt {

namespace {

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Respondents per community, with row indices grouped by community.
std::vector<std::vector<std::size_t>> members(const SurveyTable& table) {
    std::vector<std::vector<std::size_t>> groups(kCommunities);
    for (std::size_t r = 0; r < table.size(); ++r)
        if (auto c = table.community(r)) groups[static_cast<std::size_t>(c->flat_id)].push_back(r);
    return groups;
}

Vector community_share(const SurveyTable& table,
                       const std::function<bool(std::size_t)>& counts_as_yes) {
    const auto groups = members(table);
    Vector share = Vector::Zero(kCommunities);
    for (std::size_t j = 0; j < groups.size(); ++j) {
        if (groups[j].empty()) continue;
        const auto yes = std::count_if(groups[j].begin(), groups[j].end(), counts_as_yes);
        share[static_cast<Eigen::Index>(j)] = static_cast<double>(yes) / static_cast<double>(groups[j].size());
    }
    return share;
}

double item_value(const OpinionItemSpec& item, const std::string& raw, std::size_t row) {
    const double mid = 0.5 * (item.min + item.max);
    if (std::find(item.non_informative.begin(), item.non_informative.end(), raw) != item.non_informative.end())
        return mid;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
    if (ec != std::errc() || ptr != raw.data() + raw.size() || v < item.min || v > item.max)
        throw UnknownCode("record " + std::to_string(row + 1) + ", column '" + item.column +
                          "': value '" + raw + "' is off the declared scale");
    return item.reverse ? item.min + item.max - v : v;
}

}  // namespace

JointDistribution joint_distribution(const SurveyTable& table) {
    JointDistribution jd;
    jd.counts = Vector::Zero(kCommunities);
    for (std::size_t r = 0; r < table.size(); ++r) {
        if (auto c = table.community(r)) {
            jd.counts[c->flat_id] += 1.0;
            ++jd.counted;
        } else {
            ++jd.dropped;
        }
    }
    if (jd.counted == 0) throw EmptySelection("no record has both an age and a mileage band");
    jd.f = jd.counts / static_cast<double>(jd.counted);
    return jd;
}

ProfileResult opinion_profiles(const SurveyTable& table) {
    const auto& items = table.schema().opinion_items;
    const auto k = static_cast<Eigen::Index>(items.size());
    const auto groups = members(table);

    Matrix means = Matrix::Constant(kCommunities, k, 0.0);
    for (std::size_t j = 0; j < groups.size(); ++j) {
        for (Eigen::Index q = 0; q < k; ++q) {
            const auto& item = items[static_cast<std::size_t>(q)];
            double sum = 0.0;
            int answered = 0;
            for (std::size_t r : groups[j]) {
                const auto& cell = table.cell(r, item.column);
                if (!cell) continue;
                sum += item_value(item, *cell, r);
                ++answered;
            }
            means(static_cast<Eigen::Index>(j), q) = answered ? sum / answered : 0.5 * (item.min + item.max);
        }
    }

    ProfileResult out;
    std::vector<Eigen::Index> populated;
    for (std::size_t j = 0; j < groups.size(); ++j) {
        if (groups[j].empty()) out.empty_communities.push_back(static_cast<int>(j));
        else populated.push_back(static_cast<Eigen::Index>(j));
    }

    Matrix scaled = Matrix::Constant(kCommunities, k, 0.5);
    for (Eigen::Index q = 0; q < k; ++q) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (auto j : populated) {
            lo = std::min(lo, means(j, q));
            hi = std::max(hi, means(j, q));
        }
        if (populated.empty() || hi - lo <= 0.0) continue;
        for (auto j : populated) scaled(j, q) = (means(j, q) - lo) / (hi - lo);
    }

    for (int j = 0; j < kCommunities; ++j)
        out.profiles.push_back({CommunityIndex::from_flat(j), scaled.row(j).transpose()});

    out.x0 = community_share(table, [&](std::size_t r) { return table.positive(r, field::kRewardStatement); });
    for (int j : out.empty_communities) out.x0[j] = 0.5;
    return out;
}

Vector estimate_delta(const SurveyTable& table) {
    return community_share(table, [&](std::size_t r) {
        return table.positive(r, field::kDroveEvBefore) && table.negative(r, field::kWantsEvFuture);
    });
}

Vector initial_adopters(const SurveyTable& table) {
    return community_share(table, [&](std::size_t r) { return table.positive(r, field::kEvInHousehold); });
}

OpinionWeightSpec OpinionWeightSpec::from_json(const nlohmann::json& j) {
    OpinionWeightSpec s;
    s.lambda_min = j.value("lambda_min", s.lambda_min);
    s.lambda_max = j.value("lambda_max", s.lambda_max);
    s.xi_min = j.value("xi_min", s.xi_min);
    s.xi_max = j.value("xi_max", s.xi_max);
    s.total_cap = j.value("total_cap", s.total_cap);
    if (!(0.0 <= s.lambda_min && s.lambda_min <= s.lambda_max && 0.0 <= s.xi_min && s.xi_min <= s.xi_max &&
          s.total_cap < 1.0 && s.lambda_max <= s.total_cap))
        throw ConfigError("opinion weight ranges must satisfy 0 <= min <= max and lambda_max <= total_cap < 1");
    return s;
}

nlohmann::json OpinionWeightSpec::to_json() const {
    return {{"lambda_min", lambda_min}, {"lambda_max", lambda_max}, {"xi_min", xi_min},
            {"xi_max", xi_max},         {"total_cap", total_cap}};
}

OpinionWeights sample_opinion_weights(std::uint64_t seed, const OpinionWeightSpec& spec, int n) {
    std::mt19937_64 rng(seed);
    OpinionWeights w{Vector(n), Vector(n)};
    for (int j = 0; j < n; ++j) {
        const double lambda = spec.lambda_min + unit(rng) * (spec.lambda_max - spec.lambda_min);
        const double upper = std::min(spec.xi_max, spec.total_cap - lambda);
        const double lower = std::min(spec.xi_min, upper);
        w.lambda[j] = lambda;
        w.xi[j] = lower + unit(rng) * (upper - lower);
    }
    return w;
}

SystemState CalibratedInputs::initial_state() const {
    return SystemState::from(a0, Vector::Zero(a0.size()), x0);
}

nlohmann::json CalibratedInputs::to_json() const {
    nlohmann::json profs = nlohmann::json::array();
    for (const auto& p : profiles)
        profs.push_back({{"flat_id", p.community.flat_id},
                         {"mobility_class", p.community.mobility_class},
                         {"age_class", p.community.age_class},
                         {"values", io::to_json(p.values)}});
    return {{"country", country},
            {"respondents", respondents},
            {"dropped", dropped},
            {"f", io::to_json(f)},
            {"x0", io::to_json(x0)},
            {"a0", io::to_json(a0)},
            {"delta", io::to_json(delta)},
            {"empty_communities", empty_communities},
            {"profiles", profs}};
}

CalibratedInputs CalibratedInputs::from_json(const nlohmann::json& j) {
    CalibratedInputs c;
    try {
        c.country = j.at("country").get<std::string>();
        c.respondents = j.at("respondents").get<std::size_t>();
        c.dropped = j.at("dropped").get<std::size_t>();
        c.f = io::vector_from_json(j.at("f"));
        c.x0 = io::vector_from_json(j.at("x0"));
        c.a0 = io::vector_from_json(j.at("a0"));
        c.delta = io::vector_from_json(j.at("delta"));
        c.empty_communities = j.at("empty_communities").get<std::vector<int>>();
        for (const auto& p : j.at("profiles"))
            c.profiles.push_back({CommunityIndex::from_flat(p.at("flat_id").get<int>()),
                                  io::vector_from_json(p.at("values"))});
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed calibrated inputs: ") + e.what());
    }
    const auto n = c.f.size();
    if (c.x0.size() != n || c.a0.size() != n || c.delta.size() != n ||
        c.profiles.size() != static_cast<std::size_t>(n))
        throw InputError("calibrated inputs have inconsistent lengths");
    return c;
}

CalibratedInputs calibrate(const SurveyTable& table, const std::string& country) {
    CalibratedInputs c;
    c.country = country;
    const JointDistribution jd = joint_distribution(table);
    c.respondents = jd.counted;
    c.dropped = jd.dropped;
    c.f = jd.f;
    ProfileResult pr = opinion_profiles(table);
    c.profiles = std::move(pr.profiles);
    c.x0 = std::move(pr.x0);
    c.empty_communities = std::move(pr.empty_communities);
    c.a0 = initial_adopters(table);
    c.delta = estimate_delta(table);
    return c;
}

Matrix socio_demographic_matrix(const SurveyTable& table, std::vector<std::size_t>* rows) {
    const auto& names = table.schema().socio_demographic;
    if (names.empty()) throw SchemaMismatch("schema lists no socio-demographic fields");
    std::vector<std::vector<double>> kept;
    std::vector<std::size_t> idx;
    for (std::size_t r = 0; r < table.size(); ++r) {
        std::vector<double> v;
        for (const auto& name : names) {
            auto x = table.numeric(r, name);
            if (!x) break;
            v.push_back(*x);
        }
        if (v.size() != names.size()) continue;
        kept.push_back(std::move(v));
        idx.push_back(r);
    }
    Matrix m(static_cast<Eigen::Index>(kept.size()), static_cast<Eigen::Index>(names.size()));
    for (std::size_t i = 0; i < kept.size(); ++i)
        for (std::size_t q = 0; q < names.size(); ++q)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(q)) = kept[i][q];
    if (rows) *rows = std::move(idx);
    return standardize_columns(m);
}

}  // namespace evadopt
