#include "evadopt/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"

#include "evadopt/clustering.hpp"
#include "evadopt/errors.hpp"
#include "evadopt/io.hpp"
#include "evadopt/network.hpp"
#include "evadopt/survey.hpp"

namespace evadopt::cli {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// configuration

Budget Budget::parse(const json& j) {
    if (j.is_number()) {
        Budget b{j.get<double>(), false};
        if (!(b.value >= 0.0)) throw ConfigError("budget must be non-negative");
        return b;
    }
    if (!j.is_string()) throw ConfigError("budget must be a number or a string like \"0.75n\"");
    std::string text = j.get<std::string>();
    Budget b;
    if (!text.empty() && text.back() == 'n') {
        b.per_community = true;
        text.pop_back();
        if (!text.empty() && text.back() == '*') text.pop_back();
        if (text.empty()) text = "1";
    }
    try {
        std::size_t used = 0;
        b.value = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
        throw ConfigError("cannot parse budget '" + j.get<std::string>() + "'");
    }
    if (!(b.value >= 0.0)) throw ConfigError("budget must be non-negative");
    return b;
}

json Budget::to_json() const {
    if (!per_community) return value;
    return io::format_double(value) + "n";
}

std::vector<PolicySpec> default_policies() {
    std::vector<PolicySpec> out;
    const AllocationRule rules[] = {AllocationRule::SizeProportional, AllocationRule::MobilityWeighted,
                                    AllocationRule::InDegree, AllocationRule::PageRank};
    for (auto r : rules) out.push_back({ControlKind::OpinionShift, r, {1.0, true}});
    for (auto r : rules) out.push_back({ControlKind::DissatisfactionReduction, r, {0.75, true}});
    return out;
}

std::vector<double> mobility_preset(const std::string& name) {
    if (name == "ordinal") return {1, 2, 3, 4, 5};
    if (name == "km_midpoint") return {0.5, 1.5, 3.0, 5.0, 7.0};
    throw ConfigError("unknown mobility preset '" + name + "' (ordinal, km_midpoint)");
}

namespace {

PolicySpec policy_from_json(const json& j) {
    PolicySpec p;
    p.kind = control_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("rule")) p.rule = allocation_rule_from_string(j.at("rule").get<std::string>());
    if (j.contains("budget")) p.budget = Budget::parse(j.at("budget"));
    return p;
}

json policy_to_json(const PolicySpec& p) {
    return {{"kind", to_string(p.kind)}, {"rule", to_string(p.rule)}, {"budget", p.budget.to_json()}};
}

fs::path resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return (path.is_absolute() ? path : base / path).lexically_normal();
}

}  // namespace

RunConfig RunConfig::defaults(const fs::path& data_dir) {
    RunConfig c;
    c.survey_csv = (data_dir / "survey.csv").lexically_normal();
    c.schema = (data_dir / "schema.json").lexically_normal();
    c.policies = default_policies();
    for (double v : {0.0, 0.25, 0.5, 0.75, 1.0}) c.sweep_budgets.push_back({v, true});
    return c;
}

RunConfig RunConfig::from_json(const json& j, const fs::path& base, const fs::path& data_dir) {
    RunConfig c = defaults(data_dir);
    try {
        if (j.contains("survey_csv")) c.survey_csv = resolve(base, j.at("survey_csv").get<std::string>());
        if (j.contains("schema")) c.schema = resolve(base, j.at("schema").get<std::string>());
        if (j.contains("out_dir")) c.out_dir = resolve(base, j.at("out_dir").get<std::string>());
        c.country = j.value("country", c.country);
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();

        if (j.contains("model")) {
            const json& m = j.at("model");
            c.beta = m.value("beta", c.beta);
            c.gamma = m.value("gamma", c.gamma);
            if (m.contains("mobility")) {
                const json& mob = m.at("mobility");
                c.mobility = mob.is_string() ? mobility_preset(mob.get<std::string>())
                                             : mob.get<std::vector<double>>();
                if (c.mobility.size() != static_cast<std::size_t>(kMobilityClasses))
                    throw ConfigError("mobility needs one value per mobility class");
            }
            if (m.contains("influence"))
                c.influence = influence_mode_from_string(m.at("influence").get<std::string>());
            if (m.contains("opinion_weights")) c.weights = OpinionWeightSpec::from_json(m.at("opinion_weights"));
            if (m.contains("delta")) {
                const json& d = m.at("delta");
                c.delta_override = d.is_number() ? Vector::Constant(kCommunities, d.get<double>())
                                                 : io::vector_from_json(d);
            }
        }
        if (j.contains("network")) {
            c.cutoff = j.at("network").value("cutoff", c.cutoff);
            c.damping = j.at("network").value("damping", c.damping);
        }
        if (j.contains("clustering")) {
            const json& k = j.at("clustering");
            c.k_min = k.value("k_min", c.k_min);
            c.k_max = k.value("k_max", c.k_max);
            c.restarts = k.value("restarts", c.restarts);
        }
        if (j.contains("simulation")) {
            const json& s = j.at("simulation");
            c.horizon = s.value("horizon", c.horizon);
            c.tolerance = s.value("tolerance", c.tolerance);
            c.per_community = s.value("per_community", c.per_community);
            if (s.contains("policy")) c.policy = policy_from_json(s.at("policy"));
        }
        if (j.contains("policies")) {
            c.policies.clear();
            for (const auto& p : j.at("policies")) c.policies.push_back(policy_from_json(p));
        }
        if (j.contains("sweep")) {
            const json& s = j.at("sweep");
            if (s.contains("kind")) c.sweep_kind = control_kind_from_string(s.at("kind").get<std::string>());
            if (s.contains("budgets")) {
                c.sweep_budgets.clear();
                for (const auto& b : s.at("budgets")) c.sweep_budgets.push_back(Budget::parse(b));
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    if (!(c.tolerance >= 0.0)) throw ConfigError("tolerance must be non-negative");
    if (!(c.cutoff > 0.0)) throw ConfigError("network cutoff must be positive");
    return c;
}

json RunConfig::to_json() const {
    json policies_json = json::array();
    for (const auto& p : policies) policies_json.push_back(policy_to_json(p));
    json budgets = json::array();
    for (const auto& b : sweep_budgets) budgets.push_back(b.to_json());
    json model = {{"beta", beta},
                  {"gamma", gamma},
                  {"mobility", mobility},
                  {"influence", to_string(influence)},
                  {"opinion_weights", weights.to_json()}};
    if (delta_override) model["delta"] = io::to_json(*delta_override);
    return {{"survey_csv", survey_csv.generic_string()},
            {"schema", schema.generic_string()},
            {"country", country},
            {"seed", seed ? json(*seed) : json(nullptr)},
            {"model", model},
            {"network", {{"cutoff", cutoff}, {"damping", damping}}},
            {"clustering", {{"k_min", k_min}, {"k_max", k_max}, {"restarts", restarts}}},
            {"simulation",
             {{"horizon", horizon}, {"tolerance", tolerance}, {"per_community", per_community},
              {"policy", policy_to_json(policy)}}},
            {"policies", policies_json},
            {"sweep", {{"kind", to_string(sweep_kind)}, {"budgets", budgets}}}};
}

std::string RunConfig::hash() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(io::fnv1a(to_json().dump())));
    return buf;
}

fs::path RunConfig::run_dir() const { return out_dir / ("run-" + hash()); }

CommunityModel build_model(const RunConfig& config, const CalibratedInputs& inputs, const OpinionWeights& weights,
                           const Matrix& W) {
    const auto n = inputs.f.size();
    ModelParameters p;
    p.f = inputs.f;
    p.m = Vector(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto idx = CommunityIndex::from_flat(static_cast<int>(j));
        p.m[j] = config.mobility.at(static_cast<std::size_t>(idx.mobility_class - 1));
    }
    p.beta = config.beta;
    p.gamma = config.gamma;
    p.delta = config.delta_override ? *config.delta_override : inputs.delta;
    p.lambda = weights.lambda;
    p.xi = weights.xi;
    p.W = W;
    p.influence = config.influence;
    return CommunityModel(std::move(p));
}

// ---------------------------------------------------------------------------
// reports

namespace {

json certificate_to_json(const StabilityCertificate& c) {
    return {{"nu", c.nu},
            {"eta", c.eta},
            {"phi", c.phi},
            {"b_sup", c.b_sup},
            {"G", {{c.G(0, 0), c.G(0, 1)}, {c.G(1, 0), c.G(1, 1)}}},
            {"rho_G", c.rho_G},
            {"certified", c.certified}};
}

json equilibrium_to_json(const DiffusedEquilibrium& e) {
    return {{"a", io::to_json(e.a)},
            {"d", io::to_json(e.d)},
            {"x", io::to_json(e.x)},
            {"residual", e.residual},
            {"fj_consistency", e.fj_consistency},
            {"steps", e.steps},
            {"seed_disagreement", e.seed_disagreement},
            {"notes", e.notes}};
}

}  // namespace

json report_to_json(const StabilityReport& r) {
    return {{"classification", to_string(r.classification)},
            {"r0_at_xstar", r.r0_at_xstar},
            {"r0_max", r.r0_max},
            {"r0_min", r.r0_min},
            {"assumption1_holds", r.assumption1_holds},
            {"opinion_headroom", r.opinion_headroom},
            {"x_star", io::to_json(r.x_star)},
            {"x_bar", io::to_json(r.bounds.x_bar)},
            {"x_under", io::to_json(r.bounds.x_under)},
            {"diffused", r.diffused ? equilibrium_to_json(*r.diffused) : json(nullptr)},
            {"certificate", r.certificate ? certificate_to_json(*r.certificate) : json(nullptr)},
            {"diffused_error", r.diffused_error ? json(*r.diffused_error) : json(nullptr)}};
}

std::vector<std::string> validate_stability_json(const json& doc) {
    std::vector<std::string> problems;
    auto need = [&](const json& obj, const std::string& key, auto check, const char* kind) {
        if (!obj.contains(key)) problems.push_back("missing '" + key + "'");
        else if (!check(obj.at(key))) problems.push_back("'" + key + "' is not " + kind);
    };
    auto number = [](const json& v) { return v.is_number(); };
    auto boolean = [](const json& v) { return v.is_boolean(); };
    auto vec = [](const json& v) {
        return v.is_array() && std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number(); });
    };
    auto nullable_obj = [](const json& v) { return v.is_null() || v.is_object(); };

    if (!doc.is_object()) return {"document is not an object"};
    need(doc, "schema_version", [](const json& v) { return v.is_number_integer() && v.get<int>() == kSchemaVersion; },
         "the supported schema version");
    need(doc, "classification", [](const json& v) {
        return v.is_string() && (v == "GloballyStableAdoptionFree" || v == "LocallyStableAdoptionFree" ||
                                 v == "UnstableAdoptionFree" || v == "Indeterminate");
    }, "a known class");
    for (const char* k : {"r0_at_xstar", "r0_max", "r0_min"}) need(doc, k, number, "a number");
    for (const char* k : {"assumption1_holds", "opinion_headroom"}) need(doc, k, boolean, "a boolean");
    for (const char* k : {"x_star", "x_bar", "x_under"}) need(doc, k, vec, "a numeric array");
    need(doc, "diffused", nullable_obj, "an object or null");
    need(doc, "certificate", nullable_obj, "an object or null");
    if (doc.contains("diffused") && doc["diffused"].is_object()) {
        for (const char* k : {"a", "d", "x"}) need(doc["diffused"], k, vec, "a numeric array");
        need(doc["diffused"], "residual", number, "a number");
    }
    if (doc.contains("certificate") && doc["certificate"].is_object()) {
        for (const char* k : {"nu", "eta", "phi", "b_sup", "rho_G"}) need(doc["certificate"], k, number, "a number");
        need(doc["certificate"], "certified", boolean, "a boolean");
    }
    return problems;
}

// ---------------------------------------------------------------------------
// commands

namespace {

json document(const RunConfig& config) {
    return {{"schema_version", kSchemaVersion}, {"config_hash", config.hash()}};
}

std::uint64_t require_seed(const RunConfig& config) {
    if (!config.seed) throw ConfigError("a seed is required (config key 'seed' or --seed)");
    return *config.seed;
}

struct Prepared {
    CalibratedInputs inputs;
    OpinionWeights weights;
    Matrix W;
    std::optional<CommunityModel> model;
    std::optional<std::string> model_error;
};

std::string trace_csv(const Trace& trace, bool per_community) {
    std::ostringstream os;
    io::Row header{"t", "susceptible", "adopters", "dissatisfied", "mean_opinion"};
    const auto n = trace.states.front().a.size();
    if (per_community)
        for (const char* comp : {"s", "a", "d", "x"})
            for (Eigen::Index j = 0; j < n; ++j) header.push_back(std::string(comp) + "_" + std::to_string(j));
    io::write_csv_row(os, header);
    for (std::size_t t = 0; t < trace.states.size(); ++t) {
        const Aggregate& g = trace.aggregates[t];
        io::Row row{std::to_string(t), io::format_double(g.susceptible), io::format_double(g.adopters),
                    io::format_double(g.dissatisfied), io::format_double(g.mean_opinion)};
        if (per_community) {
            const SystemState& s = trace.states[t];
            for (const Vector* v : {&s.s, &s.a, &s.d, &s.x})
                for (Eigen::Index j = 0; j < n; ++j) row.push_back(io::format_double((*v)[j]));
        }
        io::write_csv_row(os, row);
    }
    return os.str();
}

std::optional<std::size_t> convergence_step(const Trace& trace, double tolerance) {
    for (std::size_t t = 1; t < trace.states.size(); ++t)
        if (state_distance(trace.states[t], trace.states[t - 1]) < tolerance) return t;
    return std::nullopt;
}

json aggregate_json(const Aggregate& g) {
    return {{"susceptible", g.susceptible},
            {"adopters", g.adopters},
            {"dissatisfied", g.dissatisfied},
            {"mean_opinion", g.mean_opinion}};
}

ControlPolicy resolve_policy(const PolicySpec& spec, std::size_t n) {
    return {spec.kind, spec.rule, spec.budget.resolve(n)};
}

class Runner {
public:
    Runner(RunConfig config, std::ostream& out) : config_(std::move(config)), out_(out), dir_(config_.run_dir()) {}

    void pipeline();
    void analyze();
    void simulate();
    void compare();
    void sweep();

    const std::string& stage() const { return stage_; }

private:
    const Prepared& prepared();
    const CommunityModel& model();

    RunConfig config_;
    std::ostream& out_;
    fs::path dir_;
    std::string stage_ = "startup";
    std::optional<Prepared> prepared_;
};

void Runner::pipeline() {
    const std::uint64_t seed = require_seed(config_);

    stage_ = "loading schema " + config_.schema.string();
    const SurveySchema schema = SurveySchema::load(config_.schema);
    stage_ = "reading survey " + config_.survey_csv.string();
    if (!fs::exists(config_.survey_csv)) throw InputError("survey file not found: " + config_.survey_csv.string());
    const SurveyTable table = ingest(config_.survey_csv, schema, config_.country);

    stage_ = "calibrating " + config_.country;
    CalibratedInputs inputs = calibrate(table, config_.country);

    stage_ = "clustering socio-demographic answers";
    std::ostringstream clusters;
    io::write_csv_row(clusters, {"k", "wcss", "silhouette"});
    json clustering = {{"k_min", config_.k_min}, {"k_max", config_.k_max}, {"restarts", config_.restarts}};
    if (!schema.socio_demographic.empty()) {
        std::vector<std::size_t> rows;
        const Matrix data = socio_demographic_matrix(table, &rows);
        clustering["respondents"] = rows.size();
        double best = -2.0;
        json errors = json::array();
        for (int k = config_.k_min; k <= config_.k_max; ++k) {
            try {
                const KMeansResult km = kmeans(data, k, seed, config_.restarts);
                const double s = silhouette(data, km.assignments);
                io::write_csv_row(clusters, {std::to_string(k), io::format_double(km.wcss), io::format_double(s)});
                if (s > best) {
                    best = s;
                    clustering["best_k"] = k;
                }
            } catch (const Error& e) {
                errors.push_back({{"k", k}, {"error", e.what()}});
            }
        }
        clustering["errors"] = errors;
    }

    stage_ = "building the similarity network";
    const double sigma = median_bandwidth(inputs.profiles);
    const SimilarityGraph graph = build_similarity(inputs.profiles, sigma, config_.cutoff);
    const Centrality indeg = in_degree_centrality(graph);
    const Vector pr = pagerank(graph, config_.damping);

    std::ostringstream cent;
    io::write_csv_row(cent, {"flat_id", "mobility_class", "age_class", "in_degree", "in_degree_normalized", "pagerank"});
    for (std::size_t j = 0; j < inputs.profiles.size(); ++j) {
        const auto& c = inputs.profiles[j].community;
        const auto i = static_cast<Eigen::Index>(j);
        io::write_csv_row(cent, {std::to_string(c.flat_id), std::to_string(c.mobility_class),
                                 std::to_string(c.age_class), io::format_double(indeg.raw[i]),
                                 io::format_double(indeg.normalized[i]), io::format_double(pr[i])});
    }

    stage_ = "checking the calibrated model";
    const OpinionWeights weights = sample_opinion_weights(seed, config_.weights, static_cast<int>(inputs.f.size()));
    json check = {{"valid", true}, {"error", nullptr}};
    try {
        const CommunityModel m = build_model(config_, inputs, weights, graph.W);
        check["headroom_excess"] = opinion_headroom_excess(m, inputs.x0);
        check["max_pressure"] = m.max_pressure();
    } catch (const InvalidModel& e) {
        check["valid"] = false;
        check["error"] = e.what();
    }

    json doc = document(config_);
    doc["config"] = config_.to_json();
    doc["calibrated"] = inputs.to_json();
    doc["graph"] = {{"sigma", sigma}, {"cutoff", graph.cutoff}, {"isolated", graph.isolated},
                    {"W", io::to_json(graph.W)}};
    doc["opinion_weights"] = {{"seed", seed}, {"lambda", io::to_json(weights.lambda)}, {"xi", io::to_json(weights.xi)}};
    doc["clustering"] = clustering;
    doc["model_check"] = check;

    stage_ = "writing " + dir_.string();
    io::write_json(dir_ / "calibrated.json", doc);
    io::write_text(dir_ / "clusters.csv", clusters.str());
    io::write_text(dir_ / "W.csv", io::matrix_csv(graph.W));
    io::write_text(dir_ / "centralities.csv", cent.str());
    out_ << "pipeline: " << inputs.respondents << " respondents (" << inputs.dropped << " dropped), "
         << (check["valid"].get<bool>() ? "model valid" : "model INVALID: " + check["error"].get<std::string>())
         << "\n  -> " << dir_.string() << "\n";

    prepared_.reset();
}

const Prepared& Runner::prepared() {
    if (prepared_) return *prepared_;
    const fs::path path = dir_ / "calibrated.json";
    if (!fs::exists(path)) pipeline();
    stage_ = "reading " + path.string();
    const json doc = io::read_json(path);
    Prepared p;
    try {
        p.inputs = CalibratedInputs::from_json(doc.at("calibrated"));
        p.W = io::matrix_from_json(doc.at("graph").at("W"));
        p.weights.lambda = io::vector_from_json(doc.at("opinion_weights").at("lambda"));
        p.weights.xi = io::vector_from_json(doc.at("opinion_weights").at("xi"));
    } catch (const json::exception& e) {
        throw InputError("malformed " + path.string() + ": " + e.what());
    }
    prepared_ = std::move(p);
    return *prepared_;
}

const CommunityModel& Runner::model() {
    Prepared& p = const_cast<Prepared&>(prepared());
    if (!p.model) {
        stage_ = "building the model";
        p.model.emplace(build_model(config_, p.inputs, p.weights, p.W));
    }
    return *p.model;
}

void Runner::analyze() {
    const CommunityModel& m = model();
    stage_ = "analysing stability";
    const StabilityReport report = classify(m, prepared().inputs.x0);
    json doc = document(config_);
    doc.update(report_to_json(report));
    io::write_json(dir_ / "stability.json", doc);
    out_ << "analyze: " << to_string(report.classification) << ", r0(x*) = " << report.r0_at_xstar
         << "\n  -> " << (dir_ / "stability.json").string() << "\n";
}

void Runner::simulate() {
    const CommunityModel& m = model();
    stage_ = "simulating";
    const ControlPolicy policy = resolve_policy(config_.policy, m.size());
    const Matrix& W = prepared().W;
    const PolicyOutcome outcome = evaluate(policy, m, prepared().inputs.initial_state(), config_.horizon, &W);
    if (outcome.error) throw Error(*outcome.error);
    const Trace& trace = *outcome.trace;

    json doc = document(config_);
    const auto conv = convergence_step(trace, config_.tolerance);
    doc["policy"] = {{"label", policy.label()}, {"kind", to_string(policy.kind)}, {"rule", to_string(policy.rule)},
                     {"budget", policy.budget}};
    doc["horizon"] = config_.horizon;
    doc["initial"] = aggregate_json(trace.aggregates.front());
    doc["final"] = aggregate_json(trace.final_aggregate());
    doc["converged"] = trace.converged;
    doc["last_change"] = trace.last_change;
    doc["convergence_step"] = conv ? json(*conv) : json(nullptr);
    doc["clipped_mass"] = outcome.clipped_mass;
    doc["stranded_budget"] = outcome.stranded;

    io::write_text(dir_ / "trace.csv", trace_csv(trace, config_.per_community));
    io::write_json(dir_ / "summary.json", doc);
    const Aggregate& f = trace.final_aggregate();
    out_ << "simulate: " << policy.label() << " final adopters " << f.adopters << ", dissatisfied " << f.dissatisfied
         << ", mean opinion " << f.mean_opinion << "\n  -> " << dir_.string() << "\n";
}

void Runner::compare() {
    const CommunityModel& m = model();
    stage_ = "comparing policies";
    std::vector<ControlPolicy> policies;
    for (const auto& p : config_.policies) policies.push_back(resolve_policy(p, m.size()));
    const Matrix& W = prepared().W;
    const std::vector<PolicyOutcome> outcomes =
        ::evadopt::compare(m, prepared().inputs.initial_state(), config_.horizon, policies, &W);

    std::ostringstream ranking;
    io::write_csv_row(ranking, {"rank", "policy", "kind", "rule", "budget", "final_adopters", "final_dissatisfied",
                                "final_mean_opinion", "clipped_mass", "stranded_budget", "trace", "error"});
    json rows = json::array();
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const PolicyOutcome& o = outcomes[i];
        const ControlPolicy& p = o.policy;
        std::string trace_file;
        if (o.trace) {
            trace_file = p.kind == ControlKind::None ? "traces/baseline.csv"
                                                      : "traces/" + to_string(p.kind) + "_" + to_string(p.rule) + "_" +
                                                            io::format_double(p.budget) + ".csv";
            io::write_text(dir_ / trace_file, trace_csv(*o.trace, config_.per_community));
        }
        const std::string rank = o.error ? "" : std::to_string(i + 1);
        io::write_csv_row(ranking, {rank, p.label(), to_string(p.kind), p.kind == ControlKind::None ? "" : to_string(p.rule),
                                    io::format_double(p.budget), io::format_double(o.final_adopters),
                                    io::format_double(o.final_dissatisfied), io::format_double(o.final_mean_opinion),
                                    io::format_double(o.clipped_mass), io::format_double(o.stranded), trace_file,
                                    o.error.value_or("")});
        rows.push_back({{"policy", p.label()},
                        {"kind", to_string(p.kind)},
                        {"rule", p.kind == ControlKind::None ? json(nullptr) : json(to_string(p.rule))},
                        {"budget", p.budget},
                        {"final_adopters", o.final_adopters},
                        {"final_dissatisfied", o.final_dissatisfied},
                        {"final_mean_opinion", o.final_mean_opinion},
                        {"clipped_mass", o.clipped_mass},
                        {"stranded_budget", o.stranded},
                        {"trace", trace_file},
                        {"error", o.error ? json(*o.error) : json(nullptr)}});
    }
    json doc = document(config_);
    doc["horizon"] = config_.horizon;
    doc["outcomes"] = rows;
    io::write_text(dir_ / "ranking.csv", ranking.str());
    io::write_json(dir_ / "compare.json", doc);
    out_ << "compare: " << outcomes.size() << " outcomes, best " << outcomes.front().policy.label()
         << "\n  -> " << (dir_ / "ranking.csv").string() << "\n";
}

void Runner::sweep() {
    const CommunityModel& m = model();
    stage_ = "sweeping budgets";
    std::vector<double> budgets;
    for (const auto& b : config_.sweep_budgets) budgets.push_back(b.resolve(m.size()));
    const Matrix& W = prepared().W;
    const SweepResult result =
        budget_sweep(m, prepared().inputs.initial_state(), config_.horizon, config_.sweep_kind, budgets, &W);

    std::ostringstream csv;
    io::write_csv_row(csv, {"kind", "rule", "budget", "final_adopters", "final_dissatisfied", "final_mean_opinion",
                            "error"});
    for (const auto& r : result.rows)
        io::write_csv_row(csv, {to_string(result.kind), to_string(r.rule), io::format_double(r.budget),
                                io::format_double(r.final_adopters), io::format_double(r.final_dissatisfied),
                                io::format_double(r.final_mean_opinion), r.error.value_or("")});
    json mono = json::object();
    bool all = true;
    for (const auto& [rule, ok] : result.monotone) {
        mono[to_string(rule)] = ok;
        all = all && ok;
    }
    json doc = document(config_);
    doc["kind"] = to_string(result.kind);
    doc["budgets"] = budgets;
    doc["monotone_in_budget"] = mono;
    io::write_text(dir_ / "sweep.csv", csv.str());
    io::write_json(dir_ / "sweep.json", doc);
    out_ << "sweep: adopters " << (all ? "non-decreasing" : "NOT monotone") << " in the budget for every rule"
         << "\n  -> " << (dir_ / "sweep.csv").string() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Coupled EV adoption and opinion dynamics: calibration, stability and policy experiments"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::string> country;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::size_t> horizon;
    bool per_community = false;
    std::optional<double> budget;
    std::optional<std::string> rule;
    std::optional<std::string> kind;

    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--country", country, "country to select from the survey");
    app.add_option("--seed", seed, "seed for clustering and opinion weights");
    app.add_option("--out", out_dir, "output root (one sub-directory per configuration)");
    app.add_option("--horizon", horizon, "simulation steps");
    app.add_flag("--per-community", per_community, "add per-community columns to trace CSVs");
    app.add_option("--budget", budget, "total control budget U");
    app.add_option("--rule", rule, "allocation rule")->check(CLI::IsMember({"size", "mobility", "indegree", "pagerank"}));
    app.add_option("--kind", kind, "control kind")->check(CLI::IsMember({"opinion", "dissatisfaction", "none"}));

    auto* pipeline = app.add_subcommand("pipeline", "calibrate model inputs from survey data");
    auto* analyze = app.add_subcommand("analyze", "stability report");
    auto* simulate = app.add_subcommand("simulate", "single trajectory, optionally controlled");
    auto* compare = app.add_subcommand("compare", "rank intervention policies");
    auto* sweep = app.add_subcommand("sweep", "final adopters against the budget");

    std::vector<std::string> argv_tail(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(argv_tail.begin(), argv_tail.end());
    try {
        app.parse(argv_tail);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "evadopt: " << e.what() << "\n" << app.help();
        return 2;
    }

    std::string stage = "reading configuration";
    try {
        const char* env = std::getenv("EVADOPT_DATA_DIR");
        const fs::path data_dir = env && *env ? fs::path(env) : fs::path("data");
        RunConfig config = RunConfig::defaults(data_dir);
        if (!config_path.empty()) {
            const fs::path p(config_path);
            if (!fs::exists(p)) throw ConfigError("config file not found: " + config_path);
            config = RunConfig::from_json(io::read_json(p), p.parent_path(), data_dir);
        }
        if (country) config.country = *country;
        if (seed) config.seed = *seed;
        if (out_dir) config.out_dir = *out_dir;
        if (horizon) config.horizon = *horizon;
        if (per_community) config.per_community = true;

        if (kind || rule || budget) {
            PolicySpec p = config.policy;
            if (kind) p.kind = control_kind_from_string(*kind);
            if (rule) p.rule = allocation_rule_from_string(*rule);
            if (budget) {
                if (!(*budget >= 0.0)) throw ConfigError("--budget must be non-negative");
                p.budget = {*budget, false};
            }
            if (p.kind != ControlKind::None && !kind && config.policy.kind == ControlKind::None)
                throw ConfigError("--rule/--budget need --kind");
            config.policy = p;
            if (compare->parsed()) config.policies = {p};
            if (sweep->parsed() && kind) config.sweep_kind = p.kind;
        }
        require_seed(config);

        Runner runner(config, out);
        try {
            if (pipeline->parsed()) runner.pipeline();
            else if (analyze->parsed()) runner.analyze();
            else if (simulate->parsed()) runner.simulate();
            else if (compare->parsed()) runner.compare();
            else if (sweep->parsed()) runner.sweep();
        } catch (...) {
            stage = runner.stage();
            throw;
        }
        return 0;
    } catch (const Error& e) {
        err << "evadopt: " << (e.input_error() ? "input error" : "error") << " while " << stage << ": " << e.what()
            << "\n";
        return e.input_error() ? 2 : 1;
    } catch (const std::exception& e) {
        err << "evadopt: error while " << stage << ": " << e.what() << "\n";
        return 1;
    }
}

}  // namespace evadopt::cli
