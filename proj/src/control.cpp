#include "evadopt/control.hpp"

#include <algorithm>
#include <cstdio>

#include "evadopt/errors.hpp"
#include "evadopt/network.hpp"

namespace evadopt {

std::string to_string(AllocationRule rule) {
    switch (rule) {
        case AllocationRule::SizeProportional: return "size";
        case AllocationRule::MobilityWeighted: return "mobility";
        case AllocationRule::InDegree: return "indegree";
        case AllocationRule::PageRank: return "pagerank";
    }
    return "unknown";
}

std::string to_string(ControlKind kind) {
    switch (kind) {
        case ControlKind::None: return "none";
        case ControlKind::OpinionShift: return "opinion";
        case ControlKind::DissatisfactionReduction: return "dissatisfaction";
    }
    return "unknown";
}

AllocationRule allocation_rule_from_string(const std::string& name) {
    for (auto r : {AllocationRule::SizeProportional, AllocationRule::MobilityWeighted, AllocationRule::InDegree,
                   AllocationRule::PageRank})
        if (to_string(r) == name) return r;
    throw ConfigError("unknown allocation rule '" + name + "' (size, mobility, indegree, pagerank)");
}

ControlKind control_kind_from_string(const std::string& name) {
    for (auto k : {ControlKind::None, ControlKind::OpinionShift, ControlKind::DissatisfactionReduction})
        if (to_string(k) == name) return k;
    throw ConfigError("unknown control kind '" + name + "' (opinion, dissatisfaction, none)");
}

std::string ControlPolicy::label() const {
    if (kind == ControlKind::None) return "baseline";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", budget);
    return to_string(kind) + "/" + to_string(rule) + "/U=" + buf;
}

Vector allocate(AllocationRule rule, double budget, const CommunityModel& model, const Matrix* W) {
    if (!(budget >= 0.0)) throw InvalidModel("budget must be non-negative");
    Vector weights;
    switch (rule) {
        case AllocationRule::SizeProportional: weights = model.f(); break;
        case AllocationRule::MobilityWeighted: weights = model.m().cwiseProduct(model.f()); break;
        case AllocationRule::InDegree:
        case AllocationRule::PageRank:
            if (!W) throw MissingGraph("rule '" + to_string(rule) + "' needs the similarity graph");
            weights = rule == AllocationRule::InDegree ? in_degree_centrality(*W).raw : pagerank(*W);
            break;
    }
    const auto n = static_cast<Eigen::Index>(model.size());
    if (weights.size() != n) throw InvalidModel("graph size does not match the model");
    if (budget == 0.0) return Vector::Zero(n);
    const double total = weights.sum();
    if (!(total > 0.0)) throw InvalidModel("allocation weights sum to zero");

    Vector u = weights * (budget / total);
    Eigen::Index largest = 0;
    u.maxCoeff(&largest);
    double others = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (i != largest) others += u[i];
    u[largest] = budget - others;
    return u;
}

AnchorShift apply_opinion_control(const Vector& x0, const Vector& u) {
    if ((u.array() < 0.0).any()) throw InvalidModel("opinion control must be non-negative");
    return shift_anchor(x0, u);
}

DismissalControl apply_dissatisfaction_control(const Vector& delta, const Vector& u) {
    if ((u.array() < 0.0).any()) throw InvalidModel("dissatisfaction control must be non-negative");
    DismissalControl out;
    out.delta = effective_dismissal(delta, {ControlKind::DissatisfactionReduction, u});
    out.stranded = (u.array() - 1.0).max(0.0).sum();
    return out;
}

PolicyOutcome evaluate(const ControlPolicy& policy, const CommunityModel& model, const SystemState& initial,
                       std::size_t horizon, const Matrix* W) {
    PolicyOutcome out;
    out.policy = policy;
    try {
        ControlTransform control;
        control.kind = policy.kind;
        if (policy.kind != ControlKind::None) {
            out.u = allocate(policy.rule, policy.budget, model, W);
            control.u = out.u;
            if (policy.kind == ControlKind::DissatisfactionReduction)
                out.stranded = apply_dissatisfaction_control(model.delta(), out.u).stranded;
        }
        Trace trace = simulate(initial, model, horizon, control);
        const Aggregate& last = trace.final_aggregate();
        out.final_adopters = last.adopters;
        out.final_dissatisfied = last.dissatisfied;
        out.final_mean_opinion = last.mean_opinion;
        out.clipped_mass = trace.clipped_mass;
        out.trace = std::move(trace);
    } catch (const Error& e) {
        out.error = e.what();
    }
    return out;
}

std::vector<PolicyOutcome> compare(const CommunityModel& model, const SystemState& initial, std::size_t horizon,
                                   const std::vector<ControlPolicy>& policies, const Matrix* W) {
    std::vector<ControlPolicy> batch{ControlPolicy{}};
    for (const auto& p : policies)
        if (p.kind != ControlKind::None) batch.push_back(p);

    std::vector<PolicyOutcome> outcomes;
    outcomes.reserve(batch.size());
    for (const auto& p : batch) outcomes.push_back(evaluate(p, model, initial, horizon, W));

    std::stable_sort(outcomes.begin(), outcomes.end(), [](const PolicyOutcome& lhs, const PolicyOutcome& rhs) {
        if (lhs.error.has_value() != rhs.error.has_value()) return !lhs.error.has_value();
        return lhs.final_adopters > rhs.final_adopters;
    });
    return outcomes;
}

SweepResult budget_sweep(const CommunityModel& model, const SystemState& initial, std::size_t horizon,
                         ControlKind kind, const std::vector<double>& budgets, const Matrix* W) {
    SweepResult result;
    result.kind = kind;
    for (auto rule : {AllocationRule::SizeProportional, AllocationRule::MobilityWeighted, AllocationRule::InDegree,
                      AllocationRule::PageRank}) {
        bool monotone = true;
        std::optional<double> previous;
        for (double budget : budgets) {
            const PolicyOutcome o = evaluate({kind, rule, budget}, model, initial, horizon, W);
            result.rows.push_back({rule, budget, o.final_adopters, o.final_dissatisfied, o.final_mean_opinion, o.error});
            if (o.error) {
                monotone = false;
                continue;
            }
            if (previous && o.final_adopters < *previous) monotone = false;
            previous = o.final_adopters;
        }
        result.monotone.emplace_back(rule, monotone);
    }
    return result;
}

}  // namespace evadopt
