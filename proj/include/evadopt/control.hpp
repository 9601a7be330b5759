#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evadopt/dynamics.hpp"
#include "evadopt/model.hpp"

namespace evadopt {

enum class AllocationRule { SizeProportional, MobilityWeighted, InDegree, PageRank };

std::string to_string(AllocationRule rule);   // size, mobility, indegree, pagerank
std::string to_string(ControlKind kind);      // none, opinion, dissatisfaction
AllocationRule allocation_rule_from_string(const std::string& name);
ControlKind control_kind_from_string(const std::string& name);

struct ControlPolicy {
    ControlKind kind = ControlKind::None;
    AllocationRule rule = AllocationRule::SizeProportional;
    double budget = 0.0;

    std::string label() const;
};

/// Splits `budget` over the communities in proportion to f, m.*f, in-degree
/// or PageRank of W. The entries sum to `budget` exactly: the rounding
/// residue goes to the largest entry. Centrality rules need `W`
/// (MissingGraph otherwise).
Vector allocate(AllocationRule rule, double budget, const CommunityModel& model,
                const Matrix* W = nullptr);

AnchorShift apply_opinion_control(const Vector& x0, const Vector& u);

struct DismissalControl {
    Vector delta;
    double stranded = 0.0;  // sum of max(u_i - 1, 0): budget that has no effect
};

DismissalControl apply_dissatisfaction_control(const Vector& delta, const Vector& u);

struct PolicyOutcome {
    ControlPolicy policy;
    Vector u;
    std::optional<Trace> trace;
    double final_adopters = 0.0;
    double final_dissatisfied = 0.0;
    double final_mean_opinion = 0.0;
    double clipped_mass = 0.0;
    double stranded = 0.0;
    std::optional<std::string> error;
};

PolicyOutcome evaluate(const ControlPolicy& policy, const CommunityModel& model,
                       const SystemState& initial, std::size_t horizon, const Matrix* W);

/// Simulates the uncontrolled baseline plus every policy from the same
/// initial state. Outcomes are ordered by final adopters (descending, ties
/// keep input order, baseline first); failed policies come last with
/// `error` set. A `None` policy in the list stands in for the baseline.
std::vector<PolicyOutcome> compare(const CommunityModel& model, const SystemState& initial,
                                   std::size_t horizon, const std::vector<ControlPolicy>& policies,
                                   const Matrix* W);

struct SweepRow {
    AllocationRule rule;
    double budget = 0.0;
    double final_adopters = 0.0;
    double final_dissatisfied = 0.0;
    double final_mean_opinion = 0.0;
    std::optional<std::string> error;
};

struct SweepResult {
    ControlKind kind = ControlKind::DissatisfactionReduction;
    std::vector<SweepRow> rows;                      // rule-major, budgets ascending
    std::vector<std::pair<AllocationRule, bool>> monotone;  // adopters non-decreasing in U
};

SweepResult budget_sweep(const CommunityModel& model, const SystemState& initial, std::size_t horizon,
                         ControlKind kind, const std::vector<double>& budgets, const Matrix* W);

}  // namespace evadopt
