#include "doctest.h"

#include "evadopt/control.hpp"
#include "evadopt/errors.hpp"
#include "evadopt/network.hpp"
#include "support.hpp"

using namespace evadopt;

namespace {

const AllocationRule kRules[] = {AllocationRule::SizeProportional, AllocationRule::MobilityWeighted,
                                 AllocationRule::InDegree, AllocationRule::PageRank};

CommunityModel uniform_model(int n) {
    testing::Rng rng(1);
    auto inst = testing::random_instance(rng, n, InfluenceMode::PopulationWeighted);
    inst.params.f = Vector::Constant(n, 1.0 / n);
    inst.params.m = Vector::Ones(n);
    return CommunityModel(inst.params);
}

}  // namespace

TEST_CASE("allocation examples") {
    const CommunityModel model = uniform_model(5);
    const Vector u = allocate(AllocationRule::SizeProportional, 5.0, model);
    CHECK((u - Vector::Ones(5)).cwiseAbs().maxCoeff() < 1e-15);

    ModelParameters p = model.parameters();
    p.f = Vector::Constant(2, 0.5);
    p.m = Vector(Eigen::Vector2d(1.0, 3.0));
    p.beta = 0.01;
    p.delta = Vector::Constant(2, 0.1);
    p.lambda = Vector::Zero(2);
    p.xi = Vector::Zero(2);
    p.W = Matrix::Identity(2, 2);
    const Vector mob = allocate(AllocationRule::MobilityWeighted, 1.0, CommunityModel(p));
    CHECK(mob[0] == doctest::Approx(0.25));
    CHECK(mob[1] == doctest::Approx(0.75));

    const Matrix W = model.W();
    for (auto rule : kRules) CHECK(allocate(rule, 0.0, model, &W).isZero(0.0));
    CHECK_THROWS_AS(allocate(AllocationRule::PageRank, 1.0, model), MissingGraph);
    CHECK_THROWS_AS(allocate(AllocationRule::InDegree, 1.0, model), MissingGraph);
    CHECK_THROWS_AS(allocate(AllocationRule::SizeProportional, -1.0, model), InvalidModel);
}

TEST_CASE("allocations conserve the budget") {
    testing::Rng rng(12);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = rng.integer(1, 25);
        const auto inst = testing::random_instance(rng, n, InfluenceMode::Unweighted);
        const CommunityModel model(inst.params);
        const double budget = rng.uniform(0.0, 30.0);
        for (auto rule : kRules) {
            const Vector u = allocate(rule, budget, model, &inst.params.W);
            CHECK(std::abs(u.sum() - budget) <= 1e-12);
            CHECK(u.minCoeff() >= 0.0);
        }
    }
    const CommunityModel model = uniform_model(4);
    const Matrix W = model.W();
    const Vector pr = pagerank(W);
    const Vector u = allocate(AllocationRule::PageRank, 2.0, model, &W);
    CHECK((u - 2.0 * pr / pr.sum()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("opinion and dismissal controls") {
    const AnchorShift same = apply_opinion_control(Vector::Constant(3, 0.5), Vector::Zero(3));
    CHECK(same.anchor == Vector::Constant(3, 0.5));
    const AnchorShift up = apply_opinion_control(Vector::Constant(3, 0.5), Vector::Constant(3, 0.1));
    CHECK((up.anchor - Vector::Constant(3, 0.6)).cwiseAbs().maxCoeff() < 1e-15);
    const AnchorShift sat = apply_opinion_control(Vector::Constant(1, 0.9), Vector::Constant(1, 0.4));
    CHECK(sat.anchor[0] == 1.0);
    CHECK(sat.clipped_mass == doctest::Approx(0.3));
    CHECK_THROWS_AS(apply_opinion_control(Vector::Zero(1), Vector::Constant(1, -0.1)), InvalidModel);

    const Vector delta = Vector(Eigen::Vector3d(0.2, 0.4, 0.1));
    CHECK(apply_dissatisfaction_control(delta, Vector::Zero(3)).delta == delta);
    const auto dc = apply_dissatisfaction_control(delta, Vector(Eigen::Vector3d(0.25, 1.0, 2.5)));
    CHECK(dc.delta[0] == doctest::Approx(0.15));
    CHECK(dc.delta[1] == 0.0);
    CHECK(dc.delta[2] == 0.0);
    CHECK(dc.stranded == doctest::Approx(1.5));
}

TEST_CASE("compare ranks outcomes and keeps going after failures") {
    testing::Rng rng(30);
    auto inst = testing::random_instance(rng, 6, InfluenceMode::PopulationWeighted, 1.0);
    const CommunityModel model(inst.params);
    const SystemState s0 = testing::random_state(rng, inst.x0);
    const Matrix& W = inst.params.W;

    const auto only_baseline = compare(model, s0, 50, {}, &W);
    REQUIRE(only_baseline.size() == 1);
    const Trace plain = simulate(s0, model, 50);
    CHECK(only_baseline[0].trace->states.back().a == plain.states.back().a);
    CHECK(compare(model, s0, 50, {ControlPolicy{}}, &W).size() == 1);

    std::vector<ControlPolicy> policies;
    for (auto rule : kRules) {
        policies.push_back({ControlKind::DissatisfactionReduction, rule, 3.0});
        policies.push_back({ControlKind::OpinionShift, rule, 0.5});
    }
    const auto out = compare(model, s0, 50, policies, &W);
    CHECK(out.size() == 9);
    for (std::size_t i = 1; i < out.size(); ++i)
        if (!out[i].error) CHECK(out[i - 1].final_adopters >= out[i].final_adopters);
    for (const auto& o : out) {
        if (o.error) continue;
        const Aggregate& last = o.trace->final_aggregate();
        CHECK(o.final_adopters == last.adopters);
        CHECK(o.final_dissatisfied == last.dissatisfied);
        CHECK(o.final_mean_opinion == last.mean_opinion);
    }

    // A centrality rule without a graph fails only its own entry.
    const auto partial = compare(model, s0, 10, {{ControlKind::OpinionShift, AllocationRule::PageRank, 1.0},
                                                 {ControlKind::OpinionShift, AllocationRule::SizeProportional, 1.0}},
                                 nullptr);
    REQUIRE(partial.size() == 3);
    CHECK(partial.back().error);
    CHECK_FALSE(partial.front().error);
}

TEST_CASE("zero budget reproduces the baseline") {
    testing::Rng rng(31);
    const auto inst = testing::random_instance(rng, 5, InfluenceMode::Unweighted);
    const CommunityModel model(inst.params);
    const SystemState s0 = testing::random_state(rng, inst.x0);
    const Trace base = simulate(s0, model, 40);
    for (auto kind : {ControlKind::OpinionShift, ControlKind::DissatisfactionReduction})
        for (auto rule : kRules) {
            const auto o = evaluate({kind, rule, 0.0}, model, s0, 40, &inst.params.W);
            REQUIRE(o.trace);
            for (std::size_t t = 0; t < base.states.size(); ++t)
                CHECK(state_distance(base.states[t], o.trace->states[t]) == 0.0);
        }
}

TEST_CASE("budget sweep reports monotonicity per rule") {
    testing::Rng rng(32);
    const auto inst = testing::random_instance(rng, 5, InfluenceMode::PopulationWeighted, 1.0);
    const CommunityModel model(inst.params);
    const SystemState s0 = testing::random_state(rng, inst.x0);
    const auto sweep = budget_sweep(model, s0, 200, ControlKind::DissatisfactionReduction, {0, 1.25, 2.5, 3.75, 5},
                                    &inst.params.W);
    CHECK(sweep.rows.size() == 20);
    CHECK(sweep.monotone.size() == 4);
    for (const auto& [rule, ok] : sweep.monotone) CHECK(ok);
}

TEST_CASE("names") {
    for (auto rule : kRules) CHECK(allocation_rule_from_string(to_string(rule)) == rule);
    CHECK(control_kind_from_string("opinion") == ControlKind::OpinionShift);
    CHECK_THROWS_AS(control_kind_from_string("both"), ConfigError);
    CHECK(ControlPolicy{}.label() == "baseline");
    CHECK(ControlPolicy{ControlKind::DissatisfactionReduction, AllocationRule::PageRank, 18.75}.label() ==
          "dissatisfaction/pagerank/U=18.75");
}
