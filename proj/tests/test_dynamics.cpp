#include "doctest.h"

#include "evadopt/dynamics.hpp"
#include "evadopt/errors.hpp"
#include "evadopt/stability.hpp"
#include "support.hpp"

using namespace evadopt;

namespace {

ModelParameters hand_example() {
    ModelParameters p;
    p.f = Vector::Constant(2, 0.5);
    p.m = Vector::Ones(2);
    p.beta = 0.5;
    p.gamma = 0.1;
    p.delta = Vector::Constant(2, 0.1);
    p.lambda = Vector::Zero(2);
    p.xi = Vector::Zero(2);
    p.W = Matrix(2, 2);
    p.W << 0.0, 1.0, 1.0, 0.0;
    return p;
}

}  // namespace

TEST_CASE("adoption pressure") {
    ModelParameters p;
    p.f = Vector::Ones(1);
    p.m = Vector::Constant(1, 2.0);
    p.beta = 0.0;
    p.delta = Vector::Zero(1);
    p.lambda = Vector::Zero(1);
    p.xi = Vector::Zero(1);
    p.W = Matrix::Ones(1, 1);
    const CommunityModel one(p);
    CHECK(one.c() == doctest::Approx(0.5));
    const auto half = SystemState::from(Vector::Constant(1, 0.5), Vector::Zero(1), Vector::Ones(1));
    CHECK(adoption_pressure(half, one) == doctest::Approx(0.5));

    ModelParameters q = hand_example();
    q.m << 1.0, 3.0;
    q.beta = 0.0;
    const CommunityModel two(q);
    const auto full = SystemState::from(Vector::Ones(2), Vector::Zero(2), Vector::Ones(2));
    CHECK(adoption_pressure(full, two) == doctest::Approx(2.0));
    const auto none = SystemState::from(Vector::Zero(2), Vector::Zero(2), Vector::Ones(2));
    CHECK(adoption_pressure(none, two) == 0.0);
}

TEST_CASE("hand-computed step") {
    const CommunityModel model(hand_example());
    // c = 1, P = 0.2: a0 = 0.2 - 0.02 + 0.5*0.2*0.8, a1 = 0.5*0.2
    const Vector x0 = Vector::Ones(2);
    const auto s0 = SystemState::from(Vector(Eigen::Vector2d(0.2, 0.0)), Vector::Zero(2), x0);
    for (const SystemState& next : {step(s0, model, x0), scalar_step_reference(s0, model, x0)}) {
        CHECK(next.a[0] == doctest::Approx(0.26).epsilon(1e-14));
        CHECK(next.a[1] == doctest::Approx(0.10).epsilon(1e-14));
        CHECK(next.d[0] == doctest::Approx(0.02).epsilon(1e-14));
        CHECK(next.d[1] == 0.0);
        CHECK(next.x == x0);
        CHECK(next.t == 1);
        CHECK((next.s + next.a + next.d - Vector::Ones(2)).cwiseAbs().maxCoeff() < 1e-15);
    }
}

TEST_CASE("adoption-free set is invariant and inertia keeps opinions") {
    testing::Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        auto inst = testing::random_instance(rng, 5, InfluenceMode::Unweighted);
        const CommunityModel model(inst.params);
        auto s = SystemState::from(Vector::Zero(5), Vector::Zero(5), rng.vector(5, 0.0, 1.0));
        for (int t = 0; t < 20; ++t) s = step(s, model, inst.x0);
        CHECK(s.a.isZero(0.0));
        CHECK(s.d.isZero(0.0));

        inst.params.lambda.setZero();
        inst.params.xi.setZero();
        const CommunityModel inert(inst.params);
        auto r = testing::random_state(rng, inst.x0);
        for (int t = 0; t < 20; ++t) r = step(r, inert, inst.x0);
        CHECK((r.x - inst.x0).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("opinions converge to the Friedkin-Johnsen limit without adopters") {
    testing::Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto inst = testing::random_instance(rng, 6, InfluenceMode::Unweighted);
        const CommunityModel model(inst.params);
        const Vector x_star = adoption_free_equilibrium(model, inst.x0);
        const Matrix LW = model.lambda().asDiagonal() * model.W();
        const double rate = LW.cwiseAbs().rowwise().sum().maxCoeff();  // bound on rho(LW)
        auto s = SystemState::from(Vector::Zero(6), Vector::Zero(6), rng.vector(6, 0.0, 1.0));
        double prev = (s.x - x_star).cwiseAbs().maxCoeff();
        for (int t = 0; t < 30 && prev > 1e-13; ++t) {
            s = step(s, model, inst.x0);
            const double err = (s.x - x_star).cwiseAbs().maxCoeff();
            CHECK(err <= rate * prev + 1e-13);
            prev = err;
        }
    }
}

TEST_CASE("simulate records horizon + 1 states") {
    const CommunityModel model(hand_example());
    // c = 1, P = 0.2: a0 = 0.2 - 0.02 + 0.5*0.2*0.8, a1 = 0.5*0.2
    const Vector x0 = Vector::Ones(2);
    const auto s0 = SystemState::from(Vector::Constant(2, 0.1), Vector::Zero(2), x0);
    const Trace zero = simulate(s0, model, 0);
    REQUIRE(zero.states.size() == 1);
    CHECK(zero.aggregates.size() == 1);
    CHECK(zero.last_change == 0.0);

    const Trace tr = simulate(s0, model, 25);
    CHECK(tr.states.size() == 26);
    CHECK(tr.final_state().t == 25);
    SystemState manual = s0;
    for (int t = 0; t < 25; ++t) manual = step(manual, model, x0);
    CHECK(state_distance(manual, tr.final_state()) == 0.0);
    CHECK(tr.last_change == doctest::Approx(state_distance(tr.states[25], tr.states[24])));
}

TEST_CASE("aggregates are population weighted") {
    const auto s = SystemState::from(Vector(Eigen::Vector2d(0.2, 0.6)), Vector(Eigen::Vector2d(0.1, 0.0)),
                                     Vector(Eigen::Vector2d(0.5, 1.0)));
    const Aggregate g = aggregate(s, Vector(Eigen::Vector2d(0.25, 0.75)));
    CHECK(g.adopters == doctest::Approx(0.5));
    CHECK(g.dissatisfied == doctest::Approx(0.025));
    CHECK(g.susceptible == doctest::Approx(0.475));
    CHECK(g.mean_opinion == doctest::Approx(0.875));
}

TEST_CASE("run stops on convergence") {
    auto p = hand_example();
    p.beta = 0.01;
    p.delta = Vector::Constant(2, 0.5);
    const CommunityModel model(p);
    // c = 1, P = 0.2: a0 = 0.2 - 0.02 + 0.5*0.2*0.8, a1 = 0.5*0.2
    const Vector x0 = Vector::Ones(2);
    const auto s0 = SystemState::from(Vector::Constant(2, 0.3), Vector::Zero(2), x0);
    const RunResult r = run(s0, model, x0, 1'000'000, 1e-12);
    CHECK(r.converged);
    CHECK(r.steps < 1'000'000);
    CHECK(r.state.a.maxCoeff() < 1e-10);
    const RunResult fixed = run(s0, model, x0, 50, 0.0);
    CHECK(fixed.steps == 50);
}

TEST_CASE("control transforms") {
    const AnchorShift none = shift_anchor(Vector::Constant(3, 0.4), Vector::Zero(3));
    CHECK(none.anchor == Vector::Constant(3, 0.4));
    CHECK(none.clipped_mass == 0.0);

    const AnchorShift clipped = shift_anchor(Vector::Constant(1, 0.9), Vector::Constant(1, 0.4));
    CHECK(clipped.anchor[0] == 1.0);
    CHECK(clipped.clipped_mass == doctest::Approx(0.3));

    const Vector d = effective_dismissal(Vector::Constant(1, 0.2),
                                         {ControlKind::DissatisfactionReduction, Vector::Constant(1, 0.25)});
    CHECK(d[0] == doctest::Approx(0.15));
    const Vector capped = effective_dismissal(Vector::Constant(1, 0.2),
                                              {ControlKind::DissatisfactionReduction, Vector::Constant(1, 3.0)});
    CHECK(capped[0] == 0.0);
}

TEST_CASE("invariant violation reports the step") {
    // Literal influence with a saturated anchor pushes x above 1.
    auto p = hand_example();
    p.m << 1.0, 3.0;
    p.beta = 0.1;
    p.lambda = Vector::Constant(2, 0.3);
    p.xi = Vector::Constant(2, 0.3);
    const CommunityModel model(p);
    // c = 1, P = 0.2: a0 = 0.2 - 0.02 + 0.5*0.2*0.8, a1 = 0.5*0.2
    const Vector x0 = Vector::Ones(2);
    const auto s0 = SystemState::from(Vector::Constant(2, 0.9), Vector::Zero(2), x0);
    try {
        simulate(s0, model, 10);
        FAIL("expected InvariantViolation");
    } catch (const InvariantViolation& e) {
        CHECK(e.step() == 1);
    }
}
