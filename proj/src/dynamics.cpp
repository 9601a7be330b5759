#include "evadopt/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "evadopt/errors.hpp"

namespace evadopt {

AnchorShift shift_anchor(const Vector& x0, const Vector& u) {
    if (u.size() != x0.size()) throw InvalidModel("control vector length mismatch");
    AnchorShift out;
    out.anchor = x0 + u;
    for (Eigen::Index i = 0; i < out.anchor.size(); ++i) {
        const double v = out.anchor[i];
        const double clipped = std::clamp(v, 0.0, 1.0);
        out.clipped_mass += std::abs(v - clipped);
        out.anchor[i] = clipped;
    }
    return out;
}

Vector effective_dismissal(const Vector& delta, const ControlTransform& control) {
    if (control.kind != ControlKind::DissatisfactionReduction) return delta;
    if (control.u.size() != delta.size()) throw InvalidModel("control vector length mismatch");
    Vector out(delta.size());
    for (Eigen::Index i = 0; i < delta.size(); ++i)
        out[i] = delta[i] * (1.0 - std::min(std::max(control.u[i], 0.0), 1.0));
    return out;
}

double adoption_pressure(const SystemState& state, const CommunityModel& model) {
    return model.c() * model.influence_weights().dot(state.a);
}

namespace {

SystemState advance(const SystemState& st, const CommunityModel& model, const Vector& x0,
                    const Vector& dismissal) {
    const double pressure = adoption_pressure(st, model);
    const Vector free = Vector::Ones(st.a.size()) - st.a - st.d;

    SystemState next;
    next.t = st.t + 1;
    next.a = st.a - dismissal.cwiseProduct(st.a) +
             (model.beta() * pressure) * st.x.cwiseProduct(model.m()).cwiseProduct(free);
    next.d = st.d - model.gamma() * st.x.cwiseProduct(st.d) + dismissal.cwiseProduct(st.a);
    next.x = model.alpha().cwiseProduct(x0) + model.lambda().cwiseProduct(model.W() * st.x) +
             pressure * model.xi();
    next.s = Vector::Ones(st.a.size()) - next.a - next.d;
    validate_state(next, model.size());
    return next;
}

}  // namespace

SystemState step(const SystemState& state, const CommunityModel& model, const Vector& x0,
                 const ControlTransform& control) {
    validate_state(state, model.size());
    if (x0.size() != static_cast<Eigen::Index>(model.size()))
        throw InvalidModel("anchored opinion vector has wrong length");
    return advance(state, model, x0, effective_dismissal(model.delta(), control));
}

SystemState scalar_step_reference(const SystemState& state, const CommunityModel& model,
                                  const Vector& x0) {
    validate_state(state, model.size());
    const auto n = static_cast<Eigen::Index>(model.size());
    const bool weighted = model.influence() == InfluenceMode::PopulationWeighted;

    double denom = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) denom += model.m()[k] * model.f()[k];
    double numer = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
        numer += model.m()[j] * state.a[j] * (weighted ? model.f()[j] : 1.0);
    const double influence = numer / denom;

    SystemState next;
    next.t = state.t + 1;
    next.s.resize(n);
    next.a.resize(n);
    next.d.resize(n);
    next.x.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double s = state.s[i];
        const double a = state.a[i];
        const double d = state.d[i];
        const double x = state.x[i];
        const double adopt_rate = model.beta() * x;
        const double revert_rate = model.gamma() * x;
        const double newly_adopting = adopt_rate * model.m()[i] * s * influence;

        next.s[i] = s + revert_rate * d - newly_adopting;
        next.a[i] = a - model.delta()[i] * a + newly_adopting;
        next.d[i] = d - revert_rate * d + model.delta()[i] * a;

        double social = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) social += model.W()(i, j) * state.x[j];
        const double alpha = 1.0 - model.lambda()[i] - model.xi()[i];
        next.x[i] = alpha * x0[i] + model.lambda()[i] * social + model.xi()[i] * influence;
    }
    validate_state(next, model.size());
    return next;
}

Aggregate aggregate(const SystemState& state, const Vector& f) {
    return {f.dot(state.s), f.dot(state.a), f.dot(state.d), f.dot(state.x)};
}

Trace simulate(const SystemState& initial, const CommunityModel& model, std::size_t horizon,
               const ControlTransform& control) {
    validate_state(initial, model.size());
    Vector anchor = initial.x;
    Trace trace;
    if (control.kind == ControlKind::OpinionShift) {
        AnchorShift shifted = shift_anchor(initial.x, control.u);
        anchor = std::move(shifted.anchor);
        trace.clipped_mass = shifted.clipped_mass;
    }
    const Vector dismissal = effective_dismissal(model.delta(), control);

    trace.states.reserve(horizon + 1);
    trace.aggregates.reserve(horizon + 1);
    trace.states.push_back(initial);
    trace.aggregates.push_back(aggregate(initial, model.f()));
    for (std::size_t k = 0; k < horizon; ++k) {
        trace.states.push_back(advance(trace.states.back(), model, anchor, dismissal));
        trace.aggregates.push_back(aggregate(trace.states.back(), model.f()));
    }
    if (horizon > 0)
        trace.last_change = state_distance(trace.states[horizon], trace.states[horizon - 1]);
    trace.converged = horizon > 0 && trace.last_change < kConvergenceTolerance;
    return trace;
}

RunResult run(const SystemState& initial, const CommunityModel& model, const Vector& x0,
              std::size_t max_steps, double tolerance, const ControlTransform& control) {
    validate_state(initial, model.size());
    const Vector dismissal = effective_dismissal(model.delta(), control);
    RunResult result{initial, 0, 0.0, false};
    for (std::size_t k = 0; k < max_steps; ++k) {
        SystemState next = advance(result.state, model, x0, dismissal);
        result.last_change = state_distance(next, result.state);
        result.state = std::move(next);
        result.steps = k + 1;
        if (tolerance > 0.0 && result.last_change < tolerance) {
            result.converged = true;
            break;
        }
    }
    return result;
}

}  // namespace evadopt
