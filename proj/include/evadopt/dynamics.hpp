#pragma once

#include <cstddef>
#include <vector>

#include "evadopt/model.hpp"

namespace evadopt {

inline constexpr double kConvergenceTolerance = 1e-10;
inline constexpr std::size_t kMaxConvergenceSteps = 1'000'000;

enum class ControlKind { None, OpinionShift, DissatisfactionReduction };

/// A static control input u held for the whole horizon. For OpinionShift the
/// anchored opinion becomes clip(x(0) + u); for DissatisfactionReduction the
/// dismissal rate becomes delta_i * (1 - min(u_i, 1)).
struct ControlTransform {
    ControlKind kind = ControlKind::None;
    Vector u;
};

struct AnchorShift {
    Vector anchor;
    double clipped_mass = 0.0;  // total amount removed by clipping to [0,1]
};

AnchorShift shift_anchor(const Vector& x0, const Vector& u);

/// Dismissal rates in effect under `control` (the model's own rates unless
/// the control is a dissatisfaction reduction).
Vector effective_dismissal(const Vector& delta, const ControlTransform& control);

/// c * sum_j w_j a_j, the shared influence term of the adoption and opinion
/// updates.
double adoption_pressure(const SystemState& state, const CommunityModel& model);

/// One step of the coupled system in vector form:
///   a+ = a - D a + beta c diag(x) M diag(1 - a - d) 1 w^T a
///   d+ = d - gamma diag(x) d + D a
///   x+ = (I - L - X) x0 + L W x + c X 1 w^T a
///   s+ = 1 - a+ - d+
/// where D is the effective dismissal matrix. `x0` is the anchored opinion
/// vector (already shifted when opinion control is active).
SystemState step(const SystemState& state, const CommunityModel& model, const Vector& x0,
                 const ControlTransform& control = {});

/// Per-community loop form of the update, written from the scalar equations.
/// Used as a differential-testing oracle for step(); no control support.
SystemState scalar_step_reference(const SystemState& state, const CommunityModel& model,
                                  const Vector& x0);

struct Aggregate {
    double susceptible = 0.0;
    double adopters = 0.0;
    double dissatisfied = 0.0;
    double mean_opinion = 0.0;
};

Aggregate aggregate(const SystemState& state, const Vector& f);

struct Trace {
    std::vector<SystemState> states;
    std::vector<Aggregate> aggregates;
    double last_change = 0.0;  // ||state(T) - state(T-1)||_inf, 0 for T = 0
    bool converged = false;    // last_change < kConvergenceTolerance
    double clipped_mass = 0.0; // opinion-control clipping, if any

    std::size_t horizon() const { return states.empty() ? 0 : states.size() - 1; }
    const SystemState& final_state() const { return states.back(); }
    const Aggregate& final_aggregate() const { return aggregates.back(); }
};

/// Runs exactly `horizon` steps from `initial`, recording every state. The
/// anchored opinion is initial.x (shifted by opinion control if present).
Trace simulate(const SystemState& initial, const CommunityModel& model, std::size_t horizon,
               const ControlTransform& control = {});

struct RunResult {
    SystemState state;
    std::size_t steps = 0;
    double last_change = 0.0;
    bool converged = false;
};

/// Advances without recording. Stops early once the step-to-step change drops
/// below `tolerance` (pass 0 to always run `max_steps`).
RunResult run(const SystemState& initial, const CommunityModel& model, const Vector& x0,
              std::size_t max_steps, double tolerance, const ControlTransform& control = {});

}  // namespace evadopt
