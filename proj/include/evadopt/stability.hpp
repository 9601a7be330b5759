#pragma once

#include <optional>
#include <string>

#include "evadopt/dynamics.hpp"
#include "evadopt/model.hpp"

namespace evadopt {

struct OpinionBounds {
    Vector x_bar;    // upper bound on x(t) for all t
    Vector x_under;  // lower bound on x(t) for all t, (I - L - X) x0
};

/// x_under = (I - L - X) x0 and x_bar = min(1, (I - L - X) x0 + L 1 + X 1 * P),
/// where P is the model's maximal influence term. With population-weighted
/// influence P = 1 and x_bar reduces to (I - L - X) x0 + (L + X) 1.
OpinionBounds opinion_bounds(const CommunityModel& model, const Vector& x0);

/// I - D + c beta diag(x) m w^T, the linearization of the adopter update at a = 0.
Matrix reproduction_matrix(const CommunityModel& model, const Vector& x);

/// Opinion-dependent reproduction number rho(I - D + c beta diag(x) m w^T).
double r0(const CommunityModel& model, const Vector& x);

/// True iff every node reaches (along edges i -> j with W_ij > 0, including
/// the empty path) some node j with lambda_j < 1 and x0_j > 0.
bool check_assumption1(const CommunityModel& model, const Vector& x0);

/// x* = (I - L W)^{-1} (I - L - X) x0. Throws SingularSystem when some node
/// cannot reach a node with lambda < 1, which makes I - L W singular.
Vector adoption_free_equilibrium(const CommunityModel& model, const Vector& x0);

struct DiffusedEquilibrium {
    Vector a;
    Vector d;
    Vector x;
    double residual = 0.0;        // ||step(eq) - eq||_inf
    double fj_consistency = 0.0;  // ||x - (I-LW)^{-1}((I-L-X)x0 + c X 1 w^T a)||_inf
    std::size_t steps = 0;
    double seed_disagreement = 0.0;  // max distance between equilibria from other seeds
    std::vector<std::string> notes;
};

/// Forward-simulates from a = 0.1, d = 0, x = x0 until the step change is
/// below 1e-10, then verifies the fixed-point residual (<= 1e-9) and the
/// Friedkin-Johnsen limit form of x (<= 1e-8). Seeds 0.01 and 0.5 probe for
/// other equilibria; disagreements are recorded, not resolved.
/// Throws NotApplicable when r0(x*) <= 1 and NonConvergence on failure.
DiffusedEquilibrium find_diffused_equilibrium(const CommunityModel& model, const Vector& x0);

struct StabilityCertificate {
    double nu = 0.0;     // bound on ||D||_inf, max_i delta_i
    double eta = 0.0;    // 1 - gamma * max(min_i x_under_i, 0)
    double phi = 0.0;    // box maximum of ||F11||_inf
    double b_sup = 0.0;  // max_i c beta m_i x_bar_i sum_j w_j a_j
    Eigen::Matrix2d G = Eigen::Matrix2d::Zero();
    double rho_G = 0.0;
    bool certified = false;  // rho_G < 1; sufficient only
};

StabilityCertificate stability_certificate(const CommunityModel& model, const Vector& x0,
                                           const DiffusedEquilibrium& equilibrium);

enum class StabilityClass {
    GloballyStableAdoptionFree,
    LocallyStableAdoptionFree,
    UnstableAdoptionFree,
    Indeterminate,  // r0(x*) == 1 to machine precision, no verdict available
};

std::string to_string(StabilityClass cls);

struct StabilityReport {
    Vector x_star;
    OpinionBounds bounds;
    double r0_at_xstar = 0.0;
    double r0_max = 0.0;
    double r0_min = 0.0;
    StabilityClass classification = StabilityClass::Indeterminate;
    bool assumption1_holds = false;
    bool opinion_headroom = false;
    std::optional<DiffusedEquilibrium> diffused;
    std::optional<StabilityCertificate> certificate;
    std::optional<std::string> diffused_error;
};

StabilityReport classify(const CommunityModel& model, const Vector& x0);

}  // namespace evadopt
