#include "evadopt/stability.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <sstream>

#include "evadopt/errors.hpp"
#include "evadopt/spectral.hpp"

namespace evadopt {

OpinionBounds opinion_bounds(const CommunityModel& model, const Vector& x0) {
    OpinionBounds b;
    b.x_under = model.alpha().cwiseProduct(x0);
    b.x_bar = b.x_under + model.lambda() + model.max_pressure() * model.xi();
    b.x_bar = b.x_bar.cwiseMin(1.0);
    return b;
}

Matrix reproduction_matrix(const CommunityModel& model, const Vector& x) {
    const auto n = static_cast<Eigen::Index>(model.size());
    if (x.size() != n) throw InvalidModel("opinion vector has wrong length");
    Matrix R = Matrix::Zero(n, n);
    R.diagonal() = Vector::Ones(n) - model.delta();
    R.noalias() += (model.c() * model.beta()) * x.cwiseProduct(model.m()) *
                   model.influence_weights().transpose();
    return R;
}

double r0(const CommunityModel& model, const Vector& x) {
    if ((x.array() < -kRangeTolerance).any() || (x.array() > 1.0 + kRangeTolerance).any())
        throw InvalidModel("r0 needs opinions in [0,1]");
    return spectral_radius(reproduction_matrix(model, x));
}

namespace {

// Nodes from which some node satisfying `target` is reachable along W's edges.
std::vector<bool> can_reach(const Matrix& W, const std::vector<bool>& target) {
    const auto n = static_cast<std::size_t>(W.rows());
    std::vector<bool> seen(target);
    std::deque<std::size_t> queue;
    for (std::size_t j = 0; j < n; ++j)
        if (target[j]) queue.push_back(j);
    while (!queue.empty()) {
        const std::size_t j = queue.front();
        queue.pop_front();
        for (std::size_t i = 0; i < n; ++i) {
            if (!seen[i] && W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > 0.0) {
                seen[i] = true;
                queue.push_back(i);
            }
        }
    }
    return seen;
}

bool all_of(const std::vector<bool>& v) {
    return std::all_of(v.begin(), v.end(), [](bool b) { return b; });
}

Vector fj_limit(const CommunityModel& model, const Vector& x0, const Vector& a) {
    const auto n = static_cast<Eigen::Index>(model.size());
    Matrix system = Matrix::Identity(n, n) - model.lambda().asDiagonal() * model.W();
    Vector rhs = model.alpha().cwiseProduct(x0) +
                 (model.c() * model.influence_weights().dot(a)) * model.xi();
    return system.partialPivLu().solve(rhs);
}

}  // namespace

bool check_assumption1(const CommunityModel& model, const Vector& x0) {
    std::vector<bool> target(model.size());
    for (std::size_t j = 0; j < model.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        target[j] = model.lambda()[jj] < 1.0 && x0[jj] > 0.0;
    }
    return all_of(can_reach(model.W(), target));
}

Vector adoption_free_equilibrium(const CommunityModel& model, const Vector& x0) {
    std::vector<bool> open(model.size());
    for (std::size_t j = 0; j < model.size(); ++j)
        open[j] = model.lambda()[static_cast<Eigen::Index>(j)] < 1.0;
    if (!all_of(can_reach(model.W(), open)))
        throw SingularSystem(
            "I - Lambda W is singular: a closed group of communities has lambda = 1");

    const auto n = static_cast<Eigen::Index>(model.size());
    const Matrix system = Matrix::Identity(n, n) - model.lambda().asDiagonal() * model.W();
    const Vector rhs = model.alpha().cwiseProduct(x0);
    Vector x_star = system.partialPivLu().solve(rhs);
    const double residual = (system * x_star - rhs).cwiseAbs().maxCoeff();
    if (!x_star.allFinite() || residual > 1e-10) {
        std::ostringstream os;
        os << "adoption-free equilibrium solve residual " << residual;
        throw SingularSystem(os.str());
    }
    return x_star;
}

DiffusedEquilibrium find_diffused_equilibrium(const CommunityModel& model, const Vector& x0) {
    const Vector x_star = adoption_free_equilibrium(model, x0);
    const double r0_star = r0(model, x_star);
    if (r0_star <= 1.0) {
        std::ostringstream os;
        os << "no adoption-diffused equilibrium is guaranteed: r0(x*) = " << r0_star << " <= 1";
        throw NotApplicable(os.str());
    }

    const auto n = static_cast<Eigen::Index>(model.size());
    auto seeded = [&](double level) {
        return SystemState::from(Vector::Constant(n, level), Vector::Zero(n), x0);
    };

    const RunResult primary =
        run(seeded(0.1), model, x0, kMaxConvergenceSteps, kConvergenceTolerance);
    if (!primary.converged) {
        std::ostringstream os;
        os << "diffused equilibrium search did not converge in " << primary.steps
           << " steps; last change " << primary.last_change << ", adopters tail "
           << primary.state.a.transpose();
        throw NonConvergence(os.str());
    }
    if (primary.state.a.maxCoeff() <= 1e-8)
        throw NonConvergence("forward simulation converged to the adoption-free state");

    DiffusedEquilibrium eq;
    eq.a = primary.state.a;
    eq.d = primary.state.d;
    eq.x = primary.state.x;
    eq.steps = primary.steps;

    const SystemState at_eq = SystemState::from(eq.a, eq.d, eq.x);
    eq.residual = state_distance(step(at_eq, model, x0), at_eq);
    eq.fj_consistency = (eq.x - fj_limit(model, x0, eq.a)).cwiseAbs().maxCoeff();
    if (eq.residual > 1e-9 || eq.fj_consistency > 1e-8) {
        std::ostringstream os;
        os << "equilibrium verification failed: residual " << eq.residual
           << ", FJ consistency " << eq.fj_consistency;
        throw NonConvergence(os.str());
    }

    for (double level : {0.01, 0.5}) {
        try {
            const RunResult probe =
                run(seeded(level), model, x0, kMaxConvergenceSteps, kConvergenceTolerance);
            const double gap = state_distance(probe.state, at_eq);
            eq.seed_disagreement = std::max(eq.seed_disagreement, gap);
            if (!probe.converged || gap > 1e-6) {
                std::ostringstream os;
                os << "seed a=" << level << (probe.converged ? " converged" : " did not converge")
                   << " at distance " << gap << " from the reported equilibrium";
                eq.notes.push_back(os.str());
            }
        } catch (const Error& e) {
            eq.notes.push_back("seed a=" + std::to_string(level) + " failed: " + e.what());
        }
    }
    return eq;
}

StabilityCertificate stability_certificate(const CommunityModel& model, const Vector& x0,
                                           const DiffusedEquilibrium& equilibrium) {
    const OpinionBounds bounds = opinion_bounds(model, x0);
    const Vector& w = model.influence_weights();
    const double k = model.c() * model.beta();
    const double spread = k * w.dot(equilibrium.a);
    const double w_total = w.sum();

    StabilityCertificate cert;
    cert.nu = model.delta().maxCoeff();
    cert.eta = 1.0 - model.gamma() * std::max(bounds.x_under.minCoeff(), 0.0);

    // Row i of F11 has |1 - delta_i - B_i + k m_i w_i t| on the diagonal and
    // k m_i w_j t off it, with t = x_i (1 - a_i - d_i) in [0,1] and
    // B_i in [k m_i x_under_i S, k m_i x_bar_i S]. The row sum is convex in
    // (B_i, t), so its box maximum sits on a vertex.
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        const double m_i = model.m()[i];
        const std::array<double, 2> b_range{spread * m_i * bounds.x_under[i],
                                            spread * m_i * bounds.x_bar[i]};
        cert.b_sup = std::max(cert.b_sup, b_range[1]);
        for (double b : b_range) {
            for (double t : {0.0, 1.0}) {
                const double diag = 1.0 - model.delta()[i] - b + k * m_i * w[i] * t;
                const double off = k * m_i * t * (w_total - w[i]);
                cert.phi = std::max(cert.phi, std::abs(diag) + off);
            }
        }
    }

    const double coupling = std::sqrt(cert.b_sup * cert.nu);
    cert.G << cert.phi, coupling, coupling, cert.eta;
    cert.rho_G = spectral_radius(cert.G);
    cert.certified = cert.rho_G < 1.0;
    return cert;
}

std::string to_string(StabilityClass cls) {
    switch (cls) {
        case StabilityClass::GloballyStableAdoptionFree: return "GloballyStableAdoptionFree";
        case StabilityClass::LocallyStableAdoptionFree: return "LocallyStableAdoptionFree";
        case StabilityClass::UnstableAdoptionFree: return "UnstableAdoptionFree";
        case StabilityClass::Indeterminate: return "Indeterminate";
    }
    return "Indeterminate";
}

StabilityReport classify(const CommunityModel& model, const Vector& x0) {
    StabilityReport report;
    report.assumption1_holds = check_assumption1(model, x0);
    report.opinion_headroom = has_opinion_headroom(model, x0);
    report.x_star = adoption_free_equilibrium(model, x0);
    report.bounds = opinion_bounds(model, x0);
    report.r0_at_xstar = r0(model, report.x_star);
    report.r0_max = r0(model, report.bounds.x_bar);
    report.r0_min = r0(model, report.bounds.x_under);

    if (report.r0_max < 1.0)
        report.classification = StabilityClass::GloballyStableAdoptionFree;
    else if (report.r0_at_xstar < 1.0)
        report.classification = StabilityClass::LocallyStableAdoptionFree;
    else if (report.r0_at_xstar > 1.0)
        report.classification = StabilityClass::UnstableAdoptionFree;
    else
        report.classification = StabilityClass::Indeterminate;

    if (report.classification == StabilityClass::UnstableAdoptionFree) {
        try {
            report.diffused = find_diffused_equilibrium(model, x0);
            report.certificate = stability_certificate(model, x0, *report.diffused);
        } catch (const Error& e) {
            report.diffused_error = e.what();
        }
    }
    return report;
}

}  // namespace evadopt
