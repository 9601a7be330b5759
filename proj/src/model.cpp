#include "evadopt/model.hpp"

#include <cmath>
#include <sstream>

#include "evadopt/errors.hpp"

namespace evadopt {

CommunityIndex CommunityIndex::from_classes(int mobility_class, int age_class, int age_count) {
    if (mobility_class < 1 || age_class < 1 || age_class > age_count)
        throw InvalidModel("community classes out of range");
    return {mobility_class, age_class, (mobility_class - 1) * age_count + (age_class - 1)};
}

CommunityIndex CommunityIndex::from_flat(int flat_id, int age_count, int mobility_count) {
    if (flat_id < 0 || flat_id >= age_count * mobility_count)
        throw InvalidModel("flat community id out of range");
    return {flat_id / age_count + 1, flat_id % age_count + 1, flat_id};
}

std::string to_string(InfluenceMode mode) {
    return mode == InfluenceMode::Unweighted ? "unweighted" : "population_weighted";
}

InfluenceMode influence_mode_from_string(const std::string& name) {
    if (name == "unweighted") return InfluenceMode::Unweighted;
    if (name == "population_weighted" || name == "f_weighted")
        return InfluenceMode::PopulationWeighted;
    throw InvalidModel("unknown influence mode '" + name + "'");
}

namespace {

bool all_finite(const Vector& v) { return v.allFinite(); }

void require(bool ok, const std::string& msg) {
    if (!ok) throw InvalidModel(msg);
}

void require_range(const Vector& v, double lo, double hi, const char* name) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!(v[i] >= lo && v[i] <= hi)) {
            std::ostringstream os;
            os << name << "[" << i << "] = " << v[i] << " outside [" << lo << ", " << hi << "]";
            throw InvalidModel(os.str());
        }
    }
}

}  // namespace

CommunityModel::CommunityModel(ModelParameters params) : p_(std::move(params)) {
    const Eigen::Index n = p_.f.size();
    require(n > 0, "model needs at least one community");
    require(p_.m.size() == n && p_.delta.size() == n && p_.lambda.size() == n &&
                p_.xi.size() == n,
            "parameter vectors must all have length n");
    require(p_.W.rows() == n && p_.W.cols() == n, "W must be n x n");
    require(all_finite(p_.f) && all_finite(p_.m) && all_finite(p_.delta) &&
                all_finite(p_.lambda) && all_finite(p_.xi) && p_.W.allFinite() &&
                std::isfinite(p_.beta) && std::isfinite(p_.gamma),
            "non-finite model parameter");

    require_range(p_.f, 0.0, 1.0, "f");
    require(std::abs(p_.f.sum() - 1.0) <= kRangeTolerance, "f must sum to 1");
    for (Eigen::Index i = 0; i < n; ++i) require(p_.m[i] > 0.0, "mobility indices must be > 0");
    require(p_.beta >= 0.0 && p_.beta <= 1.0, "beta must lie in [0,1]");
    require(p_.gamma >= 0.0 && p_.gamma < 1.0, "gamma must lie in [0,1)");
    require_range(p_.delta, 0.0, 1.0, "delta");
    require_range(p_.lambda, 0.0, 1.0, "lambda");
    require_range(p_.xi, 0.0, 1.0, "xi");

    alpha_ = Vector::Ones(n) - p_.lambda - p_.xi;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (alpha_[i] < -1e-12) {
            std::ostringstream os;
            os << "lambda + xi exceeds 1 for community " << i;
            throw InvalidModel(os.str());
        }
        if (alpha_[i] < 0.0) alpha_[i] = 0.0;
    }

    require((p_.W.array() >= 0.0).all(), "W must be nonnegative");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(p_.W.row(i).sum() - 1.0) > kRangeTolerance) {
            std::ostringstream os;
            os << "row " << i << " of W sums to " << p_.W.row(i).sum() << ", expected 1";
            throw InvalidModel(os.str());
        }
    }

    const double mf = p_.m.dot(p_.f);
    require(mf > 0.0, "sum_j m_j f_j must be positive");
    c_ = 1.0 / mf;
    weights_ = p_.influence == InfluenceMode::Unweighted ? Vector(p_.m)
                                                         : Vector(p_.m.cwiseProduct(p_.f));
    max_pressure_ = c_ * weights_.sum();

    // Worst case a = 1, x = 1: the adoption probability must stay <= 1.
    for (Eigen::Index i = 0; i < n; ++i) {
        const double worst = p_.beta * p_.m[i] * max_pressure_;
        if (worst > 1.0 + 1e-12) {
            std::ostringstream os;
            os << "adoption probability bound violated: beta * m_i * c * sum(w) = " << worst
               << " > 1 for community " << i << " (beta=" << p_.beta << ", m_i=" << p_.m[i]
               << ", c=" << c_ << ", sum(w)=" << weights_.sum()
               << "); lower beta or rescale mobility indices";
            throw InvalidModel(os.str());
        }
    }
}

CommunityModel CommunityModel::with_delta(const Vector& delta) const {
    ModelParameters p = p_;
    p.delta = delta;
    return CommunityModel(std::move(p));
}

double opinion_headroom_excess(const CommunityModel& model, const Vector& x0) {
    const Vector bound = model.alpha().cwiseProduct(x0) + model.lambda() +
                         model.xi() * model.max_pressure();
    return bound.maxCoeff() - 1.0;
}

bool has_opinion_headroom(const CommunityModel& model, const Vector& x0) {
    return opinion_headroom_excess(model, x0) <= 1e-12;
}

SystemState SystemState::from(Vector a, Vector d, Vector x, std::size_t t) {
    SystemState st;
    st.s = Vector::Ones(a.size()) - a - d;
    st.a = std::move(a);
    st.d = std::move(d);
    st.x = std::move(x);
    st.t = t;
    return st;
}

void validate_state(const SystemState& state, std::size_t n) {
    const auto nn = static_cast<Eigen::Index>(n);
    if (state.s.size() != nn || state.a.size() != nn || state.d.size() != nn ||
        state.x.size() != nn)
        throw InvariantViolation("state vectors must have length " + std::to_string(n), state.t);
    auto check = [&](const Vector& v, const char* name) {
        for (Eigen::Index i = 0; i < nn; ++i) {
            if (!(v[i] >= -kRangeTolerance && v[i] <= 1.0 + kRangeTolerance)) {
                std::ostringstream os;
                os << name << "[" << i << "] = " << v[i] << " left [0,1]";
                throw InvariantViolation(os.str(), state.t);
            }
        }
    };
    check(state.s, "s");
    check(state.a, "a");
    check(state.d, "d");
    check(state.x, "x");
    for (Eigen::Index i = 0; i < nn; ++i) {
        const double total = state.s[i] + state.a[i] + state.d[i];
        if (std::abs(total - 1.0) > kRangeTolerance) {
            std::ostringstream os;
            os << "s + a + d = " << total << " for community " << i;
            throw InvariantViolation(os.str(), state.t);
        }
    }
}

double state_distance(const SystemState& lhs, const SystemState& rhs) {
    double dist = (lhs.s - rhs.s).cwiseAbs().maxCoeff();
    dist = std::max(dist, (lhs.a - rhs.a).cwiseAbs().maxCoeff());
    dist = std::max(dist, (lhs.d - rhs.d).cwiseAbs().maxCoeff());
    dist = std::max(dist, (lhs.x - rhs.x).cwiseAbs().maxCoeff());
    return dist;
}

}  // namespace evadopt
