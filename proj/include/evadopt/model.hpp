#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace evadopt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr int kMobilityClasses = 5;
inline constexpr int kAgeClasses = 5;
inline constexpr int kCommunities = kMobilityClasses * kAgeClasses;

// Tolerance used for every "within [0,1]" / "sums to one" check.
inline constexpr double kRangeTolerance = 1e-9;

/// A community is one cell of the mobility x age grid. Classes are 1-based;
/// `flat_id` is the row/column index used by every vector and matrix.
struct CommunityIndex {
    int mobility_class = 1;
    int age_class = 1;
    int flat_id = 0;

    static CommunityIndex from_classes(int mobility_class, int age_class,
                                       int age_count = kAgeClasses);
    static CommunityIndex from_flat(int flat_id, int age_count = kAgeClasses,
                                    int mobility_count = kMobilityClasses);

    friend bool operator==(const CommunityIndex&, const CommunityIndex&) = default;
};

/// How adopters of other communities are summed into the adoption pressure
/// and the opinion feedback. `Unweighted` follows the model equations
/// literally (within-community fractions weighted by mobility only);
/// `PopulationWeighted` additionally weights each community by its share f.
enum class InfluenceMode { Unweighted, PopulationWeighted };

std::string to_string(InfluenceMode mode);
InfluenceMode influence_mode_from_string(const std::string& name);

struct ModelParameters {
    Vector f;
    Vector m;
    double beta = 0.0;
    double gamma = 0.0;
    Vector delta;
    Vector lambda;
    Vector xi;
    Matrix W;
    InfluenceMode influence = InfluenceMode::Unweighted;
};

/// Immutable, validated parameterization of the coupled adoption-opinion
/// system. Construction rejects any parameter set for which the per-step
/// adoption probability could exceed one, i.e. it requires
///   beta * m_i * c * sum_j w_j <= 1   for all i,
/// where w = m (unweighted influence) or w = m .* f (population weighted).
class CommunityModel {
public:
    explicit CommunityModel(ModelParameters params);

    std::size_t size() const { return static_cast<std::size_t>(p_.f.size()); }

    const Vector& f() const { return p_.f; }
    const Vector& m() const { return p_.m; }
    double beta() const { return p_.beta; }
    double gamma() const { return p_.gamma; }
    const Vector& delta() const { return p_.delta; }
    const Vector& lambda() const { return p_.lambda; }
    const Vector& xi() const { return p_.xi; }
    const Vector& alpha() const { return alpha_; }
    const Matrix& W() const { return p_.W; }
    InfluenceMode influence() const { return p_.influence; }
    const ModelParameters& parameters() const { return p_; }

    /// c = 1 / sum_j m_j f_j
    double c() const { return c_; }

    /// Per-community weights in the influence sum (m, or m .* f).
    const Vector& influence_weights() const { return weights_; }

    /// Supremum of the influence term c * w^T a over a in [0,1]^n.
    double max_pressure() const { return max_pressure_; }

    /// Copy of this model with different dismissal rates (revalidated).
    CommunityModel with_delta(const Vector& delta) const;

private:
    ModelParameters p_;
    Vector alpha_;
    Vector weights_;
    double c_ = 0.0;
    double max_pressure_ = 0.0;
};

/// Largest violation of the opinion-range condition
///   alpha_i x0_i + lambda_i + xi_i * max_pressure <= 1,
/// which guarantees x(t) in [0,1] for every admissible trajectory anchored
/// at x0. Non-positive means the condition holds.
double opinion_headroom_excess(const CommunityModel& model, const Vector& x0);
bool has_opinion_headroom(const CommunityModel& model, const Vector& x0);

struct SystemState {
    Vector s;
    Vector a;
    Vector d;
    Vector x;
    std::size_t t = 0;

    /// Builds a state with s = 1 - a - d.
    static SystemState from(Vector a, Vector d, Vector x, std::size_t t = 0);

    std::size_t size() const { return static_cast<std::size_t>(a.size()); }
};

/// Throws InvariantViolation (tagged with state.t) unless s, a, d, x lie in
/// [0,1] and s + a + d = 1, all within kRangeTolerance.
void validate_state(const SystemState& state, std::size_t n);

/// max_i |difference| over all four compartment vectors.
double state_distance(const SystemState& lhs, const SystemState& rhs);

}  // namespace evadopt
