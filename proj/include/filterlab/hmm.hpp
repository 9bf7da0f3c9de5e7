#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "filterlab/rng.hpp"

namespace filterlab {

using Matrix = std::vector<std::vector<double>>;

/// A probability vector over a finite state space: nonnegative weights
/// summing to one within kSumTolerance. Construction is always checked.
class ProbabilityVector {
public:
    static constexpr double kSumTolerance = 1e-12;

    ProbabilityVector() = default;

    /// Throws std::invalid_argument unless `weights` is already a probability vector.
    static ProbabilityVector from_weights(std::vector<double> weights);
    /// Rescales nonnegative weights by their total. Throws std::invalid_argument
    /// on negative, non-finite or all-zero input.
    static ProbabilityVector normalized(std::vector<double> weights);
    static ProbabilityVector uniform(std::size_t n);
    static ProbabilityVector point_mass(std::size_t n, std::size_t index);

    std::size_t size() const noexcept { return weights_.size(); }
    bool empty() const noexcept { return weights_.empty(); }
    double operator[](std::size_t i) const { return weights_[i]; }
    std::span<const double> weights() const noexcept { return weights_; }

    /// Integral of f against this measure.
    double expectation(std::span<const double> f) const;

    /// True when a single state carries all the mass.
    bool is_point_mass() const noexcept;

    friend bool operator==(const ProbabilityVector&, const ProbabilityVector&) = default;

private:
    explicit ProbabilityVector(std::vector<double> w) : weights_(std::move(w)) {}
    std::vector<double> weights_;
};

/// Half the L1 distance.
double total_variation(std::span<const double> a, std::span<const double> b);
double total_variation(const ProbabilityVector& a, const ProbabilityVector& b);

/// Row-stochastic transition matrix. Rows are stored as given; validity is
/// established by validate_model() (or check_rows()) rather than on
/// construction, so malformed input can be diagnosed instead of rejected.
struct TransitionMatrix {
    Matrix rows;

    std::size_t size() const noexcept { return rows.size(); }
    std::span<const double> row(std::size_t i) const { return rows[i]; }

    /// Row-vector product nu * P.
    std::vector<double> propagate(std::span<const double> nu) const;
};

/// Finite-alphabet channel: emission[x][y] = P(Y = y | X = x).
struct DiscreteChannel {
    Matrix emission;
    std::size_t symbols() const noexcept { return emission.empty() ? 0 : emission.front().size(); }
};

/// Additive isotropic Gaussian channel: Y = means[x] + noise_scale * gamma,
/// gamma standard normal in R^dim.
struct GaussianChannel {
    Matrix means;
    double noise_scale = 1.0;
    std::size_t dim() const noexcept { return means.empty() ? 0 : means.front().size(); }
};

using ObservationChannel = std::variant<DiscreteChannel, GaussianChannel>;

/// A symbol index for discrete channels, a real vector for Gaussian ones.
using Observation = std::variant<std::size_t, std::vector<double>>;

struct HmmModel {
    std::vector<std::string> labels;
    TransitionMatrix transition;
    ObservationChannel channel;
    ProbabilityVector stationary;

    std::size_t states() const noexcept { return transition.size(); }
    bool is_discrete() const noexcept { return std::holds_alternative<DiscreteChannel>(channel); }
};

struct ValidationReport {
    std::vector<std::string> issues;
    bool valid() const noexcept { return issues.empty(); }
    std::string summary() const;
};

inline constexpr double kRowSumTolerance = 1e-12;
inline constexpr double kStationarityTolerance = 1e-10;

/// Lists every violated invariant: row sums and negative entries of the
/// transition and emission matrices, dimension mismatches, a nonpositive
/// noise scale, and the stationarity residual max_i |(mu P - mu)_i|.
ValidationReport validate_model(const HmmModel& model);

/// Appends a message per bad row of `rows` (negativity, row sum). `what`
/// names the matrix in the messages.
void check_rows(const Matrix& rows, const std::string& what, ValidationReport& report);

class InvalidModel : public std::invalid_argument {
public:
    explicit InvalidModel(const ValidationReport& report)
        : std::invalid_argument("invalid model: " + report.summary()), report_(report) {}
    const ValidationReport& report() const noexcept { return report_; }

private:
    ValidationReport report_;
};

class NonConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultStationaryTolerance = 1e-13;
inline constexpr std::size_t kDefaultPowerIterations = 1'000'000;

/// Invariant law by power iteration from the uniform vector. Returns once
/// max_i |(nu P - nu)_i| <= tol; throws NonConvergence after max_iterations
/// (periodic or reducible chains), in which case mu must be supplied.
ProbabilityVector stationary_distribution(const TransitionMatrix& transition,
                                          double tol = kDefaultStationaryTolerance,
                                          std::size_t max_iterations = kDefaultPowerIterations);

/// Assembles a model, computing mu when not given, and throws InvalidModel
/// if validation fails. Labels default to "0", "1", ...
HmmModel make_model(TransitionMatrix transition, ObservationChannel channel,
                    std::vector<std::string> labels = {},
                    std::optional<ProbabilityVector> stationary = std::nullopt);

/// X_0 .. X_n and Y_1 .. Y_n: states.size() == observations.size() + 1.
struct Trajectory {
    std::vector<std::size_t> states;
    std::vector<Observation> observations;
    std::uint64_t seed = 0;

    std::size_t horizon() const noexcept { return observations.size(); }
};

/// Draws Y | X = state from the channel.
Observation sample_observation(const HmmModel& model, std::size_t state, CounterRng& rng);

/// X_0 ~ mu, X_k | X_{k-1} ~ P, Y_k | X_k ~ channel, for k = 1..n. A pure
/// function of (model, n, seed); the draws for step k do not depend on n,
/// so shorter runs are prefixes of longer ones.
Trajectory simulate(const HmmModel& model, std::size_t n, std::uint64_t seed);

}  // namespace filterlab
