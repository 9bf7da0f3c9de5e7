#include "filterlab/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace filterlab {

namespace {

std::string fmt_real(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

ProbabilityVector ProbabilityVector::from_weights(std::vector<double> weights)
{
    if (weights.empty()) throw std::invalid_argument("probability vector must be nonempty");
    double total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!std::isfinite(weights[i]) || weights[i] < 0.0)
            throw std::invalid_argument("probability weight " + std::to_string(i) +
                                        " is negative or not finite: " + fmt_real(weights[i]));
        total += weights[i];
    }
    if (std::abs(total - 1.0) > kSumTolerance)
        throw std::invalid_argument("probability weights sum to " + fmt_real(total) + ", not 1");
    return ProbabilityVector(std::move(weights));
}

ProbabilityVector ProbabilityVector::normalized(std::vector<double> weights)
{
    double total = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0)
            throw std::invalid_argument("cannot normalize negative or non-finite weights");
        total += w;
    }
    if (!(total > 0.0) || !std::isfinite(total))
        throw std::invalid_argument("cannot normalize weights with total " + fmt_real(total));
    for (double& w : weights) w /= total;
    return ProbabilityVector(std::move(weights));
}

ProbabilityVector ProbabilityVector::uniform(std::size_t n)
{
    if (n == 0) throw std::invalid_argument("uniform law on an empty state space");
    return ProbabilityVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ProbabilityVector ProbabilityVector::point_mass(std::size_t n, std::size_t index)
{
    if (index >= n) throw std::out_of_range("point mass index out of range");
    std::vector<double> w(n, 0.0);
    w[index] = 1.0;
    return ProbabilityVector(std::move(w));
}

double ProbabilityVector::expectation(std::span<const double> f) const
{
    if (f.size() != weights_.size())
        throw std::invalid_argument("function and measure have different dimensions");
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += weights_[i] * f[i];
    return acc;
}

bool ProbabilityVector::is_point_mass() const noexcept
{
    return std::count(weights_.begin(), weights_.end(), 1.0) == 1;
}

double total_variation(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) throw std::invalid_argument("total variation of different dimensions");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
    return 0.5 * acc;
}

double total_variation(const ProbabilityVector& a, const ProbabilityVector& b)
{
    return total_variation(a.weights(), b.weights());
}

std::vector<double> TransitionMatrix::propagate(std::span<const double> nu) const
{
    const std::size_t n = rows.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = nu[i];
        if (w == 0.0) continue;
        const auto& r = rows[i];
        for (std::size_t j = 0; j < n; ++j) out[j] += w * r[j];
    }
    return out;
}

std::string ValidationReport::summary() const
{
    if (issues.empty()) return "valid";
    std::string s;
    for (std::size_t i = 0; i < issues.size(); ++i) {
        if (i) s += "; ";
        s += issues[i];
    }
    return s;
}

void check_rows(const Matrix& rows, const std::string& what, ValidationReport& report)
{
    for (std::size_t i = 0; i < rows.size(); ++i) {
        double total = 0.0;
        bool negative = false;
        for (double v : rows[i]) {
            if (!std::isfinite(v) || v < 0.0) negative = true;
            total += v;
        }
        if (negative)
            report.issues.push_back(what + " row " + std::to_string(i) +
                                    " has a negative or non-finite entry");
        if (!(std::abs(total - 1.0) <= kRowSumTolerance))
            report.issues.push_back(what + " row " + std::to_string(i) + " sums to " +
                                    fmt_real(total));
    }
}

ValidationReport validate_model(const HmmModel& model)
{
    ValidationReport report;
    const std::size_t n = model.states();
    if (n == 0) {
        report.issues.push_back("state space is empty");
        return report;
    }
    bool square = true;
    for (std::size_t i = 0; i < n; ++i) {
        if (model.transition.rows[i].size() != n) {
            report.issues.push_back("transition row " + std::to_string(i) + " has " +
                                    std::to_string(model.transition.rows[i].size()) +
                                    " entries, expected " + std::to_string(n));
            square = false;
        }
    }
    check_rows(model.transition.rows, "transition", report);

    if (!model.labels.empty() && model.labels.size() != n)
        report.issues.push_back("expected " + std::to_string(n) + " state labels, got " +
                                std::to_string(model.labels.size()));

    std::visit(
        [&](const auto& ch) {
            using T = std::decay_t<decltype(ch)>;
            if constexpr (std::is_same_v<T, DiscreteChannel>) {
                if (ch.emission.size() != n) {
                    report.issues.push_back("emission matrix has " +
                                            std::to_string(ch.emission.size()) + " rows, expected " +
                                            std::to_string(n));
                    return;
                }
                const std::size_t m = ch.symbols();
                if (m == 0) report.issues.push_back("emission alphabet is empty");
                for (std::size_t i = 0; i < n; ++i)
                    if (ch.emission[i].size() != m)
                        report.issues.push_back("emission row " + std::to_string(i) +
                                                " has the wrong number of symbols");
                check_rows(ch.emission, "emission", report);
            } else {
                if (!(ch.noise_scale > 0.0) || !std::isfinite(ch.noise_scale))
                    report.issues.push_back("noise scale must be positive, got " +
                                            fmt_real(ch.noise_scale));
                if (ch.means.size() != n) {
                    report.issues.push_back("mean map has " + std::to_string(ch.means.size()) +
                                            " rows, expected " + std::to_string(n));
                    return;
                }
                const std::size_t d = ch.dim();
                if (d == 0) report.issues.push_back("observation dimension is zero");
                for (std::size_t i = 0; i < n; ++i) {
                    if (ch.means[i].size() != d)
                        report.issues.push_back("mean of state " + std::to_string(i) +
                                                " has the wrong dimension");
                    for (double v : ch.means[i])
                        if (!std::isfinite(v))
                            report.issues.push_back("mean of state " + std::to_string(i) +
                                                    " is not finite");
                }
            }
        },
        model.channel);

    if (model.stationary.size() != n) {
        report.issues.push_back("stationary vector has " + std::to_string(model.stationary.size()) +
                                " entries, expected " + std::to_string(n));
    } else if (square) {
        const auto next = model.transition.propagate(model.stationary.weights());
        double residual = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            residual = std::max(residual, std::abs(next[i] - model.stationary[i]));
        if (!(residual <= kStationarityTolerance))
            report.issues.push_back("stationary vector is not invariant: residual " +
                                    fmt_real(residual));
    }
    return report;
}

ProbabilityVector stationary_distribution(const TransitionMatrix& transition, double tol,
                                          std::size_t max_iterations)
{
    const std::size_t n = transition.size();
    ValidationReport report;
    check_rows(transition.rows, "transition", report);
    for (const auto& r : transition.rows)
        if (r.size() != n) report.issues.push_back("transition matrix is not square");
    if (!report.valid()) throw InvalidModel(report);

    std::vector<double> nu(n, 1.0 / static_cast<double>(n));
    for (std::size_t it = 0; it <= max_iterations; ++it) {
        auto next = transition.propagate(nu);
        double residual = 0.0;
        for (std::size_t i = 0; i < n; ++i) residual = std::max(residual, std::abs(next[i] - nu[i]));
        if (residual <= tol) return ProbabilityVector::normalized(std::move(nu));
        // Renormalize each sweep so rounding drift in the total cannot accumulate.
        double total = 0.0;
        for (double v : next) total += v;
        for (double& v : next) v /= total;
        nu = std::move(next);
    }
    throw NonConvergence("power iteration did not converge after " +
                         std::to_string(max_iterations) +
                         " iterations (periodic or reducible chain?); supply the stationary law");
}

HmmModel make_model(TransitionMatrix transition, ObservationChannel channel,
                    std::vector<std::string> labels, std::optional<ProbabilityVector> stationary)
{
    HmmModel model;
    const std::size_t n = transition.size();
    if (labels.empty())
        for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
    model.labels = std::move(labels);
    model.transition = std::move(transition);
    model.channel = std::move(channel);
    if (stationary) {
        model.stationary = std::move(*stationary);
    } else {
        model.stationary = stationary_distribution(model.transition);
    }
    const auto report = validate_model(model);
    if (!report.valid()) throw InvalidModel(report);
    return model;
}

Observation sample_observation(const HmmModel& model, std::size_t state, CounterRng& rng)
{
    if (const auto* d = std::get_if<DiscreteChannel>(&model.channel))
        return Observation{rng.categorical(d->emission[state])};
    const auto& g = std::get<GaussianChannel>(model.channel);
    std::vector<double> y = g.means[state];
    for (double& v : y) v += g.noise_scale * rng.normal();
    return Observation{std::move(y)};
}

Trajectory simulate(const HmmModel& model, std::size_t n, std::uint64_t seed)
{
    CounterRng rng(seed);
    Trajectory t;
    t.seed = seed;
    t.states.reserve(n + 1);
    t.observations.reserve(n);
    std::size_t x = rng.categorical(model.stationary.weights());
    t.states.push_back(x);
    for (std::size_t k = 1; k <= n; ++k) {
        x = rng.categorical(model.transition.row(x));
        t.states.push_back(x);
        t.observations.push_back(sample_observation(model, x, rng));
    }
    return t;
}

}  // namespace filterlab
