#include "filterlab/filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "filterlab/table.hpp"

namespace filterlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

const std::vector<double>& gaussian_point(const Observation& y, std::size_t dim)
{
    const auto* v = std::get_if<std::vector<double>>(&y);
    if (!v) throw std::invalid_argument("Gaussian channel expects a real-vector observation");
    if (v->size() != dim)
        throw std::invalid_argument("observation has dimension " + std::to_string(v->size()) +
                                    ", channel expects " + std::to_string(dim));
    return *v;
}

std::size_t discrete_symbol(const Observation& y, const DiscreteChannel& ch)
{
    const auto* s = std::get_if<std::size_t>(&y);
    if (!s) throw std::invalid_argument("discrete channel expects a symbol observation");
    if (*s >= ch.symbols())
        throw std::invalid_argument("symbol " + std::to_string(*s) + " outside alphabet of size " +
                                    std::to_string(ch.symbols()));
    return *s;
}

/// Log density up to an additive constant shared by all states.
std::vector<double> gaussian_log_likelihood(const GaussianChannel& ch, const Observation& y)
{
    const auto& point = gaussian_point(y, ch.dim());
    const double scale = 1.0 / (2.0 * ch.noise_scale * ch.noise_scale);
    std::vector<double> ll(ch.means.size());
    for (std::size_t x = 0; x < ll.size(); ++x) {
        double sq = 0.0;
        for (std::size_t i = 0; i < point.size(); ++i) {
            const double d = point[i] - ch.means[x][i];
            sq += d * d;
        }
        ll[x] = -sq * scale;
    }
    return ll;
}

ProbabilityVector update_at(const HmmModel& model, const ProbabilityVector& prior,
                            const Observation& y, std::size_t step)
{
    if (prior.size() != model.states())
        throw std::invalid_argument("prior has " + std::to_string(prior.size()) +
                                    " states, model has " + std::to_string(model.states()));
    std::vector<double> w = model.transition.propagate(prior.weights());

    if (const auto* d = std::get_if<DiscreteChannel>(&model.channel)) {
        const std::size_t s = discrete_symbol(y, *d);
        double total = 0.0;
        for (std::size_t x = 0; x < w.size(); ++x) {
            w[x] *= d->emission[x][s];
            total += w[x];
        }
        if (!(total > 0.0)) throw ZeroLikelihood(step);
        return ProbabilityVector::normalized(std::move(w));
    }

    // Shift by the largest log-likelihood among predicted states so the
    // dominant term is exp(0) = 1 and small noise scales cannot underflow it.
    const auto ll = gaussian_log_likelihood(std::get<GaussianChannel>(model.channel), y);
    double top = kNegInf;
    for (std::size_t x = 0; x < w.size(); ++x)
        if (w[x] > 0.0) top = std::max(top, ll[x]);
    if (top == kNegInf) throw ZeroLikelihood(step);
    for (std::size_t x = 0; x < w.size(); ++x)
        if (w[x] > 0.0) w[x] *= std::exp(ll[x] - top);
    return ProbabilityVector::normalized(std::move(w));
}

}  // namespace

std::vector<double> likelihood_weights(const HmmModel& model, const Observation& y)
{
    if (const auto* d = std::get_if<DiscreteChannel>(&model.channel)) {
        const std::size_t s = discrete_symbol(y, *d);
        std::vector<double> out(d->emission.size());
        for (std::size_t x = 0; x < out.size(); ++x) out[x] = d->emission[x][s];
        return out;
    }
    auto ll = gaussian_log_likelihood(std::get<GaussianChannel>(model.channel), y);
    const double top = *std::max_element(ll.begin(), ll.end());
    for (double& v : ll) v = std::exp(v - top);
    return ll;
}

ProbabilityVector bayes_update(const HmmModel& model, const ProbabilityVector& prior,
                               const Observation& y)
{
    return update_at(model, prior, y, 1);
}

FilterPath run_filter(const HmmModel& model, const ProbabilityVector& prior,
                      std::span<const Observation> ys)
{
    FilterPath path;
    path.steps.reserve(ys.size() + 1);
    path.steps.push_back(prior);
    for (std::size_t k = 0; k < ys.size(); ++k)
        path.steps.push_back(update_at(model, path.steps.back(), ys[k], k + 1));
    return path;
}

ProbabilityVector smoother(const HmmModel& model, const ProbabilityVector& prior,
                           std::span<const Observation> ys)
{
    const std::size_t n = model.states();
    if (prior.size() != n) throw std::invalid_argument("prior dimension does not match the model");
    if (ys.empty()) return prior;

    // beta(x) is proportional to P(Y_{t+1..k} | X_t = x); kept with max 1.
    std::vector<double> beta(n, 1.0);
    std::vector<double> weighted(n);
    for (std::size_t t = ys.size(); t-- > 0;) {
        if (const auto* d = std::get_if<DiscreteChannel>(&model.channel)) {
            const std::size_t s = discrete_symbol(ys[t], *d);
            for (std::size_t x = 0; x < n; ++x) weighted[x] = d->emission[x][s] * beta[x];
        } else {
            const auto ll = gaussian_log_likelihood(std::get<GaussianChannel>(model.channel), ys[t]);
            double top = kNegInf;
            for (std::size_t x = 0; x < n; ++x)
                if (beta[x] > 0.0) top = std::max(top, ll[x] + std::log(beta[x]));
            if (top == kNegInf) throw ZeroLikelihood(t + 1);
            for (std::size_t x = 0; x < n; ++x)
                weighted[x] = beta[x] > 0.0 ? std::exp(ll[x] + std::log(beta[x]) - top) : 0.0;
        }
        double top = 0.0;
        for (std::size_t x = 0; x < n; ++x) {
            double acc = 0.0;
            const auto& row = model.transition.rows[x];
            for (std::size_t z = 0; z < n; ++z) acc += row[z] * weighted[z];
            beta[x] = acc;
            top = std::max(top, acc);
        }
        if (!(top > 0.0)) throw ZeroLikelihood(t + 1);
        for (double& b : beta) b /= top;
    }

    std::vector<double> post(n);
    double total = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
        post[x] = prior[x] * beta[x];
        total += post[x];
    }
    if (!(total > 0.0)) throw ZeroLikelihood(1);
    return ProbabilityVector::normalized(std::move(post));
}

ProbabilityVector filter_kernel_sample(const HmmModel& model, const ProbabilityVector& nu,
                                       std::uint64_t seed)
{
    CounterRng rng(seed);
    const std::size_t previous = rng.categorical(nu.weights());
    const std::size_t current = rng.categorical(model.transition.row(previous));
    const Observation y = sample_observation(model, current, rng);
    return bayes_update(model, nu, y);
}

ProbabilityVector barycenter(std::span<const std::pair<double, ProbabilityVector>> measures)
{
    if (measures.empty()) throw std::invalid_argument("barycenter of an empty family");
    const std::size_t n = measures.front().second.size();
    std::vector<double> out(n, 0.0);
    double total_weight = 0.0;
    for (const auto& [w, nu] : measures) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw std::invalid_argument("barycenter weights must be nonnegative");
        if (nu.size() != n) throw std::invalid_argument("barycenter of measures of different sizes");
        total_weight += w;
        for (std::size_t i = 0; i < n; ++i) out[i] += w * nu[i];
    }
    if (std::abs(total_weight - 1.0) > ProbabilityVector::kSumTolerance)
        throw std::invalid_argument("barycenter weights must sum to 1");
    return ProbabilityVector::normalized(std::move(out));
}

ProbabilityVector occupation_measure(const FilterPath& path, std::size_t burn_in)
{
    if (burn_in >= path.steps.size())
        throw std::invalid_argument("burn-in leaves no filter states to average");
    const std::size_t n = path.steps.front().size();
    const double count = static_cast<double>(path.steps.size() - burn_in);
    std::vector<double> out(n, 0.0);
    for (std::size_t k = burn_in; k < path.steps.size(); ++k)
        for (std::size_t i = 0; i < n; ++i) out[i] += path.steps[k][i];
    for (double& v : out) v /= count;
    return ProbabilityVector::normalized(std::move(out));
}

ThreeFilters three_filters(const HmmModel& model, std::size_t n, std::uint64_t seed)
{
    ThreeFilters out;
    out.trajectory = simulate(model, n, seed);
    out.minimal = run_filter(model, model.stationary, out.trajectory.observations);
    out.maximal = run_filter(model,
                             ProbabilityVector::point_mass(model.states(), out.trajectory.states[0]),
                             out.trajectory.observations);
    return out;
}

void write_filter_path(std::ostream& os, const FilterPath& path,
                       std::span<const std::string> labels)
{
    std::vector<std::string> row;
    row.emplace_back("k");
    row.insert(row.end(), labels.begin(), labels.end());
    write_row(os, row);
    for (std::size_t k = 0; k < path.steps.size(); ++k) {
        row.clear();
        row.push_back(std::to_string(k));
        for (double w : path.steps[k].weights()) row.push_back(format_real(w));
        write_row(os, row);
    }
}

}  // namespace filterlab
