#include "filterlab/models.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "filterlab/rng.hpp"

namespace filterlab {

namespace {

DiscreteChannel uninformative(std::size_t states)
{
    return DiscreteChannel{Matrix(states, std::vector<double>{1.0})};
}

std::vector<double> dirichlet_one(std::size_t n, CounterRng& rng)
{
    // Dirichlet(1, ..., 1): normalized standard exponentials.
    std::vector<double> w(n);
    double total = 0.0;
    for (double& v : w) {
        v = -std::log(rng.uniform_open());
        total += v;
    }
    for (double& v : w) v /= total;
    return w;
}

}  // namespace

HmmModel build_xor_model(bool noisy, double eps)
{
    if (noisy && !(eps > 0.0))
        throw std::invalid_argument("noisy XOR model needs eps > 0, got " + std::to_string(eps));

    Matrix rows(4, std::vector<double>(4, 0.0));
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int next = 0; next < 2; ++next) rows[xor_state(a, b)][xor_state(b, next)] = 0.5;

    std::vector<std::string> labels{"00", "01", "10", "11"};
    ObservationChannel channel;
    if (noisy) {
        Matrix means(4);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) means[xor_state(a, b)] = {a == b ? 0.0 : 1.0};
        channel = GaussianChannel{std::move(means), eps};
    } else {
        Matrix emission(4, std::vector<double>(2, 0.0));
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) emission[xor_state(a, b)][a == b ? 0 : 1] = 1.0;
        channel = DiscreteChannel{std::move(emission)};
    }
    return make_model(TransitionMatrix{std::move(rows)}, std::move(channel), std::move(labels),
                      ProbabilityVector::uniform(4));
}

std::vector<double> xor_current_bit_zero()
{
    std::vector<double> f(4, 0.0);
    f[xor_state(0, 0)] = 1.0;
    f[xor_state(1, 0)] = 1.0;
    return f;
}

HmmModel build_pair_chain(std::size_t alphabet)
{
    if (alphabet == 0) throw std::invalid_argument("pair chain needs a nonempty alphabet");
    const std::size_t n = alphabet * alphabet;
    const double p = 1.0 / static_cast<double>(alphabet);
    Matrix rows(n, std::vector<double>(n, 0.0));
    std::vector<std::string> labels;
    for (std::size_t a = 0; a < alphabet; ++a)
        for (std::size_t b = 0; b < alphabet; ++b) {
            labels.push_back(std::to_string(a) + std::to_string(b));
            for (std::size_t c = 0; c < alphabet; ++c) rows[a * alphabet + b][b * alphabet + c] = p;
        }
    return make_model(TransitionMatrix{std::move(rows)}, uninformative(n), std::move(labels));
}

HmmModel build_identity_chain(std::size_t n)
{
    Matrix rows(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) rows[i][i] = 1.0;
    return make_model(TransitionMatrix{std::move(rows)}, uninformative(n), {},
                      ProbabilityVector::uniform(n));
}

HmmModel build_iid_chain(const ProbabilityVector& law)
{
    const std::size_t n = law.size();
    Matrix rows(n, std::vector<double>(law.weights().begin(), law.weights().end()));
    return make_model(TransitionMatrix{std::move(rows)}, uninformative(n), {}, law);
}

HmmModel build_random_model(std::size_t states, std::size_t symbols, std::uint64_t seed,
                            double sparsity)
{
    if (states == 0 || symbols == 0)
        throw std::invalid_argument("random model needs at least one state and one symbol");
    CounterRng rng(seed);
    Matrix rows(states);
    for (auto& r : rows) r = dirichlet_one(states, rng);
    Matrix emission(states);
    for (auto& r : emission) {
        r = dirichlet_one(symbols, rng);
        if (sparsity > 0.0) {
            const std::size_t keep = rng.below(symbols);
            for (std::size_t s = 0; s < symbols; ++s)
                if (s != keep && rng.bernoulli(sparsity)) r[s] = 0.0;
            double total = 0.0;
            for (double v : r) total += v;
            for (double& v : r) v /= total;
        }
    }
    return make_model(TransitionMatrix{std::move(rows)}, DiscreteChannel{std::move(emission)});
}

HmmModel with_gaussian_channel(const HmmModel& model, Matrix means, double eps)
{
    return make_model(model.transition, GaussianChannel{std::move(means), eps}, model.labels,
                      model.stationary);
}

}  // namespace filterlab
