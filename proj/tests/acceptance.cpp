// Acceptance gate: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "filterlab/ergodicity.hpp"
#include "filterlab/filter.hpp"
#include "filterlab/models.hpp"
#include "filterlab/rng.hpp"
#include "filterlab/rwrs.hpp"
#include "filterlab/scenery.hpp"
#include "filterlab/stats.hpp"
#include "oracle.hpp"

using namespace filterlab;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* pattern, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

int failures = 0;

void criterion(int id, const char* name, double limit_seconds, const std::function<Outcome()>& body)
{
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < limit_seconds;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s  %2d %s: %s [%.2f s, limit %.0f s%s]\n", pass ? "PASS" : "FAIL", id, name, o.detail.c_str(),
                secs, limit_seconds, in_time ? "" : ", too slow");
    std::fflush(stdout);
}

double bit0(const ProbabilityVector& p) { return p.expectation(xor_current_bit_zero()); }

HmmModel random_gaussian_model(std::size_t states, std::uint64_t seed)
{
    const auto base = build_random_model(states, 1, seed);
    CounterRng rng(derive_stream(seed, 99));
    Matrix means(states, std::vector<double>(2));
    for (auto& row : means)
        for (double& v : row) v = rng.uniform();
    return with_gaussian_channel(base, means, 0.2 + 0.5 * rng.uniform());
}

std::vector<int> random_symbols(std::size_t n, CounterRng& rng)
{
    std::vector<int> out(n);
    for (int& s : out) s = static_cast<int>(rng.below(3));
    return out;
}

// Tolerances and thresholds.
constexpr double kInvarianceTol = 1e-12;
constexpr double kUpperTol = 0.015;
// Pilot (seeds 1-5, 10^4 replicates, docs/pilot_noisy_xor_gap.tsv): |gap(50)| <= 1.3e-4
// with half-width about 2e-4, against gap(5) near 0.115.
constexpr double kNoisyGapThreshold = 2e-3;
constexpr std::uint64_t kNoisyGapSeed = 2718;
constexpr double kOracleTol = 1e-10;
constexpr double kExactZeroTol = 1e-14;
constexpr double kAlignSuccessRate = 0.99;

Outcome xor_invariance()
{
    const auto m = build_xor_model(false);
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto path = run_filter(m, m.stationary, simulate(m, 200, seed).observations);
        for (const auto& p : path.steps) worst = std::max(worst, std::abs(bit0(p) - 0.5));
    }
    return {worst < kInvarianceTol, fmt("max |pi_k(bit0) - 1/2| = %.3g over 100 seeds, n = 200", worst)};
}

Outcome noiseless_gap()
{
    const auto m = build_xor_model(false);
    const ConvexStatistic stat{xor_current_bit_zero(), ConvexFunction::square()};
    const std::size_t hs[] = {5, 20, 50};
    const auto c = kunita_gap_curve(m, stat, hs, 10000, 1);
    bool ok = true;
    std::string detail;
    for (const auto& e : c) {
        ok = ok && e.lower == 0.25 && e.lower_variance == 0.0 && std::abs(e.upper - 0.5) < kUpperTol &&
             std::abs(e.gap() - 0.25) < kUpperTol;
        detail += fmt("n=%zu lower=%.17g var=%g upper=%.4f gap=%.4f; ", e.horizon, e.lower, e.lower_variance,
                      e.upper, e.gap());
    }
    return {ok, detail};
}

Outcome noisy_gap()
{
    const auto m = build_xor_model(true, 0.3);
    const ConvexStatistic stat{xor_current_bit_zero(), ConvexFunction::square()};
    const std::size_t hs[] = {5, 50};
    const auto c = kunita_gap_curve(m, stat, hs, 10000, kNoisyGapSeed);
    const double hi50 = c[1].gap() + c[1].gap_halfwidth();
    const double lo5 = c[0].gap() - c[0].gap_halfwidth();
    return {hi50 < lo5 && hi50 < kNoisyGapThreshold,
            fmt("gap(5) = %.5f +- %.5f, gap(50) = %.3g +- %.3g, threshold %.0e", c[0].gap(), c[0].gap_halfwidth(),
                c[1].gap(), c[1].gap_halfwidth(), kNoisyGapThreshold)};
}

Outcome oracle_equivalence()
{
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        CounterRng rng(derive_stream(seed, 7));
        const std::size_t states = 1 + rng.below(4);
        const std::size_t symbols = 1 + rng.below(3);
        const std::size_t n = rng.below(7);
        const auto m = build_random_model(states, symbols, seed, 0.3);
        const auto t = simulate(m, n, derive_stream(seed, 1));
        std::vector<double> w(states);
        for (double& v : w) v = 0.05 + rng.uniform();
        const auto prior = ProbabilityVector::normalized(w);
        const auto path = run_filter(m, prior, t.observations);
        for (std::size_t k = 0; k <= n; ++k) {
            const auto truth =
                oracle::posterior(m, {prior.weights().begin(), prior.weights().end()}, t.observations, k);
            worst = std::max(worst, oracle::max_abs_diff(path[k].weights(), truth.last));
            const auto s = smoother(m, prior, std::span(t.observations).first(k));
            worst = std::max(worst, oracle::max_abs_diff(s.weights(), truth.first));
        }
    }
    return {worst < kOracleTol, fmt("max abs diff %.3g over 200 models", worst)};
}

Outcome regularity()
{
    const std::size_t hs[] = {1, 2, 3, 5, 10};
    const auto pairs = absolute_regularity(build_pair_chain(3), hs);
    const auto id = absolute_regularity(build_identity_chain(4), hs);
    bool constant = true;
    for (double v : id.values) constant = constant && v == id.values.front();
    // For the identity chain the value is sum_i mu_i (1 - mu_i) = 3/4.
    const bool id_ok = constant && std::abs(id.values.front() - 0.75) < 1e-15;
    return {pairs.values[0] > 0.0 && std::abs(pairs.values[1]) < kExactZeroTol && id_ok,
            fmt("pair chain beta(1) = %.6f, beta(2) = %.3g; identity chain constant %.17g", pairs.values[0],
                pairs.values[1], id.values.front())};
}

Outcome extraction()
{
    int exact = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto w = generate_rwrs(2000, 1000, seed);
        const auto ex = extract_scenery(state_at(w, 0));
        const auto [lo, hi] = std::minmax_element(w.walk.begin(), w.walk.end());
        bool ok = ex.scenery.size() == static_cast<std::size_t>(*hi - *lo + 1);
        for (long j = *lo; ok && j <= *hi; ++j) ok = ex.scenery.count(j) && ex.scenery.at(j) == w.scenery.at(j);
        exact += ok;
    }
    return {exact == 100, fmt("%d/100 seeds exact on the visited range", exact)};
}

Outcome alignment()
{
    CounterRng rng(derive_stream(424242, 0));
    int correct = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const auto base = random_symbols(100, rng);
        const auto a = to_symbol_map(base);
        const int sign = rng.below(2) ? 1 : -1;
        // Shifts leaving at least 50 of the 100 sites of B inside A.
        const long b = sign == 1 ? static_cast<long>(rng.below(101)) - 50 : 49 + static_cast<long>(rng.below(101));
        SymbolMap bm;
        for (long n = 0; n < 100; ++n) {
            const long src = sign * n + b;
            bm[n] = src >= 0 && src < 100 ? base[static_cast<std::size_t>(src)] : static_cast<int>(rng.below(3));
        }
        try {
            const auto r = align(a, bm);
            correct += r.unique && r.a == sign && r.b == b;
        } catch (const AlignmentError&) {
        }
    }
    int ambiguous = 0;
    for (int s = 0; s < 3; ++s) {
        const auto flat = to_symbol_map(std::vector<int>(100, s));
        try {
            align(flat, flat);
        } catch (const AlignmentError& e) {
            ambiguous += e.kind() == AlignmentError::Kind::Ambiguous;
        }
    }
    const double rate = correct / 500.0;
    return {rate >= kAlignSuccessRate && ambiguous == 3,
            fmt("%d/500 recovered uniquely (need %.0f%%), constant sequences Ambiguous %d/3", correct,
                100 * kAlignSuccessRate, ambiguous)};
}

Outcome calibration()
{
    const double eps[] = {0.1, 0.3, 1.0, 10.0};
    std::vector<ChannelErrorEstimate> est;
    for (std::size_t i = 0; i < 4; ++i) est.push_back(channel_error_from_epsilon(eps[i], 100000, derive_stream(31, i)));
    bool monotone = true;
    for (std::size_t i = 1; i < est.size(); ++i)
        monotone = monotone && est[i - 1].delta + est[i - 1].halfwidth < est[i].delta - est[i].halfwidth;
    const auto big = channel_error_from_epsilon(1e4, 100000, derive_stream(31, 9));
    const bool big_ok = std::abs(big.delta - 1.0) <= big.halfwidth;

    CounterRng rng(derive_stream(31, 10));
    const auto symbols = random_symbols(100000, rng);
    const auto& d = est[1];
    const auto noisy = apply_channel(symbols, d.delta, derive_stream(31, 11));
    std::size_t agree = 0;
    for (std::size_t i = 0; i < symbols.size(); ++i) agree += noisy[i] == symbols[i];
    const auto rate = estimate_proportion(agree, symbols.size());
    const double expected = 1.0 - 2.0 * d.delta / 3.0;
    const bool channel_ok = std::abs(rate.mean - expected) <= rate.halfwidth + 2.0 * d.halfwidth / 3.0;

    std::string detail;
    for (std::size_t i = 0; i < 4; ++i) detail += fmt("delta(%g) = %.4f +- %.4f; ", eps[i], est[i].delta, est[i].halfwidth);
    detail += fmt("delta(1e4) = %.4f +- %.4f; agreement %.4f vs %.4f", big.delta, big.halfwidth, rate.mean, expected);
    return {monotone && big_ok && channel_ok, detail};
}

Outcome tail_probe()
{
    const std::size_t hs[] = {10, 1000};
    const auto r = tail_triviality_probe(1001, hs, ZCylinder{1, 0}, 100000, 5);
    const auto& v = r.deviation.values;
    return {v[1] < v[0], fmt("deviation(10) = %.4f +- %.4f, deviation(1000) = %.4f +- %.4f, smallest atom %zu", v[0],
                             r.deviation.halfwidths[0], v[1], r.deviation.halfwidths[1], r.smallest_atom_count)};
}

Outcome sandwich()
{
    const std::size_t hs[] = {1, 2, 5, 10, 20};
    std::size_t checks = 0, violations = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const std::size_t states = 2 + seed % 3;
        const auto m = seed % 2 ? random_gaussian_model(states, seed) : build_random_model(states, 2 + seed % 2, seed);
        CounterRng rng(derive_stream(seed, 5));
        std::vector<double> f(states);
        for (double& v : f) v = rng.uniform();
        for (const auto& k : {ConvexFunction::square(), ConvexFunction::abs_deviation(0.5)})
            for (const auto& e : kunita_gap_curve(m, {f, k}, hs, 1000, seed)) {
                ++checks;
                violations += !(e.lower <= e.upper + e.gap_halfwidth());
            }
    }
    return {violations == 0, fmt("%zu violations in %zu (model, kappa, n) checks", violations, checks)};
}

}  // namespace

int main()
{
    criterion(1, "noiseless XOR filter invariance", 1, xor_invariance);
    criterion(2, "Kunita gap persists on noiseless XOR", 30, noiseless_gap);
    criterion(3, "Kunita gap closes on noisy XOR", 300, noisy_gap);
    criterion(4, "filter and smoother match path enumeration", 10, oracle_equivalence);
    criterion(5, "absolute regularity of reference chains", 1, regularity);
    criterion(6, "scenery extraction", 5, extraction);
    criterion(7, "alignment", 5, alignment);
    criterion(8, "channel calibration", 30, calibration);
    criterion(9, "tail-triviality probe", 120, tail_probe);
    criterion(10, "Jensen sandwich on random models", 60, sandwich);
    std::printf("%s: %d of 10 criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
