#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>

#include <sstream>

#include "filterlab/rng.hpp"
#include "filterlab/rwrs.hpp"
#include "filterlab/scenery.hpp"
#include "filterlab/stats.hpp"

using namespace filterlab;

namespace {

std::vector<int> random_symbols(std::size_t n, std::uint64_t seed)
{
    CounterRng rng(seed);
    std::vector<int> out(n);
    for (int& s : out) s = static_cast<int>(rng.below(3));
    return out;
}

}  // namespace

TEST_SUITE("scenery")
{
    TEST_CASE("discretize_observation")
    {
        const std::array<double, 3> clear{0.9, 0.1, -0.2};
        CHECK(discretize_observation(clear) == 0);
        const std::array<double, 3> e2{0.0, 0.0, 1.0};
        CHECK(discretize_observation(e2) == 2);
        const std::array<double, 3> tie{1.0, 1.0, 0.0};
        CHECK(discretize_observation(tie) == 0);
        const std::array<double, 3> late_tie{0.0, 1.0, 1.0};
        CHECK(discretize_observation(late_tie) == 1);
    }

    TEST_CASE("channel_error_from_epsilon")
    {
        CHECK(channel_error_from_epsilon(0.01, 20000, 1).delta < 0.001);
        const auto big = channel_error_from_epsilon(1e4, 20000, 2);
        CHECK(std::abs(big.delta - 1.0) <= big.halfwidth);
        const auto a = channel_error_from_epsilon(0.1, 20000, 3);
        const auto b = channel_error_from_epsilon(0.5, 20000, 4);
        const auto c = channel_error_from_epsilon(2.0, 20000, 5);
        CHECK(a.delta + a.halfwidth < b.delta - b.halfwidth);
        CHECK(b.delta + b.halfwidth < c.delta - c.halfwidth);
        CHECK_THROWS_AS(channel_error_from_epsilon(0.0, 10, 1), std::invalid_argument);
    }

    TEST_CASE("apply_channel")
    {
        const auto sym = random_symbols(10000, 8);
        CHECK(apply_channel(sym, 0.0, 1) == sym);

        // delta = 1: output uniform whatever the input.
        const std::vector<int> zeros(10000, 0);
        const auto out = apply_channel(zeros, 1.0, 2);
        std::array<double, 3> counts{0, 0, 0};
        for (int s : out) counts[static_cast<std::size_t>(s)] += 1.0;
        double chi = 0.0;
        for (double cnt : counts) chi += (cnt - 10000.0 / 3) * (cnt - 10000.0 / 3) / (10000.0 / 3);
        CHECK(chi < boost::math::quantile(boost::math::chi_squared(2.0), 0.999));

        const auto noisy = apply_channel(sym, 0.3, 3);
        std::size_t agree = 0;
        for (std::size_t i = 0; i < sym.size(); ++i) agree += noisy[i] == sym[i];
        const auto rate = estimate_proportion(agree, sym.size());
        CHECK(std::abs(rate.mean - 0.8) <= rate.halfwidth);
        CHECK_THROWS_AS(apply_channel(sym, 1.5, 1), std::invalid_argument);
    }

    TEST_CASE("stopping times")
    {
        const std::vector<int> up(10, 1);
        CHECK(stopping_time(up, 0) == 0u);
        CHECK(stopping_time(up, 2) == 2u);
        CHECK_FALSE(stopping_time(up, -1));
        CHECK_FALSE(stopping_time(up, 10));  // would index past the window

        std::vector<int> zigzag(50);
        for (std::size_t i = 0; i < zigzag.size(); ++i) zigzag[i] = i % 2 == 0 ? 1 : -1;
        CHECK_FALSE(stopping_time(zigzag, -1));
        CHECK(stopping_time(zigzag, 1) == 1u);

        CHECK_FALSE(stopping_time(std::vector<int>{}, 0));
        std::ostringstream os;
        write_stopping_times(os, up, -1, 1);
        CHECK(os.str() == "-1\tINF\n0\t0\n1\t1\n");
    }

    TEST_CASE("extract_scenery")
    {
        const auto single = extract_scenery(std::vector<ZTriple>{ZTriple{1, 2, 1}});
        CHECK(single.scenery == SymbolMap{{0, 1}});
        CHECK(single.increments.empty());

        for (std::uint64_t seed = 0; seed < 30; ++seed) {
            const auto w = generate_rwrs(600, 500, seed);
            const auto ex = extract_scenery(state_at(w, 0));
            const auto [lo, hi] = std::minmax_element(w.walk.begin(), w.walk.end());
            CHECK(ex.scenery.size() == static_cast<std::size_t>(*hi - *lo + 1));
            for (long j = *lo; j <= *hi; ++j) CHECK(ex.scenery.at(j) == w.scenery.at(j));
            for (const auto& [j, eta] : ex.increments) CHECK(eta == w.scenery.increment(j));
        }

        const auto flat = make_rwrs_window(Scenery(-20, std::vector<int>(41, 1)),
                                           {1, 1, -1, -1, -1, 1, -1, -1, 1});
        for (const auto& [j, eta] : extract_scenery(flat.z).increments) CHECK(eta == 0);
    }

    TEST_CASE("reflect_shift")
    {
        const SymbolMap s{{0, 0}, {1, 1}, {2, 2}, {5, 1}};
        const auto t = reflect_shift(s, -1, 5);
        // t_n = s_{5 - n}
        CHECK(t.at(5) == 0);
        CHECK(t.at(3) == 2);
        CHECK(t.at(0) == 1);
        CHECK(reflect_shift(t, -1, 5) == s);
        CHECK_THROWS_AS(reflect_shift(s, 2, 0), std::invalid_argument);
    }

    TEST_CASE("align")
    {
        const auto a = to_symbol_map(random_symbols(50, 77));
        const auto self = align(a, a);
        CHECK(self.a == 1);
        CHECK(self.b == 0);
        CHECK(self.unique);
        CHECK(self.overlap_length == 50);

        const auto reflected = reflect_shift(a, -1, 5);
        const auto r = align(a, reflected);
        CHECK(r.a == -1);
        CHECK(r.b == 5);

        const auto flat = to_symbol_map(std::vector<int>(60, 2));
        try {
            align(flat, flat);
            FAIL("expected Ambiguous");
        } catch (const AlignmentError& e) {
            CHECK(e.kind() == AlignmentError::Kind::Ambiguous);
            CHECK(std::string(e.what()).find("Ambiguous") == 0);
        }

        const auto other = to_symbol_map(random_symbols(50, 78));
        CHECK_THROWS_AS(align(a, other, 40), AlignmentError);

        // Holes: only sites defined in both are compared.
        SymbolMap holes = a;
        for (long j = 0; j < 50; j += 3) holes.erase(j);
        const auto h = align(a, reflect_shift(holes, 1, -7));
        CHECK(h.a == 1);
        CHECK(h.b == -7);
        CHECK(h.overlap_length == holes.size());
    }

    TEST_CASE("symbol maps round-trip")
    {
        SymbolMap m{{-3, 1}, {0, 2}, {4, 0}};
        std::stringstream ss;
        ss << "j\txi\n";
        write_symbol_map(ss, m);
        CHECK(read_symbol_map(ss) == m);
        std::stringstream dup("1 0\n1 2\n");
        CHECK_THROWS_AS(read_symbol_map(dup), std::invalid_argument);
    }
}
