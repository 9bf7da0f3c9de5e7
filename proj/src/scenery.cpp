#include "filterlab/scenery.hpp"

#include <istream>
#include <ostream>

#include "filterlab/rng.hpp"
#include "filterlab/stats.hpp"
#include "filterlab/table.hpp"

namespace filterlab {

int discretize_observation(std::span<const double, 3> y)
{
    int best = 0;
    for (int i = 1; i < 3; ++i)
        if (y[static_cast<std::size_t>(i)] > y[static_cast<std::size_t>(best)]) best = i;
    return best;
}

ChannelErrorEstimate channel_error_from_epsilon(double eps, std::size_t replicates,
                                                std::uint64_t seed)
{
    if (!(eps > 0.0)) throw std::invalid_argument("channel calibration needs eps > 0");
    if (replicates == 0) throw std::invalid_argument("channel calibration needs replicates > 0");
    CounterRng rng(seed);
    std::size_t wrong = 0;
    for (std::size_t r = 0; r < replicates; ++r) {
        std::array<double, 3> y{1.0, 0.0, 0.0};
        for (double& c : y) c += eps * rng.normal();
        if (discretize_observation(y) != 0) ++wrong;
    }
    // P[wrong] = 2 delta / 3.
    const auto p = estimate_proportion(wrong, replicates);
    return ChannelErrorEstimate{1.5 * p.mean, 1.5 * p.halfwidth, replicates};
}

std::vector<int> apply_channel(std::span<const int> symbols, double delta, std::uint64_t seed)
{
    if (!(delta >= 0.0 && delta <= 1.0))
        throw std::invalid_argument("channel error rate must lie in [0, 1]");
    CounterRng rng(seed);
    std::vector<int> out(symbols.begin(), symbols.end());
    for (int& s : out)
        if (rng.bernoulli(delta)) s = static_cast<int>(rng.below(kScenerySymbols));
    return out;
}

std::optional<std::size_t> stopping_time(std::span<const int> first_components, long j)
{
    long sum = 0;
    for (std::size_t k = 0; k < first_components.size(); ++k) {
        if (sum == j) return k;
        sum += first_components[k];
    }
    return std::nullopt;
}

ExtractedScenery extract_scenery(std::span<const ZTriple> window)
{
    ExtractedScenery out;
    long sum = 0;
    for (const auto& z : window) {
        out.scenery.emplace(sum, z.right);  // keeps the first visit only
        sum += z.step;
    }
    for (const auto& [j, v] : out.scenery) {
        const auto prev = out.scenery.find(j - 1);
        if (prev != out.scenery.end())
            out.increments.emplace(j, ((v - prev->second) % 3 + 3) % 3);
    }
    return out;
}

ExtractedScenery extract_scenery(const RwrsState& state) { return extract_scenery(state.entries); }

SymbolMap reflect_shift(const SymbolMap& s, int a, long b)
{
    if (a != 1 && a != -1) throw std::invalid_argument("reflection flag must be +1 or -1");
    SymbolMap out;
    // t_n = s_m with m = a n + b, i.e. n = a (m - b).
    for (const auto& [m, v] : s) out.emplace(a * (m - b), v);
    return out;
}

SymbolMap to_symbol_map(std::span<const int> symbols, long offset)
{
    SymbolMap out;
    for (std::size_t i = 0; i < symbols.size(); ++i)
        out.emplace(offset + static_cast<long>(i), symbols[i]);
    return out;
}

AlignmentResult align(const SymbolMap& seq_a, const SymbolMap& seq_b, std::size_t min_overlap)
{
    if (min_overlap == 0) throw std::invalid_argument("min_overlap must be at least 1");
    if (seq_a.empty() || seq_b.empty())
        throw AlignmentError(AlignmentError::Kind::NoMatch, "empty sequence");

    const long a_lo = seq_a.begin()->first;
    const long a_hi = seq_a.rbegin()->first;
    std::vector<int> dense(static_cast<std::size_t>(a_hi - a_lo + 1), -1);
    for (const auto& [m, v] : seq_a) dense[static_cast<std::size_t>(m - a_lo)] = v;
    const long b_lo = seq_b.begin()->first;
    const long b_hi = seq_b.rbegin()->first;

    std::vector<AlignmentResult> matches;
    for (int a : {1, -1}) {
        const long shift_lo = a > 0 ? a_lo - b_hi : a_lo + b_lo;
        const long shift_hi = a > 0 ? a_hi - b_lo : a_hi + b_hi;
        for (long b = shift_lo; b <= shift_hi; ++b) {
            std::size_t overlap = 0;
            bool agree = true;
            for (const auto& [n, v] : seq_b) {
                const long m = a * n + b;
                if (m < a_lo || m > a_hi) continue;
                const int u = dense[static_cast<std::size_t>(m - a_lo)];
                if (u < 0) continue;
                if (u != v) {
                    agree = false;
                    break;
                }
                ++overlap;
            }
            if (agree && overlap >= min_overlap) matches.push_back({a, b, overlap, false});
        }
    }

    if (matches.empty())
        throw AlignmentError(AlignmentError::Kind::NoMatch,
                             "no reflection/shift agrees on " + std::to_string(min_overlap) +
                                 " or more common sites");
    if (matches.size() > 1)
        throw AlignmentError(AlignmentError::Kind::Ambiguous,
                             std::to_string(matches.size()) + " reflection/shift pairs agree, e.g. (" +
                                 std::to_string(matches[0].a) + ", " + std::to_string(matches[0].b) +
                                 ") and (" + std::to_string(matches[1].a) + ", " +
                                 std::to_string(matches[1].b) + ")");
    matches.front().unique = true;
    return matches.front();
}

void write_symbol_map(std::ostream& os, const SymbolMap& map)
{
    for (const auto& [j, v] : map) os << j << '\t' << v << '\n';
}

SymbolMap read_symbol_map(std::istream& is)
{
    SymbolMap out;
    std::string line;
    std::size_t lineno = 0;
    bool first_data = true;
    while (std::getline(is, line)) {
        ++lineno;
        const auto f = split_fields(line);
        if (f.empty() || f[0][0] == '#') continue;
        long j = 0;
        int v = 0;
        try {
            std::size_t used = 0;
            j = std::stol(f.at(0), &used);
            if (used != f[0].size()) throw std::invalid_argument("index");
            v = std::stoi(f.at(1), &used);
            if (used != f[1].size()) throw std::invalid_argument("symbol");
        } catch (const std::exception&) {
            if (first_data) {  // header line
                first_data = false;
                continue;
            }
            throw std::invalid_argument("symbol map line " + std::to_string(lineno) +
                                        ": expected '<index> <symbol>'");
        }
        first_data = false;
        if (!out.emplace(j, v).second)
            throw std::invalid_argument("symbol map line " + std::to_string(lineno) +
                                        ": duplicate index " + std::to_string(j));
    }
    return out;
}

void write_stopping_times(std::ostream& os, std::span<const int> first_components, long lo,
                          long hi)
{
    for (long j = lo; j <= hi; ++j) {
        const auto tau = stopping_time(first_components, j);
        os << j << '\t';
        if (tau)
            os << *tau;
        else
            os << "INF";
        os << '\n';
    }
}

}  // namespace filterlab
