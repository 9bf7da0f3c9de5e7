#include "filterlab/rwrs.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "filterlab/rng.hpp"
#include "filterlab/scenery.hpp"
#include "filterlab/table.hpp"

namespace filterlab {

namespace {

int mod3(int v) { return ((v % kScenerySymbols) + kScenerySymbols) % kScenerySymbols; }

/// First hitting index of every partial-sum level reached by the window.
std::map<long, std::size_t> first_hits(const std::vector<ZTriple>& entries, std::size_t count)
{
    std::map<long, std::size_t> hits;
    long sum = 0;
    for (std::size_t k = 0; k < count; ++k) {
        hits.emplace(sum, k);
        sum += entries[k].step;
    }
    return hits;
}

}  // namespace

Scenery::Scenery(long first, std::vector<int> values) : first_(first), values_(std::move(values))
{
    for (int v : values_)
        if (v < 0 || v >= kScenerySymbols)
            throw std::invalid_argument("scenery symbols must lie in {0,1,2}");
}

int Scenery::at(long j) const
{
    if (!contains(j))
        throw std::out_of_range("scenery site " + std::to_string(j) + " outside [" +
                                std::to_string(first_) + ", " + std::to_string(last()) + "]");
    return values_[static_cast<std::size_t>(j - first_)];
}

int Scenery::increment(long j) const { return mod3(at(j) - at(j - 1)); }

RwrsWindow make_rwrs_window(Scenery scenery, std::vector<int> steps)
{
    if (steps.empty()) throw std::invalid_argument("a window needs at least the step delta_1");
    for (int s : steps)
        if (s != 1 && s != -1) throw std::invalid_argument("walk steps must be +1 or -1");

    RwrsWindow w;
    const std::size_t n = steps.size() - 1;
    w.walk.resize(n + 1);
    w.z.resize(n + 1);
    long position = 0;
    for (std::size_t k = 0; k <= n; ++k) {
        if (k > 0) position += steps[k - 1];
        w.walk[k] = position;
        if (!scenery.contains(position - 1) || !scenery.contains(position))
            throw WalkExitsScenery("walk reaches site " + std::to_string(position) + " at time " +
                                   std::to_string(k) + ", outside scenery range [" +
                                   std::to_string(scenery.first() + 1) + ", " +
                                   std::to_string(scenery.last()) + "]");
        w.z[k] = ZTriple{steps[k], scenery.at(position - 1), scenery.at(position)};
    }
    w.scenery = std::move(scenery);
    w.steps = std::move(steps);
    return w;
}

RwrsWindow generate_rwrs(long half_width, std::size_t n, std::uint64_t seed)
{
    if (half_width <= static_cast<long>(n))
        throw std::invalid_argument("scenery half-width J = " + std::to_string(half_width) +
                                    " must exceed the horizon n = " + std::to_string(n));
    CounterRng rng(seed);
    const auto J = static_cast<std::size_t>(half_width);
    std::vector<int> xi(2 * J + 1);
    const std::size_t origin = J;
    xi[origin] = static_cast<int>(rng.below(kScenerySymbols));
    for (std::size_t j = 1; j <= J; ++j)
        xi[origin + j] = mod3(xi[origin + j - 1] + static_cast<int>(rng.below(kScenerySymbols)));
    for (std::size_t j = 1; j <= J; ++j)
        xi[origin - j] = mod3(xi[origin - j + 1] - static_cast<int>(rng.below(kScenerySymbols)));

    std::vector<int> steps(n + 1);
    for (int& s : steps) s = rng.sign();
    return make_rwrs_window(Scenery(-half_width, std::move(xi)), std::move(steps));
}

std::vector<std::array<double, 3>> observe_rwrs(const RwrsWindow& window, double eps,
                                                std::uint64_t seed)
{
    if (!(eps > 0.0)) throw std::invalid_argument("observation noise eps must be positive");
    CounterRng rng(seed);
    std::vector<std::array<double, 3>> ys(window.z.size());
    for (std::size_t k = 0; k < ys.size(); ++k) {
        auto& y = ys[k];
        for (double& c : y) c = eps * rng.normal();
        y[static_cast<std::size_t>(window.observed_increment(k))] += 1.0;
    }
    return ys;
}

std::vector<int> RwrsState::first_components() const
{
    std::vector<int> out(entries.size());
    std::transform(entries.begin(), entries.end(), out.begin(),
                   [](const ZTriple& z) { return z.step; });
    return out;
}

RwrsState state_at(const RwrsWindow& window, std::size_t k)
{
    if (k >= window.z.size()) throw std::out_of_range("state index beyond the window");
    return RwrsState{std::vector<ZTriple>(window.z.begin() + static_cast<long>(k), window.z.end())};
}

int rwrs_observation_index(const RwrsState& x)
{
    if (x.entries.empty()) throw std::invalid_argument("empty state window");
    return observation_symbol(x.entries.front());
}

RwrsState rwrs_transition_map(const RwrsState& x, int a)
{
    if (a != 1 && a != -1) throw std::invalid_argument("transition label must be +1 or -1");
    const auto steps = x.first_components();
    const auto tau = stopping_time(steps, -a);
    if (!tau)
        throw StoppingTimeOverflow("StoppingTimeOverflow: tau_" + std::to_string(-a) +
                                   " is not reached within a window of " +
                                   std::to_string(x.size()) + " entries");
    RwrsState out;
    out.entries.reserve(x.size() + 1);
    out.entries.push_back(ZTriple{a, x.entries[*tau].left, x.entries[*tau].right});
    out.entries.insert(out.entries.end(), x.entries.begin(), x.entries.end());
    return out;
}

MetricValue rwrs_metric(const RwrsState& x, const RwrsState& y)
{
    if (x.entries.empty() || y.entries.empty())
        throw std::invalid_argument("metric needs nonempty windows");
    const std::size_t m = std::min(x.size(), y.size());

    MetricValue d;
    for (std::size_t k = 0; k < m; ++k)
        if (!(x.entries[k] == y.entries[k])) d.value += std::ldexp(1.0, -static_cast<int>(k));

    const auto hx = first_hits(x.entries, m);
    const auto hy = first_hits(y.entries, m);
    // Reached levels form intervals containing 0 (nearest-neighbour walk).
    const long lo = std::min(hx.begin()->first, hy.begin()->first);
    const long hi = std::max(hx.rbegin()->first, hy.rbegin()->first);
    for (long j = lo; j <= hi; ++j) {
        const auto ix = hx.find(j);
        const auto iy = hy.find(j);
        double term = 1.0;
        if (ix != hx.end() && iy != hy.end())
            term = ix->second == iy->second ? 0.0 : 1.0;
        d.value += term * std::ldexp(1.0, -static_cast<int>(std::labs(j)));
    }
    const long radius = std::min(-lo, hi);
    d.error_bound = std::ldexp(1.0, 1 - static_cast<int>(m)) +
                    2.0 * std::ldexp(1.0, -static_cast<int>(radius));
    return d;
}

void write_rwrs_window(std::ostream& os, const RwrsWindow& window)
{
    os << "k\tstep\twalk\tleft\tright\tincrement\n";
    for (std::size_t k = 0; k < window.z.size(); ++k) {
        const auto& z = window.z[k];
        os << k << '\t' << z.step << '\t' << window.walk[k] << '\t' << z.left << '\t' << z.right
           << '\t' << observation_symbol(z) << '\n';
    }
}

void write_scenery(std::ostream& os, const Scenery& scenery)
{
    os << "j\txi\n";
    for (long j = scenery.first(); j <= scenery.last(); ++j) os << j << '\t' << scenery.at(j) << '\n';
}

std::vector<ZTriple> read_rwrs_triples(std::istream& is)
{
    std::vector<ZTriple> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto f = split_fields(line);
        if (f.empty() || f[0][0] == '#' || f[0] == "k") continue;
        if (f.size() < 5)
            throw std::invalid_argument("window line " + std::to_string(lineno) +
                                        ": expected k step walk left right [increment]");
        try {
            ZTriple z{std::stoi(f[1]), std::stoi(f[3]), std::stoi(f[4])};
            if ((z.step != 1 && z.step != -1) || z.left < 0 || z.left > 2 || z.right < 0 ||
                z.right > 2)
                throw std::invalid_argument("value out of range");
            out.push_back(z);
        } catch (const std::exception& e) {
            throw std::invalid_argument("window line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace filterlab
