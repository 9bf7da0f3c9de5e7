#include "filterlab/ergodicity.hpp"

#include <algorithm>
#include <cmath>

#include "filterlab/filter.hpp"
#include "filterlab/parallel.hpp"
#include "filterlab/rng.hpp"
#include "filterlab/stats.hpp"
#include "filterlab/table.hpp"

namespace filterlab {

namespace {

void require_increasing(std::span<const std::size_t> horizons)
{
    if (horizons.empty()) throw std::invalid_argument("no horizons requested");
    for (std::size_t i = 1; i < horizons.size(); ++i)
        if (horizons[i] <= horizons[i - 1])
            throw std::invalid_argument("horizons must be strictly increasing");
}

}  // namespace

std::string ConvexFunction::name() const
{
    return kind_ == Kind::Square ? "square" : "abs:" + format_real(center_);
}

ConvexFunction ConvexFunction::parse(const std::string& text)
{
    if (text == "square") return square();
    if (text.rfind("abs:", 0) == 0) return abs_deviation(parse_real(text.substr(4)));
    if (text == "abs") return abs_deviation(0.0);
    throw std::invalid_argument("unknown convex function '" + text +
                                "' (expected square or abs:<center>)");
}

GapEstimate kunita_gap(const HmmModel& model, const ConvexStatistic& stat, std::size_t n,
                       std::size_t replicates, std::uint64_t seed, std::size_t threads)
{
    const std::size_t horizons[] = {n};
    return kunita_gap_curve(model, stat, horizons, replicates, seed, threads).front();
}

std::vector<GapEstimate> kunita_gap_curve(const HmmModel& model, const ConvexStatistic& stat,
                                          std::span<const std::size_t> horizons,
                                          std::size_t replicates, std::uint64_t seed,
                                          std::size_t threads)
{
    if (horizons.empty()) throw std::invalid_argument("no horizons requested");
    if (replicates == 0) throw std::invalid_argument("replicates must be positive");
    if (stat.f.size() != model.states())
        throw std::invalid_argument("statistic f has " + std::to_string(stat.f.size()) +
                                    " entries, model has " + std::to_string(model.states()) +
                                    " states");
    const std::size_t longest = *std::max_element(horizons.begin(), horizons.end());
    const std::size_t h = horizons.size();

    // lower[i * replicates + r], upper[...] for horizon i, replicate r
    std::vector<double> lower(h * replicates), upper(h * replicates);
    parallel_for(replicates, threads, [&](std::size_t r) {
        const auto run = three_filters(model, longest, derive_stream(seed, r));
        for (std::size_t i = 0; i < h; ++i) {
            lower[i * replicates + r] = stat(run.minimal[horizons[i]]);
            upper[i * replicates + r] = stat(run.maximal[horizons[i]]);
        }
    });

    std::vector<GapEstimate> out(h);
    for (std::size_t i = 0; i < h; ++i) {
        const auto lo = estimate_mean(std::span(lower).subspan(i * replicates, replicates));
        const auto up = estimate_mean(std::span(upper).subspan(i * replicates, replicates));
        out[i] = GapEstimate{lo.mean,     up.mean,     lo.halfwidth, up.halfwidth,
                             lo.variance, up.variance, horizons[i],  replicates};
    }
    return out;
}

DecayCurve filter_stability(const HmmModel& model, const ProbabilityVector& prior1,
                            const ProbabilityVector& prior2, std::size_t n, std::uint64_t seed)
{
    const auto traj = simulate(model, n, seed);
    const auto a = run_filter(model, prior1, traj.observations);
    const auto b = run_filter(model, prior2, traj.observations);
    DecayCurve curve;
    for (std::size_t k = 0; k <= n; ++k) {
        curve.horizons.push_back(k);
        curve.values.push_back(total_variation(a[k], b[k]));
        curve.halfwidths.push_back(0.0);
    }
    return curve;
}

DecayCurve absolute_regularity(const HmmModel& model, std::span<const std::size_t> horizons)
{
    require_increasing(horizons);
    const std::size_t n = model.states();
    DecayCurve curve;
    curve.horizons.assign(horizons.begin(), horizons.end());
    curve.halfwidths.assign(horizons.size(), 0.0);

    // rows[x] = P^t(x, .)
    Matrix rows(n, std::vector<double>(n, 0.0));
    for (std::size_t x = 0; x < n; ++x) rows[x][x] = 1.0;
    std::size_t t = 0;
    for (std::size_t target : horizons) {
        for (; t < target; ++t)
            for (auto& r : rows) r = model.transition.propagate(r);
        double acc = 0.0;
        for (std::size_t x = 0; x < n; ++x)
            acc += model.stationary[x] * total_variation(rows[x], model.stationary.weights());
        curve.values.push_back(acc);
    }
    return curve;
}

ZCylinder ZCylinder::parse(const std::string& text)
{
    if (text == "true") return ZCylinder{};
    const auto eq = text.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("cylinder must be 'true' or '<component>=<value>', got '" +
                                    text + "'");
    ZCylinder c;
    try {
        c.component = std::stoi(text.substr(0, eq));
        c.value = std::stoi(text.substr(eq + 1));
    } catch (const std::exception&) {
        throw std::invalid_argument("cylinder '" + text + "' is not '<component>=<value>'");
    }
    if (c.component < 0 || c.component > 2)
        throw std::invalid_argument("cylinder component must be 0, 1 or 2");
    return c;
}

std::string ZCylinder::name() const
{
    if (component < 0) return "true";
    return std::to_string(component) + "=" + std::to_string(value);
}

TailProbeResult tail_triviality_probe(long half_width, std::span<const std::size_t> horizons,
                                      const std::function<bool(const ZTriple&)>& cylinder,
                                      std::size_t replicates, std::uint64_t seed,
                                      std::size_t threads, std::size_t min_atom_count)
{
    require_increasing(horizons);
    if (replicates == 0) throw std::invalid_argument("replicates must be positive");
    const std::size_t longest = horizons.back();
    if (half_width <= static_cast<long>(longest))
        throw std::invalid_argument("scenery half-width J = " + std::to_string(half_width) +
                                    " must exceed the largest horizon " + std::to_string(longest));
    const std::size_t h = horizons.size();

    std::vector<unsigned char> atom(replicates);
    std::vector<unsigned char> hit(replicates * h);
    parallel_for(replicates, threads, [&](std::size_t r) {
        const auto w = generate_rwrs(half_width, longest, derive_stream(seed, r));
        atom[r] = static_cast<unsigned char>(atom_index(w.z[0]));
        for (std::size_t i = 0; i < h; ++i) hit[r * h + i] = cylinder(w.z[horizons[i]]) ? 1 : 0;
    });

    std::vector<std::size_t> atom_count(kZAtoms, 0);
    std::vector<std::size_t> atom_hits(kZAtoms * h, 0);
    std::vector<std::size_t> total_hits(h, 0);
    for (std::size_t r = 0; r < replicates; ++r) {
        ++atom_count[atom[r]];
        for (std::size_t i = 0; i < h; ++i) {
            atom_hits[atom[r] * h + i] += hit[r * h + i];
            total_hits[i] += hit[r * h + i];
        }
    }

    TailProbeResult out;
    out.smallest_atom_count = *std::min_element(atom_count.begin(), atom_count.end());
    if (out.smallest_atom_count < min_atom_count) {
        const auto z = static_cast<std::size_t>(
            std::min_element(atom_count.begin(), atom_count.end()) - atom_count.begin());
        throw InsufficientReplicates("InsufficientReplicates: atom " + std::to_string(z) +
                                     " of Z_0 observed " + std::to_string(atom_count[z]) +
                                     " times, need at least " + std::to_string(min_atom_count) +
                                     " (increase replicates)");
    }

    for (std::size_t i = 0; i < h; ++i) {
        const auto overall = estimate_proportion(total_hits[i], replicates);
        double worst = -1.0;
        double worst_hw = 0.0;
        for (std::size_t z = 0; z < kZAtoms; ++z) {
            const auto cond = estimate_proportion(atom_hits[z * h + i], atom_count[z]);
            const double dev = std::abs(cond.mean - overall.mean);
            if (dev > worst) {
                worst = dev;
                worst_hw = cond.halfwidth + overall.halfwidth;
            }
        }
        out.deviation.horizons.push_back(horizons[i]);
        out.deviation.values.push_back(worst);
        out.deviation.halfwidths.push_back(worst_hw);
        out.unconditional.push_back(overall.mean);
        out.unconditional_halfwidth.push_back(overall.halfwidth);
    }
    return out;
}

std::vector<std::size_t> geometric_horizons(std::size_t limit)
{
    std::vector<std::size_t> out;
    for (std::size_t scale = 1;; scale *= 10) {
        for (std::size_t m : {5, 10, 20}) {
            const std::size_t v = m * scale;
            if (v > limit) return out;
            if (out.empty() || out.back() != v) out.push_back(v);
        }
    }
}

}  // namespace filterlab
