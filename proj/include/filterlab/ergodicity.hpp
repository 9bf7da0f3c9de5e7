#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "filterlab/hmm.hpp"
#include "filterlab/rwrs.hpp"

namespace filterlab {

/// The convex functions offered for the sandwich statistic.
class ConvexFunction {
public:
    enum class Kind { Square, AbsDeviation };

    static ConvexFunction square() { return ConvexFunction(Kind::Square, 0.0); }
    /// t -> |t - center|
    static ConvexFunction abs_deviation(double center) { return ConvexFunction(Kind::AbsDeviation, center); }

    double operator()(double t) const noexcept
    {
        return kind_ == Kind::Square ? t * t : (t >= center_ ? t - center_ : center_ - t);
    }

    Kind kind() const noexcept { return kind_; }
    double center() const noexcept { return center_; }
    /// "square" or "abs:<center>"
    std::string name() const;
    /// Inverse of name(); throws std::invalid_argument.
    static ConvexFunction parse(const std::string& text);

private:
    ConvexFunction(Kind k, double c) : kind_(k), center_(c) {}
    Kind kind_;
    double center_;
};

/// F(nu) = kappa(nu(f)) for a bounded f on the states.
struct ConvexStatistic {
    std::vector<double> f;
    ConvexFunction kappa = ConvexFunction::square();

    double operator()(const ProbabilityVector& nu) const { return kappa(nu.expectation(f)); }
};

/// Monte Carlo means of kappa(pi_n^min(f)) and kappa(pi_n^max(f)); every
/// invariant measure of the filter process with barycenter mu integrates F
/// to a value between the limits of the two.
struct GapEstimate {
    double lower = 0.0;
    double upper = 0.0;
    double lower_halfwidth = 0.0;  ///< 95%
    double upper_halfwidth = 0.0;  ///< 95%
    double lower_variance = 0.0;   ///< sample variance across replicates
    double upper_variance = 0.0;
    std::size_t horizon = 0;
    std::size_t replicates = 0;

    double gap() const noexcept { return upper - lower; }
    /// Conservative: the sum of the two half-widths.
    double gap_halfwidth() const noexcept { return lower_halfwidth + upper_halfwidth; }
};

/// Replicate r runs three_filters(model, n, derive_stream(seed, r)).
/// `threads` = 0 picks default_threads(); the result does not depend on it.
GapEstimate kunita_gap(const HmmModel& model, const ConvexStatistic& stat, std::size_t n,
                       std::size_t replicates, std::uint64_t seed, std::size_t threads = 0);

/// kunita_gap at several horizons from the same replicates (trajectories for
/// shorter horizons are prefixes of the longest). Entry i equals
/// kunita_gap(..., horizons[i], ...) exactly.
std::vector<GapEstimate> kunita_gap_curve(const HmmModel& model, const ConvexStatistic& stat,
                                          std::span<const std::size_t> horizons,
                                          std::size_t replicates, std::uint64_t seed,
                                          std::size_t threads = 0);

struct DecayCurve {
    std::vector<std::size_t> horizons;
    std::vector<double> values;
    std::vector<double> halfwidths;  ///< 0 for exact entries
};

/// Two filters with different priors on one trajectory simulated from mu;
/// value at horizon k is the total variation distance between them.
/// ZeroLikelihood propagates when prior2 is contradicted by the data.
DecayCurve filter_stability(const HmmModel& model, const ProbabilityVector& prior1,
                            const ProbabilityVector& prior2, std::size_t n, std::uint64_t seed);

/// Exact sum_x mu(x) TV(P^n(x, .), mu) at each horizon (strictly increasing).
DecayCurve absolute_regularity(const HmmModel& model, std::span<const std::size_t> horizons);

/// Predicate on Z_n: component (0 = step, 1 = left, 2 = right) equal to a
/// value, or always true.
struct ZCylinder {
    int component = -1;  ///< -1: always true
    int value = 0;

    bool operator()(const ZTriple& z) const noexcept
    {
        switch (component) {
        case 0: return z.step == value;
        case 1: return z.left == value;
        case 2: return z.right == value;
        default: return true;
        }
    }
    /// "true" or "<component>=<value>"
    static ZCylinder parse(const std::string& text);
    std::string name() const;
};

class InsufficientReplicates : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TailProbeResult {
    /// max over atoms z of |P[cyl(Z_n) | Z_0 = z] - P[cyl(Z_n)]|, with the
    /// half-width of the maximizing atom's estimate plus that of the
    /// unconditional one.
    DecayCurve deviation;
    std::vector<double> unconditional;
    std::vector<double> unconditional_halfwidth;
    std::size_t smallest_atom_count = 0;
};

inline constexpr std::size_t kDefaultMinAtomCount = 30;

/// Monte Carlo over independent windows generate_rwrs(J, max horizon,
/// derive_stream(seed, r)), conditioning on the exact atom of Z_0 (18
/// atoms). Throws InsufficientReplicates when some atom is seen fewer than
/// min_atom_count times, std::invalid_argument when J <= max horizon.
TailProbeResult tail_triviality_probe(long half_width, std::span<const std::size_t> horizons,
                                      const std::function<bool(const ZTriple&)>& cylinder,
                                      std::size_t replicates, std::uint64_t seed,
                                      std::size_t threads = 0,
                                      std::size_t min_atom_count = kDefaultMinAtomCount);

/// 5, 10, 20, 50, 100, 200, 500, ... up to and including `limit` when it is on the grid.
std::vector<std::size_t> geometric_horizons(std::size_t limit);

}  // namespace filterlab
