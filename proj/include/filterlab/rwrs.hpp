#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace filterlab {

/// Size of the scenery alphabet {0, 1, 2}.
inline constexpr int kScenerySymbols = 3;

/// Z_k = (delta_{k+1}, xi_{N_k - 1}, xi_{N_k}): the next walk step and the
/// scenery on the edge just left of the walker.
struct ZTriple {
    int step = 1;
    int left = 0;
    int right = 0;

    friend bool operator==(const ZTriple&, const ZTriple&) = default;
};

/// Index 0..17 of a triple in {-1,1} x {0,1,2} x {0,1,2}.
constexpr std::size_t atom_index(const ZTriple& z) noexcept
{
    return static_cast<std::size_t>((z.step > 0 ? 9 : 0) + 3 * z.left + z.right);
}
inline constexpr std::size_t kZAtoms = 18;

/// (right - left) mod 3: the index of the basis vector e(.) observed from a
/// state whose first entry is z.
constexpr int observation_symbol(const ZTriple& z) noexcept
{
    return ((z.right - z.left) % kScenerySymbols + kScenerySymbols) % kScenerySymbols;
}

/// Scenery symbols on the integer range [first, last], stored with an
/// explicit offset so negative sites are addressed directly.
class Scenery {
public:
    Scenery() = default;
    Scenery(long first, std::vector<int> values);

    long first() const noexcept { return first_; }
    long last() const noexcept { return first_ + static_cast<long>(values_.size()) - 1; }
    std::size_t size() const noexcept { return values_.size(); }
    bool contains(long j) const noexcept { return j >= first_ && j <= last(); }

    /// xi_j; throws std::out_of_range outside the stored range.
    int at(long j) const;
    /// eta_j = (xi_j - xi_{j-1}) mod 3, defined for first < j <= last.
    int increment(long j) const;

    const std::vector<int>& values() const noexcept { return values_; }

private:
    long first_ = 0;
    std::vector<int> values_;
};

class WalkExitsScenery : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A finite window of the scenery/walk construction for times 0..n.
struct RwrsWindow {
    Scenery scenery;
    std::vector<int> steps;  ///< delta_1 .. delta_{n+1}; steps[k] = delta_{k+1}
    std::vector<long> walk;  ///< N_0 .. N_n, N_0 = 0
    std::vector<ZTriple> z;  ///< Z_0 .. Z_n

    std::size_t horizon() const noexcept { return walk.empty() ? 0 : walk.size() - 1; }
    /// eta_{N_k}; the mean index of Y_k.
    int observed_increment(std::size_t k) const { return observation_symbol(z[k]); }
};

/// Assembles a window from a scenery and the steps delta_1..delta_{n+1}.
/// Throws WalkExitsScenery if some N_k - 1 or N_k for k <= n leaves the scenery
/// range, and std::invalid_argument for steps other than +-1 or symbols
/// outside {0,1,2}.
RwrsWindow make_rwrs_window(Scenery scenery, std::vector<int> steps);

/// Scenery on [-J, J] from xi_0 and i.i.d. increments eta (equivalently
/// i.i.d. uniform xi), i.i.d. fair steps, walk and Z-triples for times 0..n.
/// Requires J > n so the walk cannot leave the scenery.
RwrsWindow generate_rwrs(long half_width, std::size_t n, std::uint64_t seed);

/// Y_k = e(eta_{N_k}) + eps * gamma_k for k = 0..n, gamma_k standard normal in R^3.
std::vector<std::array<double, 3>> observe_rwrs(const RwrsWindow& window, double eps,
                                                std::uint64_t seed);

/// A finite window x_0, ..., x_L of the state X_k = (Z_k, Z_{k+1}, ...).
struct RwrsState {
    std::vector<ZTriple> entries;

    std::size_t size() const noexcept { return entries.size(); }
    std::vector<int> first_components() const;
    friend bool operator==(const RwrsState&, const RwrsState&) = default;
};

/// (Z_k, ..., Z_n) from a window.
RwrsState state_at(const RwrsWindow& window, std::size_t k);

/// h(x) as a basis index: observation_symbol(x_0).
int rwrs_observation_index(const RwrsState& x);

class StoppingTimeOverflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// T_a(x) = [(a, x_{tau_{-a}(x),1}, x_{tau_{-a}(x),2}), x]: prepends the triple
/// seen when the walk last stood one step on the other side. Throws
/// StoppingTimeOverflow when tau_{-a}(x) is not reached inside the window.
RwrsState rwrs_transition_map(const RwrsState& x, int a);

struct MetricValue {
    double value = 0.0;
    /// The untruncated distance lies in [value, value + error_bound].
    double error_bound = 0.0;
};

/// d(x, x') = sum_k 2^-k 1{x_k != x'_k} + sum_j 2^-|j| (|tau_j(x) - tau_j(x')| ^ 1),
/// truncated to the common window length m. Stopping times not reached in a
/// window count as infinite; a pair with one infinite time contributes
/// exactly 1, a pair with both infinite is left to the error bound
/// 2^{-m+1} + 2 * 2^{-J} (J = largest radius on which every tau_j is reached
/// in at least one window).
MetricValue rwrs_metric(const RwrsState& x, const RwrsState& y);

/// Columns: k, delta_{k+1}, N_k, xi_{N_k-1}, xi_{N_k}, eta_{N_k}.
void write_rwrs_window(std::ostream& os, const RwrsWindow& window);
/// Columns: j, xi_j.
void write_scenery(std::ostream& os, const Scenery& scenery);
/// Reads the Z-triples back from a write_rwrs_window table.
std::vector<ZTriple> read_rwrs_triples(std::istream& is);

}  // namespace filterlab
