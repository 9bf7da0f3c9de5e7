#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "filterlab/rwrs.hpp"

namespace filterlab {

/// Index of the largest coordinate; ties go to the smallest index.
int discretize_observation(std::span<const double, 3> y);

struct ChannelErrorEstimate {
    double delta = 0.0;
    double halfwidth = 0.0;  ///< 95%
    std::size_t replicates = 0;
};

/// Monte Carlo estimate of the symbol-channel error rate induced by argmax
/// discretization of e(j) + eps * gamma:
///   delta = (3/2) (1 - P[argmax(e(j) + eps gamma) = j]),
/// using j = 0 (the law does not depend on j). Throws std::invalid_argument
/// for eps <= 0.
ChannelErrorEstimate channel_error_from_epsilon(double eps, std::size_t replicates,
                                                std::uint64_t seed);

/// Each symbol independently: kept with probability 1 - delta, otherwise
/// replaced by a uniform draw from {0,1,2}. The agreement rate is 1 - 2 delta / 3.
std::vector<int> apply_channel(std::span<const int> symbols, double delta, std::uint64_t seed);

/// tau_j: the smallest k in [0, size) with first_components[0] + ... +
/// first_components[k-1] == j, i.e. an index of an entry of the window.
/// nullopt (serialized as INF) when no such entry exists.
std::optional<std::size_t> stopping_time(std::span<const int> first_components, long j);

/// Partial map from sites to symbols; absent keys are holes.
using SymbolMap = std::map<long, int>;

struct ExtractedScenery {
    SymbolMap scenery;     ///< xi'_j = x_{tau_j, 2} for every reached j
    SymbolMap increments;  ///< eta'_j = (xi'_j - xi'_{j-1}) mod 3 where both exist
};

/// Reads the scenery off a state window: the walk visits site j for the first
/// time at tau_j, and entry tau_j records xi at that site.
ExtractedScenery extract_scenery(std::span<const ZTriple> window);
ExtractedScenery extract_scenery(const RwrsState& state);

/// t_n = s_{a n + b}, a in {-1, +1}.
SymbolMap reflect_shift(const SymbolMap& s, int a, long b);

/// Contiguous map {offset, offset+1, ...} -> symbols.
SymbolMap to_symbol_map(std::span<const int> symbols, long offset = 0);

struct AlignmentResult {
    int a = 1;
    long b = 0;
    std::size_t overlap_length = 0;
    bool unique = false;
};

class AlignmentError : public std::runtime_error {
public:
    enum class Kind { NoMatch, Ambiguous };

    AlignmentError(Kind kind, const std::string& detail)
        : std::runtime_error((kind == Kind::NoMatch ? "NoMatch: " : "Ambiguous: ") + detail),
          kind_(kind)
    {
    }
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

inline constexpr std::size_t kDefaultMinOverlap = 25;

/// Finds the unique (a, b) with seq_b[n] == seq_a[a n + b] on every site
/// defined in both, over at least min_overlap such sites. Exhaustive over
/// a in {-1, +1} and all shifts with enough overlap. Throws AlignmentError
/// (NoMatch or Ambiguous) when there is no such pair or more than one.
AlignmentResult align(const SymbolMap& seq_a, const SymbolMap& seq_b,
                      std::size_t min_overlap = kDefaultMinOverlap);

/// "j<TAB>symbol" lines.
void write_symbol_map(std::ostream& os, const SymbolMap& map);
/// Accepts "j symbol" lines; '#' comments and a non-numeric header line are skipped.
SymbolMap read_symbol_map(std::istream& is);

/// "j<TAB>tau_j" lines for j in [lo, hi]; unreached times are written as INF.
void write_stopping_times(std::ostream& os, std::span<const int> first_components, long lo,
                          long hi);

}  // namespace filterlab
