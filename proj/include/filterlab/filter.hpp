#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "filterlab/hmm.hpp"

namespace filterlab {

/// The observation has zero probability under the predicted law. Only
/// discrete channels can raise this; it means the prior is contradicted by
/// the data. `step` is the 1-based index of the offending observation.
class ZeroLikelihood : public std::runtime_error {
public:
    explicit ZeroLikelihood(std::size_t step)
        : std::runtime_error("ZeroLikelihood: observation " + std::to_string(step) +
                             " is impossible under the predicted law"),
          step_(step)
    {
    }
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// pi_0 = prior, pi_k = bayes_update(pi_{k-1}, y_k).
struct FilterPath {
    std::vector<ProbabilityVector> steps;

    std::size_t horizon() const noexcept { return steps.empty() ? 0 : steps.size() - 1; }
    const ProbabilityVector& operator[](std::size_t k) const { return steps[k]; }
    const ProbabilityVector& back() const { return steps.back(); }
};

/// Per-state likelihood of y, scaled by an arbitrary positive constant.
/// Discrete channels return the emission column; Gaussian channels are
/// evaluated in log space and shifted so the largest entry is exactly 1.
std::vector<double> likelihood_weights(const HmmModel& model, const Observation& y);

/// One filter step: normalize((prior P)(x) * g(x, y)).
ProbabilityVector bayes_update(const HmmModel& model, const ProbabilityVector& prior,
                               const Observation& y);

FilterPath run_filter(const HmmModel& model, const ProbabilityVector& prior,
                      std::span<const Observation> ys);

/// Conditional law of X_0 given Y_1..Y_k when X_0 ~ prior, by a backward
/// recursion whose messages are rescaled to max 1 at each step. k = 0
/// returns the prior.
ProbabilityVector smoother(const HmmModel& model, const ProbabilityVector& prior,
                           std::span<const Observation> ys);

/// One draw from the filter-process kernel: x' ~ nu, x ~ P(x', .), y ~ channel(x),
/// then bayes_update(nu, y).
ProbabilityVector filter_kernel_sample(const HmmModel& model, const ProbabilityVector& nu,
                                       std::uint64_t seed);

/// Weighted average of probability vectors. Weights must be nonnegative and
/// sum to 1 within ProbabilityVector::kSumTolerance.
ProbabilityVector barycenter(std::span<const std::pair<double, ProbabilityVector>> measures);

/// Occupation measure (equal-weight barycenter) of a filter path, optionally
/// skipping the first `burn_in` entries.
ProbabilityVector occupation_measure(const FilterPath& path, std::size_t burn_in = 0);

/// One simulated trajectory with two filters driven by its observations:
/// `minimal` starts from mu, `maximal` from the point mass at the simulated X_0.
/// (The intermediate filter with a random prior is run_filter with that prior.)
struct ThreeFilters {
    FilterPath minimal;
    FilterPath maximal;
    Trajectory trajectory;
};

ThreeFilters three_filters(const HmmModel& model, std::size_t n, std::uint64_t seed);

/// Tab-separated table: header "k" then the state labels; one row per time
/// step with 17 significant digits.
void write_filter_path(std::ostream& os, const FilterPath& path,
                       std::span<const std::string> labels);

}  // namespace filterlab
