#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "filterlab/hmm.hpp"

namespace filterlab {

/// XOR model on E = {0,1}^2: X_n = (b_{n-1}, b_n) with i.i.d. fair bits and
/// observation |b_n - b_{n-1}|. Noiseless: discrete channel with that
/// symbol. Noisy: scalar Gaussian channel with that mean and scale `eps`.
/// States are ordered (0,0), (0,1), (1,0), (1,1); mu is uniform. Throws
/// std::invalid_argument when noisy and eps <= 0.
HmmModel build_xor_model(bool noisy, double eps = 0.0);

constexpr std::size_t xor_state(int previous_bit, int current_bit) noexcept
{
    return static_cast<std::size_t>(2 * previous_bit + current_bit);
}

/// Indicator of {current bit = 0} on the XOR state space.
std::vector<double> xor_current_bit_zero();

/// Hidden chain of pairs (s_{n-1}, s_n) with s i.i.d. uniform on
/// {0, ..., alphabet-1}; channel uninformative (one symbol).
HmmModel build_pair_chain(std::size_t alphabet = 3);

/// Identity transition on n states with the given invariant law
/// (uniform when omitted); channel uninformative.
HmmModel build_identity_chain(std::size_t n);

/// Every row equal to `law`: one step forgets the past completely.
HmmModel build_iid_chain(const ProbabilityVector& law);

/// Random discrete model with strictly positive transition rows and
/// emission rows drawn from Dirichlet(1) (so the chain is ergodic and mu is
/// found by power iteration). `sparsity` in [0,1) zeroes that fraction of
/// emission entries (keeping at least one per row) to exercise impossible
/// observations.
HmmModel build_random_model(std::size_t states, std::size_t symbols, std::uint64_t seed,
                            double sparsity = 0.0);

/// Same transition and mu as `model`, with an additive Gaussian channel of
/// the given per-state means and scale.
HmmModel with_gaussian_channel(const HmmModel& model, Matrix means, double eps);

}  // namespace filterlab
