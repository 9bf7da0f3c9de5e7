#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "filterlab/hmm.hpp"

namespace filterlab {

/// Model file format (whitespace separated, '#' starts a comment line):
///
///     filterlab-model 1
///     states <n>
///     labels <label_0> ... <label_{n-1}>
///     transition
///     <n rows of n reals>
///     channel discrete <m>            | channel gaussian <d> <noise_scale>
///     <n rows of m probabilities>     | <n rows of d mean coordinates>
///     stationary                      (optional; computed when absent)
///     <n reals>
///
/// Reals are written with 17 significant digits, so write/read round-trips
/// every value bit for bit.
class ModelParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void write_model(std::ostream& os, const HmmModel& model);
std::string model_to_string(const HmmModel& model);

/// Parses a model. With `validate` the result is checked by validate_model and
/// InvalidModel is thrown on failure; without it a structurally complete but
/// invalid model is returned for diagnosis. A missing stationary section is
/// filled in by power iteration (NonConvergence propagates).
HmmModel read_model(std::istream& is, bool validate = true);
HmmModel model_from_string(const std::string& text, bool validate = true);
HmmModel load_model_file(const std::string& path, bool validate = true);

/// FNV-1a 64-bit hash of the serialized model, as 16 hex digits.
std::string model_fingerprint(const HmmModel& model);

}  // namespace filterlab
