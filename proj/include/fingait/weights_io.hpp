#ifndef FINGAIT_WEIGHTS_IO_HPP
#define FINGAIT_WEIGHTS_IO_HPP

#include "fingait/forward_model.hpp"

#include <string>
#include <variant>

namespace fingait {

constexpr int kWeightsFormatVersion = 1;

// Weight files are JSON: format_version, kind ("lstm" or "dnn"), dimensions,
// a normalization record (per-feature mean/std), and named weight arrays,
// each carrying its expected shape.  Loading rejects unknown fields, missing
// arrays, and any shape mismatch with std::runtime_error.
std::variant<LstmWeights, DnnWeights> load_weights(const std::string& path);

void save_weights(const LstmWeights& w, const std::string& path);
void save_weights(const DnnWeights& w, const std::string& path);

} // namespace fingait

#endif
