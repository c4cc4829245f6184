#pragma once

#include <string>

#include "deid/model.hpp"

namespace deid {

// Checkpoint container: "DEIDCKP1" magic, a little-endian u64 header length,
// a JSON header (model config, vocabulary, label set, and a parameter index
// with shapes and payload offsets), then the raw 64-bit little-endian value
// arrays. Self-describing: load_checkpoint rebuilds the model without any
// other input.
void save_checkpoint(Model& model, const std::string& path);
Model load_checkpoint(const std::string& path);

}  // namespace deid
