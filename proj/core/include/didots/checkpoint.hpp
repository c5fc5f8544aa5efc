#pragma once

#include <map>
#include <string>

#include "didots/backend.hpp"

namespace didots {

// Checkpoint directory layout:
//   model.json   tokenizer vocab, dims, adapter spec, run metadata
//   weights.bin  named tensors (base and adapter), little-endian doubles
// Round-trips bit-exactly.
void save_checkpoint(const MicroTransformer& model, const std::string& dir,
                     const std::map<std::string, std::string>& metadata = {});

MicroTransformer load_checkpoint(const std::string& dir);

std::map<std::string, std::string> checkpoint_metadata(const std::string& dir);

}  // namespace didots
