// Binary checkpoint: magic "3DCD", one format version byte, a manifest of
// (name, shape, offset) entries, then raw little-endian 64-bit float
// payloads. Model hyperparameters travel as reserved `meta.*` entries so a
// checkpoint reconstructs its own architecture. Exact layout in README.md.
#pragma once

#include <string>

#include "covdiff/policy/model.hpp"

namespace covdiff::policy {

inline constexpr char kCheckpointMagic[4] = {'3', 'D', 'C', 'D'};
inline constexpr std::uint8_t kCheckpointVersion = 1;

void save_checkpoint(const Policy& policy, const std::string& path);
Policy load_checkpoint(const std::string& path);

}  // namespace covdiff::policy
