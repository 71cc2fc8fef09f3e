#pragma once

#include <cstdint>
#include <string>

#include "visionts/mae.hpp"
#include "visionts/tensor_archive.hpp"

namespace visionts {

/// Small architecture for tests and smoke runs: encoder 32/2/2,
/// decoder 16/1/2, 14 x 14 grid of 16-pixel patches.
MaeManifest tiny_manifest();

/// Seeded random weights for `manifest` (uniform, scaled by 1/sqrt(fan_in);
/// layer norms start at weight 1, bias 0). Position tables are not stored,
/// so the loader generates them. The archive's param_count is filled in.
TensorArchive make_random_archive(MaeManifest manifest, std::uint64_t seed);

void write_random_fixture(const std::string& path, std::uint64_t seed);

}  // namespace visionts
