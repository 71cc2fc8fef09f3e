#include "visionts/fixture.hpp"

#include <cmath>
#include <random>

namespace visionts {

MaeManifest tiny_manifest() {
    MaeManifest m;
    m.encoder_dim = 32;
    m.encoder_depth = 2;
    m.encoder_heads = 2;
    m.decoder_dim = 16;
    m.decoder_depth = 1;
    m.decoder_heads = 2;
    m.patch_size = 16;
    m.grid_side = 14;
    return m;
}

TensorArchive make_random_archive(MaeManifest manifest, std::uint64_t seed) {
    // splitmix64 -> uniform floats; avoids distribution differences
    // between standard library implementations.
    std::uint64_t state = seed;
    auto next_unit = [&state]() {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        z ^= z >> 31;
        return static_cast<double>(z >> 11) * 0x1.0p-53 * 2.0 - 1.0;  // [-1, 1)
    };

    TensorArchive archive;
    for (const auto& [name, shape] : expected_tensors(manifest, false)) {
        Tensor t;
        t.shape = shape;
        t.data.resize(t.numel());
        const bool is_norm = name.find("norm") != std::string::npos;
        const bool is_weight = name.size() > 7 && name.compare(name.size() - 7, 7, ".weight") == 0;
        if (is_norm) {
            for (auto& v : t.data) v = is_weight ? 1.0f : 0.0f;
        } else {
            std::size_t fan_in = 1;
            if (is_weight) {
                for (std::size_t k = 1; k < shape.size(); ++k) fan_in *= shape[k];
            }
            const double scale = is_weight ? 1.0 / std::sqrt(static_cast<double>(fan_in)) : 0.02;
            for (auto& v : t.data) v = static_cast<float>(next_unit() * scale);
        }
        archive.tensors.emplace(name, std::move(t));
    }
    manifest.param_count = count_parameters(manifest, false);
    archive.metadata = manifest.to_json();
    return archive;
}

void write_random_fixture(const std::string& path, std::uint64_t seed) {
    write_tensor_archive(path, make_random_archive(tiny_manifest(), seed));
}

}  // namespace visionts
