#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "visionts/grid.hpp"
#include "visionts/tensor_archive.hpp"

namespace visionts {

/// Architecture hyperparameters carried in the archive's "__metadata__".
struct MaeManifest {
    std::size_t encoder_dim = 768;
    std::size_t encoder_depth = 12;
    std::size_t encoder_heads = 12;
    std::size_t decoder_dim = 512;
    std::size_t decoder_depth = 8;
    std::size_t decoder_heads = 16;
    std::size_t patch_size = 16;
    std::size_t grid_side = 14;
    double mlp_ratio = 4.0;
    double layer_norm_eps = 1e-6;
    /// Reconstruction targets are raw pixels (not per-patch normalised).
    bool pixel_targets = true;
    /// Per-channel standardisation applied at the model boundary.
    std::array<float, 3> channel_mean{0.0f, 0.0f, 0.0f};
    std::array<float, 3> channel_std{1.0f, 1.0f, 1.0f};
    /// Declared number of stored parameters; 0 on a freshly built manifest.
    std::uint64_t param_count = 0;

    std::size_t encoder_mlp_dim() const noexcept;
    std::size_t decoder_mlp_dim() const noexcept;
    std::size_t patch_dim() const noexcept { return patch_size * patch_size * 3; }
    std::size_t num_patches() const noexcept { return grid_side * grid_side; }

    nlohmann::json to_json() const;
    /// Throws LoadError on missing or inconsistent fields.
    static MaeManifest from_json(const nlohmann::json& meta);
};

using TensorShapes = std::vector<std::pair<std::string, std::vector<std::size_t>>>;

/// Every archive tensor the manifest implies, in a stable order. Position
/// tables are listed only when `with_pos_embed`.
TensorShapes expected_tensors(const MaeManifest& manifest, bool with_pos_embed);

/// Sum of element counts over expected_tensors(manifest, with_pos_embed).
std::uint64_t count_parameters(const MaeManifest& manifest, bool with_pos_embed = true);

/// Fixed 2-D sine-cosine table, (1 + N*N) x dim, row 0 (class token) zero.
/// The first dim/2 features encode the patch column, the rest the row.
Grid<float> sincos_pos_embed_2d(std::size_t dim, std::size_t grid_side);

struct Linear {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<float> weight;  // out x in, row-major
    std::vector<float> bias;    // out
};

struct LayerNormParams {
    std::vector<float> weight;
    std::vector<float> bias;
};

struct TransformerBlock {
    LayerNormParams norm1;
    Linear qkv;
    Linear proj;
    LayerNormParams norm2;
    Linear fc1;
    Linear fc2;
};

/// Immutable pre-trained masked autoencoder. Safe to share across threads.
class MaeModel {
public:
    /// Reads, validates and takes ownership of a tensor archive.
    /// Throws LoadError naming the offending tensor or field.
    static MaeModel load(const std::string& path);
    static MaeModel from_archive(TensorArchive archive);

    const MaeManifest& manifest() const noexcept { return manifest_; }
    std::uint64_t parameter_count() const noexcept { return parameter_count_; }

    // Weights, in inference layout.
    const Linear& patch_embed() const noexcept { return patch_embed_; }
    std::span<const float> cls_token() const noexcept { return cls_token_; }
    const Grid<float>& pos_embed() const noexcept { return pos_embed_; }
    const std::vector<TransformerBlock>& encoder_blocks() const noexcept { return encoder_blocks_; }
    const LayerNormParams& encoder_norm() const noexcept { return encoder_norm_; }
    const Linear& decoder_embed() const noexcept { return decoder_embed_; }
    std::span<const float> mask_token() const noexcept { return mask_token_; }
    const Grid<float>& decoder_pos_embed() const noexcept { return decoder_pos_embed_; }
    const std::vector<TransformerBlock>& decoder_blocks() const noexcept { return decoder_blocks_; }
    const LayerNormParams& decoder_norm() const noexcept { return decoder_norm_; }
    const Linear& decoder_pred() const noexcept { return decoder_pred_; }

private:
    MaeModel() = default;

    MaeManifest manifest_;
    std::uint64_t parameter_count_ = 0;
    Linear patch_embed_;  // weight columns in patchify order (row, col, channel)
    std::vector<float> cls_token_;
    Grid<float> pos_embed_;
    std::vector<TransformerBlock> encoder_blocks_;
    LayerNormParams encoder_norm_;
    Linear decoder_embed_;
    std::vector<float> mask_token_;
    Grid<float> decoder_pos_embed_;
    std::vector<TransformerBlock> decoder_blocks_;
    LayerNormParams decoder_norm_;
    Linear decoder_pred_;
};

/// Split a 3-channel image into N*N row-major patches; each patch vector is
/// pixel-row-major with the channel varying fastest. Throws ShapeError
/// unless the image is (N*S) x (N*S).
Grid<float> patchify(const RgbImage& image, std::size_t patch_size);
RgbImage unpatchify(const Grid<float>& patches, std::size_t patch_size);

/// Summary statistics collected on instrumented runs.
struct ForwardTrace {
    std::size_t encoder_tokens = 0;
    std::size_t decoder_tokens = 0;
    std::size_t attention_rows = 0;
    double max_attention_row_error = 0.0;  // max |sum(row) - 1|
    std::size_t layer_norm_tokens = 0;
    double max_layer_norm_mean = 0.0;       // max |mean| before affine
    double max_layer_norm_var_error = 0.0;  // max |var - var/(var+eps)| before affine
};

struct ForwardOptions {
    /// Accumulate reductions in double instead of float.
    bool strict = false;
    /// Order in which visible patches are fed to the encoder; empty means
    /// row-major. Must be a permutation of the mask's visible indices.
    std::span<const std::size_t> visible_order = {};
    ForwardTrace* trace = nullptr;
};

/// Reconstructs masked patches. Visible patches of the result hold the
/// input pixels unchanged. Throws ShapeError on geometry mismatch and
/// NumericsError if any activation becomes non-finite.
RgbImage forward_reconstruct(const MaeModel& model, const RgbImage& image, const PatchMask& mask,
                             const ForwardOptions& options = {});

}  // namespace visionts
