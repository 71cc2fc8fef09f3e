#include "visionts/mae.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "visionts/errors.hpp"

namespace visionts {

namespace {

std::string shape_string(const std::vector<std::size_t>& shape) {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(shape[i]);
    }
    return s + "]";
}

template <typename T>
T required(const nlohmann::json& meta, const char* key) {
    const auto it = meta.find(key);
    if (it == meta.end()) throw LoadError(std::string("manifest field '") + key + "' is missing");
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception&) {
        throw LoadError(std::string("manifest field '") + key + "' has the wrong type");
    }
}

template <typename T>
T optional_field(const nlohmann::json& meta, const char* key, T fallback) {
    const auto it = meta.find(key);
    if (it == meta.end()) return fallback;
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception&) {
        throw LoadError(std::string("manifest field '") + key + "' has the wrong type");
    }
}

void append_block_shapes(TensorShapes& out, const std::string& prefix, std::size_t dim,
                         std::size_t hidden) {
    out.push_back({prefix + "norm1.weight", {dim}});
    out.push_back({prefix + "norm1.bias", {dim}});
    out.push_back({prefix + "attn.qkv.weight", {3 * dim, dim}});
    out.push_back({prefix + "attn.qkv.bias", {3 * dim}});
    out.push_back({prefix + "attn.proj.weight", {dim, dim}});
    out.push_back({prefix + "attn.proj.bias", {dim}});
    out.push_back({prefix + "norm2.weight", {dim}});
    out.push_back({prefix + "norm2.bias", {dim}});
    out.push_back({prefix + "mlp.fc1.weight", {hidden, dim}});
    out.push_back({prefix + "mlp.fc1.bias", {hidden}});
    out.push_back({prefix + "mlp.fc2.weight", {dim, hidden}});
    out.push_back({prefix + "mlp.fc2.bias", {dim}});
}

// ---------------------------------------------------------------------------
// Kernels. `Acc` is the reduction type: float normally, double in strict mode.

template <typename Acc>
Acc dot(const float* a, const float* b, std::size_t n) {
    // Eight independent lanes; fixed order keeps results reproducible.
    Acc lane[8] = {};
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        for (std::size_t k = 0; k < 8; ++k)
            lane[k] += static_cast<Acc>(a[i + k]) * static_cast<Acc>(b[i + k]);
    Acc tail = 0;
    for (; i < n; ++i) tail += static_cast<Acc>(a[i]) * static_cast<Acc>(b[i]);
    return ((lane[0] + lane[4]) + (lane[1] + lane[5])) + ((lane[2] + lane[6]) + (lane[3] + lane[7])) +
           tail;
}

template <typename Acc>
Grid<float> linear(const Grid<float>& x, const Linear& layer) {
    Grid<float> y(x.rows(), layer.out);
    // Output-feature outer loop: each weight row stays hot across tokens.
    for (std::size_t o = 0; o < layer.out; ++o) {
        const float* w = layer.weight.data() + o * layer.in;
        const Acc b = static_cast<Acc>(layer.bias[o]);
        for (std::size_t t = 0; t < x.rows(); ++t)
            y(t, o) = static_cast<float>(dot<Acc>(x.row(t).data(), w, layer.in) + b);
    }
    return y;
}

template <typename Acc>
Grid<float> layer_norm(const Grid<float>& x, const LayerNormParams& p, double eps,
                       ForwardTrace* trace) {
    const std::size_t d = x.cols();
    Grid<float> y(x.rows(), d);
    for (std::size_t t = 0; t < x.rows(); ++t) {
        const auto in = x.row(t);
        Acc mean = 0;
        for (float v : in) mean += v;
        mean /= static_cast<Acc>(d);
        Acc var = 0;
        for (float v : in) var += (static_cast<Acc>(v) - mean) * (static_cast<Acc>(v) - mean);
        var /= static_cast<Acc>(d);
        const Acc inv = Acc(1) / std::sqrt(var + static_cast<Acc>(eps));
        auto out = y.row(t);
        double zsum = 0.0, zsq = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const Acc z = (static_cast<Acc>(in[k]) - mean) * inv;
            if (trace) {
                zsum += static_cast<double>(z);
                zsq += static_cast<double>(z) * static_cast<double>(z);
            }
            out[k] = static_cast<float>(z * static_cast<Acc>(p.weight[k]) + static_cast<Acc>(p.bias[k]));
        }
        if (trace) {
            const double zm = zsum / static_cast<double>(d);
            const double zv = zsq / static_cast<double>(d) - zm * zm;
            // eps shrinks the variance of near-flat tokens below one
            const double expected_var = static_cast<double>(var) / (static_cast<double>(var) + eps);
            trace->layer_norm_tokens += 1;
            trace->max_layer_norm_mean = std::max(trace->max_layer_norm_mean, std::abs(zm));
            trace->max_layer_norm_var_error =
                std::max(trace->max_layer_norm_var_error, std::abs(zv - expected_var));
        }
    }
    return y;
}

template <typename Acc>
Grid<float> attention(const Grid<float>& qkv, std::size_t heads, ForwardTrace* trace) {
    const std::size_t tokens = qkv.rows();
    const std::size_t dim = qkv.cols() / 3;
    const std::size_t hd = dim / heads;
    const Acc scale = Acc(1) / std::sqrt(static_cast<Acc>(hd));
    Grid<float> out(tokens, dim);
    std::vector<Acc> probs(tokens);
    std::vector<Acc> acc(hd);
    for (std::size_t h = 0; h < heads; ++h) {
        const std::size_t qoff = h * hd, koff = dim + h * hd, voff = 2 * dim + h * hd;
        for (std::size_t t = 0; t < tokens; ++t) {
            const float* q = qkv.row(t).data() + qoff;
            Acc max_score = -std::numeric_limits<Acc>::infinity();
            for (std::size_t s = 0; s < tokens; ++s) {
                probs[s] = dot<Acc>(q, qkv.row(s).data() + koff, hd) * scale;
                max_score = std::max(max_score, probs[s]);
            }
            Acc sum = 0;
            for (std::size_t s = 0; s < tokens; ++s) {
                probs[s] = std::exp(probs[s] - max_score);
                sum += probs[s];
            }
            const Acc inv = Acc(1) / sum;
            for (std::size_t s = 0; s < tokens; ++s) probs[s] *= inv;
            if (trace) {
                double row = 0.0;
                for (std::size_t s = 0; s < tokens; ++s) row += static_cast<double>(probs[s]);
                trace->attention_rows += 1;
                trace->max_attention_row_error =
                    std::max(trace->max_attention_row_error, std::abs(row - 1.0));
            }
            std::fill(acc.begin(), acc.end(), Acc(0));
            for (std::size_t s = 0; s < tokens; ++s) {
                const float* v = qkv.row(s).data() + voff;
                const Acc p = probs[s];
                for (std::size_t j = 0; j < hd; ++j) acc[j] += p * static_cast<Acc>(v[j]);
            }
            float* o = out.row(t).data() + qoff;
            for (std::size_t j = 0; j < hd; ++j) o[j] = static_cast<float>(acc[j]);
        }
    }
    return out;
}

template <typename Acc>
void gelu(Grid<float>& x) {
    constexpr Acc inv_sqrt2 = static_cast<Acc>(0.70710678118654752440);
    for (float& v : x.values()) {
        const Acc a = static_cast<Acc>(v);
        v = static_cast<float>(Acc(0.5) * a * (Acc(1) + std::erf(a * inv_sqrt2)));
    }
}

void add_inplace(Grid<float>& x, const Grid<float>& y) {
    auto a = x.values();
    auto b = y.values();
    for (std::size_t k = 0; k < a.size(); ++k) a[k] += b[k];
}

void require_finite(const Grid<float>& x, const char* stage) {
    for (float v : x.values())
        if (!std::isfinite(v)) throw NumericsError(std::string("non-finite activation after ") + stage);
}

template <typename Acc>
void run_block(Grid<float>& x, const TransformerBlock& b, std::size_t heads, double eps,
               ForwardTrace* trace) {
    {
        const auto h = layer_norm<Acc>(x, b.norm1, eps, trace);
        const auto a = attention<Acc>(linear<Acc>(h, b.qkv), heads, trace);
        add_inplace(x, linear<Acc>(a, b.proj));
    }
    const auto h = layer_norm<Acc>(x, b.norm2, eps, trace);
    auto f = linear<Acc>(h, b.fc1);
    gelu<Acc>(f);
    add_inplace(x, linear<Acc>(f, b.fc2));
}

template <typename Acc>
Grid<float> run_forward(const MaeModel& model, const Grid<float>& patches,
                        std::span<const std::size_t> order, ForwardTrace* trace) {
    const MaeManifest& mf = model.manifest();
    const std::size_t dim = mf.encoder_dim;
    const std::size_t ddim = mf.decoder_dim;
    const std::size_t num_patches = mf.num_patches();

    // Encoder: class token + embedded visible patches with positions.
    Grid<float> x(order.size() + 1, dim);
    for (std::size_t k = 0; k < dim; ++k) x(0, k) = model.cls_token()[k] + model.pos_embed()(0, k);
    {
        Grid<float> visible(order.size(), mf.patch_dim());
        for (std::size_t i = 0; i < order.size(); ++i)
            std::copy(patches.row(order[i]).begin(), patches.row(order[i]).end(),
                      visible.row(i).begin());
        const auto emb = linear<Acc>(visible, model.patch_embed());
        for (std::size_t i = 0; i < order.size(); ++i)
            for (std::size_t k = 0; k < dim; ++k)
                x(i + 1, k) = emb(i, k) + model.pos_embed()(order[i] + 1, k);
    }
    if (trace) trace->encoder_tokens += x.rows();
    for (const auto& block : model.encoder_blocks()) {
        run_block<Acc>(x, block, mf.encoder_heads, mf.layer_norm_eps, trace);
        require_finite(x, "encoder block");
    }
    x = layer_norm<Acc>(x, model.encoder_norm(), mf.layer_norm_eps, trace);

    // Decoder: restore the full grid, mask tokens at hidden positions.
    const auto embedded = linear<Acc>(x, model.decoder_embed());
    Grid<float> y(num_patches + 1, ddim);
    std::copy(embedded.row(0).begin(), embedded.row(0).end(), y.row(0).begin());
    for (std::size_t p = 0; p < num_patches; ++p)
        std::copy(model.mask_token().begin(), model.mask_token().end(), y.row(p + 1).begin());
    for (std::size_t i = 0; i < order.size(); ++i)
        std::copy(embedded.row(i + 1).begin(), embedded.row(i + 1).end(), y.row(order[i] + 1).begin());
    add_inplace(y, model.decoder_pos_embed());
    if (trace) trace->decoder_tokens += y.rows();
    for (const auto& block : model.decoder_blocks()) {
        run_block<Acc>(y, block, mf.decoder_heads, mf.layer_norm_eps, trace);
        require_finite(y, "decoder block");
    }
    y = layer_norm<Acc>(y, model.decoder_norm(), mf.layer_norm_eps, trace);
    const auto pred = linear<Acc>(y, model.decoder_pred());
    require_finite(pred, "decoder prediction");

    Grid<float> out(num_patches, mf.patch_dim());
    for (std::size_t p = 0; p < num_patches; ++p)
        std::copy(pred.row(p + 1).begin(), pred.row(p + 1).end(), out.row(p).begin());
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Manifest

std::size_t MaeManifest::encoder_mlp_dim() const noexcept {
    return static_cast<std::size_t>(std::lround(static_cast<double>(encoder_dim) * mlp_ratio));
}

std::size_t MaeManifest::decoder_mlp_dim() const noexcept {
    return static_cast<std::size_t>(std::lround(static_cast<double>(decoder_dim) * mlp_ratio));
}

nlohmann::json MaeManifest::to_json() const {
    return {{"encoder_dim", encoder_dim},
            {"encoder_depth", encoder_depth},
            {"encoder_heads", encoder_heads},
            {"decoder_dim", decoder_dim},
            {"decoder_depth", decoder_depth},
            {"decoder_heads", decoder_heads},
            {"patch_size", patch_size},
            {"grid_side", grid_side},
            {"mlp_ratio", mlp_ratio},
            {"layer_norm_eps", layer_norm_eps},
            {"pixel_targets", pixel_targets},
            {"channel_mean", channel_mean},
            {"channel_std", channel_std},
            {"param_count", param_count},
            {"patch_layout", "hwc"}};
}

MaeManifest MaeManifest::from_json(const nlohmann::json& meta) {
    if (!meta.is_object()) throw LoadError("manifest must be a JSON object");
    MaeManifest m;
    m.encoder_dim = required<std::size_t>(meta, "encoder_dim");
    m.encoder_depth = required<std::size_t>(meta, "encoder_depth");
    m.encoder_heads = required<std::size_t>(meta, "encoder_heads");
    m.decoder_dim = required<std::size_t>(meta, "decoder_dim");
    m.decoder_depth = required<std::size_t>(meta, "decoder_depth");
    m.decoder_heads = required<std::size_t>(meta, "decoder_heads");
    m.patch_size = required<std::size_t>(meta, "patch_size");
    m.grid_side = required<std::size_t>(meta, "grid_side");
    m.mlp_ratio = optional_field<double>(meta, "mlp_ratio", 4.0);
    m.layer_norm_eps = optional_field<double>(meta, "layer_norm_eps", 1e-6);
    m.pixel_targets = required<bool>(meta, "pixel_targets");
    m.channel_mean = required<std::array<float, 3>>(meta, "channel_mean");
    m.channel_std = required<std::array<float, 3>>(meta, "channel_std");
    m.param_count = required<std::uint64_t>(meta, "param_count");
    if (optional_field<std::string>(meta, "patch_layout", "hwc") != "hwc")
        throw LoadError("unsupported patch_layout (expected \"hwc\")");

    if (m.patch_size * m.grid_side != 224)
        throw LoadError("patch_size * grid_side must be 224, got " +
                        std::to_string(m.patch_size * m.grid_side));
    if (m.encoder_heads == 0 || m.encoder_dim % m.encoder_heads != 0)
        throw LoadError("encoder_dim must be divisible by encoder_heads");
    if (m.decoder_heads == 0 || m.decoder_dim % m.decoder_heads != 0)
        throw LoadError("decoder_dim must be divisible by decoder_heads");
    if (m.encoder_dim % 4 != 0 || m.decoder_dim % 4 != 0)
        throw LoadError("embedding dims must be multiples of 4 for 2-D sin-cos positions");
    if (!(m.mlp_ratio > 0.0) || !(m.layer_norm_eps > 0.0)) throw LoadError("mlp_ratio and layer_norm_eps must be positive");
    for (float s : m.channel_std)
        if (!(s > 0.0f)) throw LoadError("channel_std entries must be positive");
    return m;
}

TensorShapes expected_tensors(const MaeManifest& m, bool with_pos_embed) {
    const std::size_t tokens = m.num_patches() + 1;
    TensorShapes out;
    out.push_back({"encoder.patch_embed.weight", {m.encoder_dim, 3, m.patch_size, m.patch_size}});
    out.push_back({"encoder.patch_embed.bias", {m.encoder_dim}});
    out.push_back({"encoder.cls_token", {1, 1, m.encoder_dim}});
    if (with_pos_embed) out.push_back({"encoder.pos_embed", {1, tokens, m.encoder_dim}});
    for (std::size_t i = 0; i < m.encoder_depth; ++i)
        append_block_shapes(out, "encoder.blocks." + std::to_string(i) + ".", m.encoder_dim,
                            m.encoder_mlp_dim());
    out.push_back({"encoder.norm.weight", {m.encoder_dim}});
    out.push_back({"encoder.norm.bias", {m.encoder_dim}});
    out.push_back({"decoder.embed.weight", {m.decoder_dim, m.encoder_dim}});
    out.push_back({"decoder.embed.bias", {m.decoder_dim}});
    out.push_back({"decoder.mask_token", {1, 1, m.decoder_dim}});
    if (with_pos_embed) out.push_back({"decoder.pos_embed", {1, tokens, m.decoder_dim}});
    for (std::size_t i = 0; i < m.decoder_depth; ++i)
        append_block_shapes(out, "decoder.blocks." + std::to_string(i) + ".", m.decoder_dim,
                            m.decoder_mlp_dim());
    out.push_back({"decoder.norm.weight", {m.decoder_dim}});
    out.push_back({"decoder.norm.bias", {m.decoder_dim}});
    out.push_back({"decoder.pred.weight", {m.patch_dim(), m.decoder_dim}});
    out.push_back({"decoder.pred.bias", {m.patch_dim()}});
    return out;
}

std::uint64_t count_parameters(const MaeManifest& manifest, bool with_pos_embed) {
    std::uint64_t total = 0;
    for (const auto& [name, shape] : expected_tensors(manifest, with_pos_embed))
        total += std::accumulate(shape.begin(), shape.end(), std::uint64_t{1},
                                 [](std::uint64_t a, std::size_t b) { return a * b; });
    return total;
}

Grid<float> sincos_pos_embed_2d(std::size_t dim, std::size_t grid_side) {
    if (dim % 4 != 0) throw ShapeError("sin-cos embedding dim must be a multiple of 4");
    const std::size_t quarter = dim / 4;
    Grid<float> out(grid_side * grid_side + 1, dim, 0.0f);
    for (std::size_t i = 0; i < grid_side; ++i) {
        for (std::size_t j = 0; j < grid_side; ++j) {
            auto row = out.row(1 + i * grid_side + j);
            for (std::size_t k = 0; k < quarter; ++k) {
                const double omega =
                    1.0 / std::pow(10000.0, static_cast<double>(k) / static_cast<double>(quarter));
                const double col_angle = static_cast<double>(j) * omega;
                const double row_angle = static_cast<double>(i) * omega;
                row[k] = static_cast<float>(std::sin(col_angle));
                row[quarter + k] = static_cast<float>(std::cos(col_angle));
                row[2 * quarter + k] = static_cast<float>(std::sin(row_angle));
                row[3 * quarter + k] = static_cast<float>(std::cos(row_angle));
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Loading

namespace {

class TensorTaker {
public:
    explicit TensorTaker(TensorArchive& archive) : archive_(archive) {}

    std::vector<float> take(const std::string& name, const std::vector<std::size_t>& shape) {
        auto it = archive_.tensors.find(name);
        if (it == archive_.tensors.end()) throw LoadError(name + ": missing tensor");
        if (it->second.shape != shape)
            throw LoadError(name + ": shape mismatch, expected " + shape_string(shape) + ", got " +
                            shape_string(it->second.shape));
        std::vector<float> data = std::move(it->second.data);
        archive_.tensors.erase(it);
        return data;
    }

    Linear linear(const std::string& prefix, std::size_t out, std::size_t in) {
        Linear l;
        l.in = in;
        l.out = out;
        l.weight = take(prefix + ".weight", {out, in});
        l.bias = take(prefix + ".bias", {out});
        return l;
    }

    LayerNormParams norm(const std::string& prefix, std::size_t dim) {
        return {take(prefix + ".weight", {dim}), take(prefix + ".bias", {dim})};
    }

    TransformerBlock block(const std::string& prefix, std::size_t dim, std::size_t hidden) {
        TransformerBlock b;
        b.norm1 = norm(prefix + "norm1", dim);
        b.qkv = linear(prefix + "attn.qkv", 3 * dim, dim);
        b.proj = linear(prefix + "attn.proj", dim, dim);
        b.norm2 = norm(prefix + "norm2", dim);
        b.fc1 = linear(prefix + "mlp.fc1", hidden, dim);
        b.fc2 = linear(prefix + "mlp.fc2", dim, hidden);
        return b;
    }

    Grid<float> positions(const std::string& name, std::size_t dim, std::size_t grid_side) {
        const std::size_t tokens = grid_side * grid_side + 1;
        if (archive_.tensors.count(name) == 0) return sincos_pos_embed_2d(dim, grid_side);
        return Grid<float>(tokens, dim, take(name, {1, tokens, dim}));
    }

    void require_empty() const {
        if (!archive_.tensors.empty())
            throw LoadError(archive_.tensors.begin()->first + ": unexpected tensor in archive");
    }

private:
    TensorArchive& archive_;
};

}  // namespace

MaeModel MaeModel::from_archive(TensorArchive archive) {
    if (!archive.metadata.contains("checksum")) throw LoadError("manifest has no checksum");
    MaeModel model;
    model.manifest_ = MaeManifest::from_json(archive.metadata);
    const MaeManifest& m = model.manifest_;
    if (!m.pixel_targets)
        throw LoadError("checkpoint predicts per-patch normalised targets (pixel_targets=false)");

    std::uint64_t stored = 0;
    for (const auto& [name, t] : archive.tensors) stored += t.numel();

    TensorTaker take(archive);
    {
        const std::size_t s = m.patch_size;
        const auto conv = take.take("encoder.patch_embed.weight", {m.encoder_dim, 3, s, s});
        // (out, channel, kh, kw) -> (out, (kh * S + kw) * 3 + channel)
        model.patch_embed_.in = m.patch_dim();
        model.patch_embed_.out = m.encoder_dim;
        model.patch_embed_.weight.resize(m.encoder_dim * m.patch_dim());
        for (std::size_t o = 0; o < m.encoder_dim; ++o)
            for (std::size_t c = 0; c < 3; ++c)
                for (std::size_t kh = 0; kh < s; ++kh)
                    for (std::size_t kw = 0; kw < s; ++kw)
                        model.patch_embed_.weight[o * m.patch_dim() + (kh * s + kw) * 3 + c] =
                            conv[((o * 3 + c) * s + kh) * s + kw];
        model.patch_embed_.bias = take.take("encoder.patch_embed.bias", {m.encoder_dim});
    }
    model.cls_token_ = take.take("encoder.cls_token", {1, 1, m.encoder_dim});
    model.pos_embed_ = take.positions("encoder.pos_embed", m.encoder_dim, m.grid_side);
    for (std::size_t i = 0; i < m.encoder_depth; ++i)
        model.encoder_blocks_.push_back(take.block("encoder.blocks." + std::to_string(i) + ".",
                                                   m.encoder_dim, m.encoder_mlp_dim()));
    model.encoder_norm_ = take.norm("encoder.norm", m.encoder_dim);
    model.decoder_embed_ = take.linear("decoder.embed", m.decoder_dim, m.encoder_dim);
    model.mask_token_ = take.take("decoder.mask_token", {1, 1, m.decoder_dim});
    model.decoder_pos_embed_ = take.positions("decoder.pos_embed", m.decoder_dim, m.grid_side);
    for (std::size_t i = 0; i < m.decoder_depth; ++i)
        model.decoder_blocks_.push_back(take.block("decoder.blocks." + std::to_string(i) + ".",
                                                   m.decoder_dim, m.decoder_mlp_dim()));
    model.decoder_norm_ = take.norm("decoder.norm", m.decoder_dim);
    model.decoder_pred_ = take.linear("decoder.pred", m.patch_dim(), m.decoder_dim);
    take.require_empty();

    if (stored != m.param_count)
        throw LoadError("parameter count mismatch: manifest declares " +
                        std::to_string(m.param_count) + ", archive stores " + std::to_string(stored));
    model.parameter_count_ = stored;
    return model;
}

MaeModel MaeModel::load(const std::string& path) {
    return from_archive(read_tensor_archive(path));
}

// ---------------------------------------------------------------------------
// Patches and forward pass

Grid<float> patchify(const RgbImage& image, std::size_t patch_size) {
    if (patch_size == 0 || image.height != 224 || image.width != 224 || 224 % patch_size != 0 ||
        image.pixels.size() != 3 * 224 * 224)
        throw ShapeError("patchify expects a 3 x 224 x 224 image and a patch size dividing 224");
    const std::size_t n = 224 / patch_size;
    Grid<float> out(n * n, patch_size * patch_size * 3);
    for (std::size_t pi = 0; pi < n; ++pi)
        for (std::size_t pj = 0; pj < n; ++pj) {
            auto dst = out.row(pi * n + pj);
            for (std::size_t y = 0; y < patch_size; ++y)
                for (std::size_t x = 0; x < patch_size; ++x)
                    for (std::size_t c = 0; c < 3; ++c)
                        dst[(y * patch_size + x) * 3 + c] =
                            image.at(c, pi * patch_size + y, pj * patch_size + x);
        }
    return out;
}

RgbImage unpatchify(const Grid<float>& patches, std::size_t patch_size) {
    const std::size_t n = patch_size == 0 ? 0 : 224 / patch_size;
    if (n == 0 || n * patch_size != 224 || patches.rows() != n * n ||
        patches.cols() != patch_size * patch_size * 3)
        throw ShapeError("unpatchify expects (224/S)^2 patches of S*S*3 values");
    RgbImage out(224, 224);
    for (std::size_t pi = 0; pi < n; ++pi)
        for (std::size_t pj = 0; pj < n; ++pj) {
            const auto src = patches.row(pi * n + pj);
            for (std::size_t y = 0; y < patch_size; ++y)
                for (std::size_t x = 0; x < patch_size; ++x)
                    for (std::size_t c = 0; c < 3; ++c)
                        out.at(c, pi * patch_size + y, pj * patch_size + x) =
                            src[(y * patch_size + x) * 3 + c];
        }
    return out;
}

RgbImage forward_reconstruct(const MaeModel& model, const RgbImage& image, const PatchMask& mask,
                             const ForwardOptions& options) {
    const MaeManifest& mf = model.manifest();
    if (mask.side() != mf.grid_side)
        throw ShapeError("mask side " + std::to_string(mask.side()) + " does not match grid side " +
                         std::to_string(mf.grid_side));
    for (float v : image.pixels)
        if (!std::isfinite(v)) throw NumericsError("non-finite input pixel");

    RgbImage standardized = image;
    if (standardized.height == 224 && standardized.width == 224) {
        for (std::size_t c = 0; c < 3; ++c)
            for (std::size_t r = 0; r < 224; ++r)
                for (std::size_t x = 0; x < 224; ++x)
                    standardized.at(c, r, x) =
                        (image.at(c, r, x) - mf.channel_mean[c]) / mf.channel_std[c];
    }
    const Grid<float> patches = patchify(standardized, mf.patch_size);

    std::vector<std::size_t> order = mask.visible_indices();
    if (!options.visible_order.empty()) {
        std::vector<std::size_t> sorted(options.visible_order.begin(), options.visible_order.end());
        std::sort(sorted.begin(), sorted.end());
        if (sorted != order)
            throw ShapeError("visible_order must be a permutation of the visible patch indices");
        order.assign(options.visible_order.begin(), options.visible_order.end());
    }

    const Grid<float> predicted =
        options.strict ? run_forward<double>(model, patches, order, options.trace)
                       : run_forward<float>(model, patches, order, options.trace);

    RgbImage out = unpatchify(predicted, mf.patch_size);
    const std::size_t s = mf.patch_size;
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t r = 0; r < 224; ++r)
            for (std::size_t x = 0; x < 224; ++x) {
                float& px = out.at(c, r, x);
                px = mask.visible(r / s, x / s) ? image.at(c, r, x)
                                                : px * mf.channel_std[c] + mf.channel_mean[c];
            }
    return out;
}

}  // namespace visionts
