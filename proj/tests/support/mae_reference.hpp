#pragma once

// Naive double-precision masked-autoencoder forward pass that reads the raw
// archive tensors (conv layout, no rearrangement) and builds its own
// position tables. Slow; meant for the tiny fixture only.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "visionts/grid.hpp"
#include "visionts/mae.hpp"
#include "visionts/tensor_archive.hpp"

namespace oracle {

using Mat = std::vector<std::vector<double>>;

class MaeReference {
public:
    MaeReference(const visionts::MaeManifest& m, const visionts::TensorArchive& a) : m_(m), a_(a) {}

    /// image: planar 3 x 224 x 224; visible: per-patch flags (row-major).
    std::vector<double> reconstruct(const visionts::RgbImage& image, const std::vector<bool>& visible) const {
        const std::size_t N = m_.grid_side, S = m_.patch_size, D = m_.encoder_dim, side = N * S;
        auto px = [&](std::size_t c, std::size_t y, std::size_t x) {
            return (static_cast<double>(image.at(c, y, x)) - m_.channel_mean[c]) / m_.channel_std[c];
        };
        const Mat pos = table("encoder.pos_embed", D);
        const auto& conv = t("encoder.patch_embed.weight");
        const auto& conv_b = t("encoder.patch_embed.bias");

        Mat tokens;
        std::vector<double> cls(D);
        for (std::size_t d = 0; d < D; ++d) cls[d] = t("encoder.cls_token")[d] + pos[0][d];
        tokens.push_back(cls);
        std::vector<std::size_t> kept;
        for (std::size_t p = 0; p < N * N; ++p) {
            if (!visible[p]) continue;
            kept.push_back(p);
            const std::size_t pr = p / N, pc = p % N;
            std::vector<double> tok(D);
            for (std::size_t o = 0; o < D; ++o) {
                double s = conv_b[o];
                for (std::size_t c = 0; c < 3; ++c)
                    for (std::size_t kh = 0; kh < S; ++kh)
                        for (std::size_t kw = 0; kw < S; ++kw)
                            s += conv[((o * 3 + c) * S + kh) * S + kw] * px(c, pr * S + kh, pc * S + kw);
                tok[o] = s + pos[1 + p][o];
            }
            tokens.push_back(tok);
        }
        for (std::size_t i = 0; i < m_.encoder_depth; ++i)
            tokens = block(tokens, "encoder.blocks." + std::to_string(i) + ".", m_.encoder_heads);
        tokens = layer_norm(tokens, "encoder.norm");

        const std::size_t DD = m_.decoder_dim;
        Mat emb = linear(tokens, "decoder.embed");
        Mat full(1 + N * N);
        full[0] = emb[0];
        for (std::size_t p = 0; p < N * N; ++p) {
            std::vector<double> mask_tok(DD);
            for (std::size_t d = 0; d < DD; ++d) mask_tok[d] = t("decoder.mask_token")[d];
            full[1 + p] = mask_tok;
        }
        for (std::size_t k = 0; k < kept.size(); ++k) full[1 + kept[k]] = emb[1 + k];
        const Mat dpos = table("decoder.pos_embed", DD);
        for (std::size_t i = 0; i < full.size(); ++i)
            for (std::size_t d = 0; d < DD; ++d) full[i][d] += dpos[i][d];
        for (std::size_t i = 0; i < m_.decoder_depth; ++i)
            full = block(full, "decoder.blocks." + std::to_string(i) + ".", m_.decoder_heads);
        full = layer_norm(full, "decoder.norm");
        const Mat pred = linear(full, "decoder.pred");

        std::vector<double> out(3 * side * side);
        for (std::size_t p = 0; p < N * N; ++p) {
            const std::size_t pr = p / N, pc = p % N;
            for (std::size_t kh = 0; kh < S; ++kh)
                for (std::size_t kw = 0; kw < S; ++kw)
                    for (std::size_t c = 0; c < 3; ++c) {
                        const std::size_t y = pr * S + kh, x = pc * S + kw;
                        const double v = visible[p] ? image.at(c, y, x)
                                                    : pred[1 + p][(kh * S + kw) * 3 + c] * m_.channel_std[c] +
                                                          m_.channel_mean[c];
                        out[(c * side + y) * side + x] = v;
                    }
        }
        return out;
    }

private:
    const std::vector<float>& t(const std::string& name) const { return a_.tensors.at(name).data; }

    // MAE-style 2-D sin-cos table: first half encodes the column, second the row.
    Mat table(const std::string& name, std::size_t dim) const {
        const std::size_t N = m_.grid_side;
        Mat out(1 + N * N, std::vector<double>(dim, 0.0));
        if (a_.tensors.count(name)) {
            const auto& data = t(name);
            for (std::size_t i = 0; i < out.size(); ++i)
                for (std::size_t d = 0; d < dim; ++d) out[i][d] = data[i * dim + d];
            return out;
        }
        const std::size_t q = dim / 4;
        for (std::size_t r = 0; r < N; ++r)
            for (std::size_t c = 0; c < N; ++c) {
                auto& row = out[1 + r * N + c];
                for (std::size_t k = 0; k < q; ++k) {
                    const double omega = 1.0 / std::pow(10000.0, static_cast<double>(k) / static_cast<double>(q));
                    row[k] = std::sin(static_cast<double>(c) * omega);
                    row[q + k] = std::cos(static_cast<double>(c) * omega);
                    row[2 * q + k] = std::sin(static_cast<double>(r) * omega);
                    row[3 * q + k] = std::cos(static_cast<double>(r) * omega);
                }
            }
        return out;
    }

    Mat linear(const Mat& x, const std::string& prefix) const {
        const auto& w = t(prefix + ".weight");
        const auto& b = t(prefix + ".bias");
        const std::size_t out_dim = b.size(), in_dim = x[0].size();
        Mat y(x.size(), std::vector<double>(out_dim));
        for (std::size_t i = 0; i < x.size(); ++i)
            for (std::size_t o = 0; o < out_dim; ++o) {
                double s = b[o];
                for (std::size_t k = 0; k < in_dim; ++k) s += w[o * in_dim + k] * x[i][k];
                y[i][o] = s;
            }
        return y;
    }

    Mat layer_norm(const Mat& x, const std::string& prefix) const {
        const auto& w = t(prefix + ".weight");
        const auto& b = t(prefix + ".bias");
        Mat y = x;
        for (auto& row : y) {
            double mean = 0.0, var = 0.0;
            for (double v : row) mean += v;
            mean /= static_cast<double>(row.size());
            for (double v : row) var += (v - mean) * (v - mean);
            var /= static_cast<double>(row.size());
            for (std::size_t d = 0; d < row.size(); ++d)
                row[d] = (row[d] - mean) / std::sqrt(var + m_.layer_norm_eps) * w[d] + b[d];
        }
        return y;
    }

    Mat block(const Mat& x, const std::string& p, std::size_t heads) const {
        const std::size_t T = x.size(), D = x[0].size(), hd = D / heads;
        const Mat qkv = linear(layer_norm(x, p + "norm1"), p + "attn.qkv");
        Mat attn(T, std::vector<double>(D, 0.0));
        for (std::size_t h = 0; h < heads; ++h)
            for (std::size_t i = 0; i < T; ++i) {
                std::vector<double> s(T);
                double mx = -1e300;
                for (std::size_t j = 0; j < T; ++j) {
                    double dot = 0.0;
                    for (std::size_t k = 0; k < hd; ++k) dot += qkv[i][h * hd + k] * qkv[j][D + h * hd + k];
                    s[j] = dot / std::sqrt(static_cast<double>(hd));
                    mx = std::max(mx, s[j]);
                }
                double z = 0.0;
                for (double& v : s) z += (v = std::exp(v - mx));
                for (std::size_t j = 0; j < T; ++j)
                    for (std::size_t k = 0; k < hd; ++k) attn[i][h * hd + k] += s[j] / z * qkv[j][2 * D + h * hd + k];
            }
        Mat y = x;
        const Mat proj = linear(attn, p + "attn.proj");
        for (std::size_t i = 0; i < T; ++i)
            for (std::size_t d = 0; d < D; ++d) y[i][d] += proj[i][d];
        Mat hidden = linear(layer_norm(y, p + "norm2"), p + "mlp.fc1");
        for (auto& row : hidden)
            for (double& v : row) v = 0.5 * v * (1.0 + std::erf(v / std::sqrt(2.0)));
        const Mat mlp = linear(hidden, p + "mlp.fc2");
        for (std::size_t i = 0; i < T; ++i)
            for (std::size_t d = 0; d < D; ++d) y[i][d] += mlp[i][d];
        return y;
    }

    visionts::MaeManifest m_;
    const visionts::TensorArchive& a_;
};

}  // namespace oracle
