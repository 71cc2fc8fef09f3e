#include "visionts/tensor_archive.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <openssl/evp.h>

#include "visionts/errors.hpp"

namespace visionts {

namespace {

static_assert(std::endian::native == std::endian::little,
              "tensor archives are little-endian; big-endian hosts need byte swapping");

constexpr const char* kMetadataKey = "__metadata__";

std::uint64_t read_u64_le(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

nlohmann::json decode_metadata(const nlohmann::json& raw) {
    if (!raw.is_object()) throw LoadError("__metadata__ must be an object");
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [key, value] : raw.items()) {
        if (value.is_string()) {
            auto parsed = nlohmann::json::parse(value.get<std::string>(), nullptr, false);
            out[key] = parsed.is_discarded() ? value : parsed;
        } else {
            out[key] = value;
        }
    }
    return out;
}

std::string checksum_value(const nlohmann::json& meta) {
    const auto it = meta.find("checksum");
    if (it == meta.end()) return {};
    if (!it->is_string()) throw LoadError("checksum must be a string");
    std::string v = it->get<std::string>();
    if (v.rfind("sha256:", 0) == 0) v = v.substr(7);
    return v;
}

}  // namespace

std::size_t Tensor::numel() const noexcept {
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    return n;
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw LoadError("sha256 computation failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

TensorArchive parse_tensor_archive(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8) throw LoadError("archive shorter than its 8-byte header length");
    const std::uint64_t header_len = read_u64_le(bytes.data());
    if (header_len > bytes.size() - 8) throw LoadError("header length exceeds file size");
    const auto header_text = std::string_view(reinterpret_cast<const char*>(bytes.data() + 8),
                                              static_cast<std::size_t>(header_len));
    auto header = nlohmann::json::parse(header_text, nullptr, false);
    if (header.is_discarded() || !header.is_object()) throw LoadError("header is not a JSON object");

    const auto payload = bytes.subspan(8 + static_cast<std::size_t>(header_len));
    TensorArchive archive;
    if (auto it = header.find(kMetadataKey); it != header.end())
        archive.metadata = decode_metadata(*it);

    const std::string expected = checksum_value(archive.metadata);
    if (!expected.empty() && sha256_hex(payload) != expected)
        throw LoadError("checksum mismatch: payload sha256 does not match metadata");

    for (const auto& [name, entry] : header.items()) {
        if (name == kMetadataKey) continue;
        try {
            if (!entry.is_object()) throw LoadError(name + ": tensor entry must be an object");
            if (entry.value("dtype", "") != "F32")
                throw LoadError(name + ": unsupported dtype (only F32)");
            const auto& shape = entry.at("shape");
            const auto& offsets = entry.at("data_offsets");
            if (!shape.is_array() || !offsets.is_array() || offsets.size() != 2)
                throw LoadError(name + ": malformed shape or data_offsets");
            Tensor t;
            for (const auto& d : shape) {
                if (!d.is_number_unsigned()) throw LoadError(name + ": shape entries must be >= 0");
                t.shape.push_back(d.get<std::size_t>());
            }
            const auto begin = offsets[0].get<std::uint64_t>();
            const auto end = offsets[1].get<std::uint64_t>();
            if (begin > end || end > payload.size())
                throw LoadError(name + ": data_offsets outside the payload");
            if (end - begin != t.numel() * sizeof(float))
                throw LoadError(name + ": byte length does not match shape");
            t.data.resize(t.numel());
            std::memcpy(t.data.data(), payload.data() + begin, end - begin);
            archive.tensors.emplace(name, std::move(t));
        } catch (const nlohmann::json::exception& e) {
            throw LoadError(name + ": malformed entry (" + e.what() + ")");
        }
    }
    return archive;
}

TensorArchive read_tensor_archive(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open weights '" + path + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return parse_tensor_archive(bytes);
}

std::vector<std::uint8_t> serialize_tensor_archive(const TensorArchive& archive) {
    std::vector<std::uint8_t> payload;
    nlohmann::json header = nlohmann::json::object();
    for (const auto& [name, t] : archive.tensors) {
        if (t.data.size() != t.numel()) throw LoadError(name + ": data size does not match shape");
        const std::size_t begin = payload.size();
        const auto* raw = reinterpret_cast<const std::uint8_t*>(t.data.data());
        payload.insert(payload.end(), raw, raw + t.data.size() * sizeof(float));
        header[name] = {{"dtype", "F32"}, {"shape", t.shape}, {"data_offsets", {begin, payload.size()}}};
    }
    nlohmann::json meta = archive.metadata;
    meta["checksum"] = "sha256:" + sha256_hex(payload);
    header[kMetadataKey] = meta;

    std::string text = header.dump();
    while ((text.size() % 8) != 0) text += ' ';
    std::vector<std::uint8_t> out;
    out.reserve(8 + text.size() + payload.size());
    std::uint64_t len = text.size();
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(len >> (8 * i)));
    out.insert(out.end(), text.begin(), text.end());
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

void write_tensor_archive(const std::string& path, const TensorArchive& archive) {
    const auto bytes = serialize_tensor_archive(archive);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to '" + path + "'");
}

}  // namespace visionts
