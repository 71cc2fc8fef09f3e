#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace visionts {

struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<float> data;

    std::size_t numel() const noexcept;
};

/// Named float32 tensors plus a free-form metadata object.
///
/// On-disk layout (little-endian):
///   bytes 0..7   u64 header length
///   header       UTF-8 JSON: name -> {"dtype":"F32","shape":[...],
///                "data_offsets":[begin,end]}, plus "__metadata__"
///   payload      raw tensor bytes; offsets are relative to payload start
///
/// Metadata values may be stored either as JSON values or as strings that
/// hold JSON; both read back as JSON values.
struct TensorArchive {
    nlohmann::json metadata = nlohmann::json::object();
    std::map<std::string, Tensor> tensors;
};

/// Parses and validates the container. When the metadata carries a
/// "checksum" entry ("sha256:<hex>") it is verified against the payload.
/// Throws LoadError on any structural problem.
TensorArchive read_tensor_archive(const std::string& path);
TensorArchive parse_tensor_archive(std::span<const std::uint8_t> bytes);

/// Serialises deterministically (tensors in name order, header padded to 8
/// bytes) and stores the payload checksum in the metadata.
std::vector<std::uint8_t> serialize_tensor_archive(const TensorArchive& archive);
void write_tensor_archive(const std::string& path, const TensorArchive& archive);

std::string sha256_hex(std::span<const std::uint8_t> bytes);

}  // namespace visionts
