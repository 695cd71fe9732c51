#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "feast/events.hpp"

namespace feast {

inline constexpr std::uint16_t kNmnistSide = 34;
inline constexpr Timestamp kNmnistMaxTimestamp = (Timestamp{1} << 23) - 1;

// Record layout, 5 bytes per event:
//   byte 0      x
//   byte 1      y
//   byte 2 b7   polarity (1 = ON, 0 = OFF)
//   bytes 2..4  remaining 23 bits, big-endian timestamp in microseconds

EventStream decode_nmnist(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_nmnist(const EventStream& stream);

EventStream read_nmnist_file(const std::filesystem::path& path);
void write_nmnist_file(const std::filesystem::path& path, const EventStream& stream);

}  // namespace feast
