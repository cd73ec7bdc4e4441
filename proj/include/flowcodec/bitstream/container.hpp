// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace flowcodec::bitstream {

inline constexpr std::uint16_t kContainerVersion = 1;

enum class FrameType : std::uint8_t { intra = 'I', inter = 'P' };

struct ContainerHeader {
  std::uint16_t version = kContainerVersion;
  int width = 0;
  int height = 0;
  int channels = 1;
  int intra_period = 12;
  double lambda = 0.0;
  std::uint64_t checkpoint_digest = 0;

  bool operator==(const ContainerHeader&) const = default;
};

// Intra payloads are raw 8-bit planes of width*height*channels bytes; inter payloads are
// one range-coded stream holding z, then y, then g symbols.
struct FramePayload {
  FrameType type = FrameType::intra;
  std::vector<std::uint8_t> bytes;

  double bits() const { return 8.0 * static_cast<double>(bytes.size()); }

  bool operator==(const FramePayload&) const = default;
};

struct Container {
  ContainerHeader header;
  std::vector<FramePayload> frames;

  bool operator==(const Container&) const = default;
};

// Layout (little-endian):
//   "FRDC" u16 version, u16 width, u16 height, u8 channels, u16 intra period,
//   u32 frame count, f64 lambda, u64 checkpoint digest,
//   per frame: u8 type, then either the raw intra plane or u32 length + inter payload.
std::vector<std::uint8_t> write_container(const Container& container);
Container read_container(std::span<const std::uint8_t> bytes);

// Throws std::runtime_error when the container was produced with another checkpoint.
void require_digest(const Container& container, std::uint64_t checkpoint_digest);

void write_container_file(const std::string& path, const Container& container);
Container read_container_file(const std::string& path);

}  // namespace flowcodec::bitstream
