// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "flowcodec/bitstream/cdf.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace flowcodec::bitstream {

// Carry-less 32-bit range coder (Subbotin style) over 16-bit frequency tables.
class RangeEncoder {
 public:
  // Throws std::out_of_range for symbols outside the table.
  void encode(const CdfTable& table, int symbol);
  // Emits the fewest bytes (at least one) that pin a value inside the final interval.
  std::vector<std::uint8_t> finish();

 private:
  void put(std::uint32_t cum, std::uint32_t freq);

  std::uint32_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::vector<std::uint8_t> out_;
  bool finished_ = false;
};

class RangeDecoder {
 public:
  explicit RangeDecoder(std::span<const std::uint8_t> bytes);
  int decode(const CdfTable& table);
  // Bytes consumed so far, including the implicit zero padding after the payload.
  std::size_t position() const { return pos_; }

 private:
  std::uint8_t next_byte();

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
  std::uint32_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint32_t code_ = 0;
};

std::vector<std::uint8_t> range_encode(std::span<const int> symbols, std::span<const CdfTable> tables);
// One table per symbol; decodes tables.size() symbols.
std::vector<int> range_decode(std::span<const std::uint8_t> bytes, std::span<const CdfTable> tables);

}  // namespace flowcodec::bitstream
