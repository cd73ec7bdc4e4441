// SPDX-License-Identifier: Apache-2.0
#include "flowcodec/bitstream/range_coder.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace flowcodec::bitstream {

namespace {
constexpr std::uint32_t kTop = 1u << 24;
constexpr std::uint32_t kBottom = 1u << 16;
// The decoder may read this many zero bytes past a minimally flushed payload.
constexpr std::size_t kMaxPadding = 3;
}  // namespace

void RangeEncoder::put(std::uint32_t cum, std::uint32_t freq) {
  range_ >>= kPrecisionBits;
  low_ += cum * range_;
  range_ *= freq;
  while ((low_ ^ (low_ + range_)) < kTop || (range_ < kBottom && ((range_ = (0u - low_) & (kBottom - 1)), true))) {
    out_.push_back(static_cast<std::uint8_t>(low_ >> 24));
    low_ <<= 8;
    range_ <<= 8;
  }
}

void RangeEncoder::encode(const CdfTable& table, int symbol) {
  if (finished_) throw std::logic_error("RangeEncoder: encode after finish");
  if (!table.contains(symbol))
    throw std::out_of_range("RangeEncoder: symbol " + std::to_string(symbol) + " outside [" +
                            std::to_string(table.min_symbol) + ", " + std::to_string(table.max_symbol()) + "]");
  const auto i = static_cast<std::size_t>(symbol - table.min_symbol);
  put(table.cdf[i], table.cdf[i + 1] - table.cdf[i]);
}

std::vector<std::uint8_t> RangeEncoder::finish() {
  if (finished_) throw std::logic_error("RangeEncoder: finish called twice");
  finished_ = true;
  const std::uint64_t low = low_, high = static_cast<std::uint64_t>(low_) + range_;
  for (int k = 1; k <= 4; ++k) {
    const int shift = 32 - 8 * k;
    const std::uint64_t unit = std::uint64_t{1} << shift;
    const std::uint64_t v = (low + unit - 1) / unit * unit;
    if (v < high) {
      for (int b = 0; b < k; ++b) out_.push_back(static_cast<std::uint8_t>(v >> (24 - 8 * b)));
      break;
    }
  }
  return std::move(out_);
}

RangeDecoder::RangeDecoder(std::span<const std::uint8_t> bytes) : in_(bytes) {
  for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | next_byte();
}

std::uint8_t RangeDecoder::next_byte() {
  const std::size_t at = pos_++;
  if (at < in_.size()) return in_[at];
  if (at >= in_.size() + kMaxPadding)
    throw std::runtime_error("range decoder: truncated payload, needed byte " + std::to_string(at) + " of " +
                             std::to_string(in_.size()));
  return 0;
}

int RangeDecoder::decode(const CdfTable& table) {
  range_ >>= kPrecisionBits;
  const std::uint32_t target = (code_ - low_) / range_;
  if (target >= kTotalFrequency) {
    if (pos_ > in_.size())
      throw std::runtime_error("range decoder: truncated payload, ran past byte " + std::to_string(in_.size()));
    throw std::runtime_error("range decoder: corrupt payload near byte " + std::to_string(pos_));
  }
  const auto it = std::upper_bound(table.cdf.begin() + 1, table.cdf.end(), target);
  const auto i = static_cast<std::size_t>(it - table.cdf.begin()) - 1;
  low_ += table.cdf[i] * range_;
  range_ *= table.cdf[i + 1] - table.cdf[i];
  while ((low_ ^ (low_ + range_)) < kTop || (range_ < kBottom && ((range_ = (0u - low_) & (kBottom - 1)), true))) {
    code_ = (code_ << 8) | next_byte();
    low_ <<= 8;
    range_ <<= 8;
  }
  return table.min_symbol + static_cast<int>(i);
}

std::vector<std::uint8_t> range_encode(std::span<const int> symbols, std::span<const CdfTable> tables) {
  if (symbols.size() != tables.size()) throw std::invalid_argument("range_encode: one table per symbol required");
  RangeEncoder enc;
  for (std::size_t i = 0; i < symbols.size(); ++i) enc.encode(tables[i], symbols[i]);
  return enc.finish();
}

std::vector<int> range_decode(std::span<const std::uint8_t> bytes, std::span<const CdfTable> tables) {
  RangeDecoder dec(bytes);
  std::vector<int> out;
  out.reserve(tables.size());
  for (const CdfTable& t : tables) out.push_back(dec.decode(t));
  return out;
}

}  // namespace flowcodec::bitstream
