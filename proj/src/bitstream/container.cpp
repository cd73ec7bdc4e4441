// SPDX-License-Identifier: Apache-2.0
#include "flowcodec/bitstream/container.hpp"

#include "flowcodec/bytes.hpp"

#include <cstdio>
#include <stdexcept>

namespace flowcodec::bitstream {

namespace {

std::size_t intra_size(const ContainerHeader& h) {
  return static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.height) * static_cast<std::size_t>(h.channels);
}

void check_header(const ContainerHeader& h) {
  if (h.width < 1 || h.width > 0xFFFF || h.height < 1 || h.height > 0xFFFF)
    throw std::invalid_argument("container: frame extents out of range");
  if (h.channels < 1 || h.channels > 0xFF) throw std::invalid_argument("container: channel count out of range");
  if (h.intra_period < 1 || h.intra_period > 0xFFFF) throw std::invalid_argument("container: bad intra period");
}

}  // namespace

std::vector<std::uint8_t> write_container(const Container& c) {
  const ContainerHeader& h = c.header;
  check_header(h);
  ByteWriter w;
  w.raw(std::string("FRDC"));
  w.u16(h.version);
  w.u16(static_cast<std::uint16_t>(h.width));
  w.u16(static_cast<std::uint16_t>(h.height));
  w.u8(static_cast<std::uint8_t>(h.channels));
  w.u16(static_cast<std::uint16_t>(h.intra_period));
  w.u32(static_cast<std::uint32_t>(c.frames.size()));
  w.f64(h.lambda);
  w.u64(h.checkpoint_digest);
  for (std::size_t i = 0; i < c.frames.size(); ++i) {
    const FramePayload& f = c.frames[i];
    w.u8(static_cast<std::uint8_t>(f.type));
    if (f.type == FrameType::intra) {
      if (f.bytes.size() != intra_size(h))
        throw std::invalid_argument("container: intra frame " + std::to_string(i) + " has the wrong size");
    } else {
      w.u32(static_cast<std::uint32_t>(f.bytes.size()));
    }
    w.raw(f.bytes);
  }
  return w.take();
}

Container read_container(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "FRDC container");
  r.expect_magic("FRDC");
  Container c;
  ContainerHeader& h = c.header;
  h.version = r.u16();
  if (h.version != kContainerVersion)
    throw std::runtime_error("FRDC container: unsupported version " + std::to_string(h.version));
  h.width = r.u16();
  h.height = r.u16();
  h.channels = r.u8();
  h.intra_period = r.u16();
  const std::uint32_t count = r.u32();
  h.lambda = r.f64();
  h.checkpoint_digest = r.u64();
  check_header(h);
  for (std::uint32_t i = 0; i < count; ++i) {
    FramePayload f;
    const std::uint8_t type = r.u8();
    if (type == static_cast<std::uint8_t>(FrameType::intra)) {
      f.type = FrameType::intra;
      const auto s = r.raw(intra_size(h));
      f.bytes.assign(s.begin(), s.end());
    } else if (type == static_cast<std::uint8_t>(FrameType::inter)) {
      f.type = FrameType::inter;
      const auto s = r.raw(r.u32());
      f.bytes.assign(s.begin(), s.end());
    } else {
      throw std::runtime_error("FRDC container: frame " + std::to_string(i) + " has unknown type " +
                               std::to_string(type));
    }
    c.frames.push_back(std::move(f));
  }
  if (!r.done()) throw std::runtime_error("FRDC container: trailing bytes after the last frame");
  return c;
}

void require_digest(const Container& c, std::uint64_t digest) {
  if (c.header.checkpoint_digest != digest) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "checkpoint digest mismatch: bitstream %016llx, checkpoint %016llx",
                  static_cast<unsigned long long>(c.header.checkpoint_digest), static_cast<unsigned long long>(digest));
    throw std::runtime_error(buf);
  }
}

void write_container_file(const std::string& path, const Container& c) { write_file(path, write_container(c)); }

Container read_container_file(const std::string& path) { return read_container(read_file(path)); }

}  // namespace flowcodec::bitstream
