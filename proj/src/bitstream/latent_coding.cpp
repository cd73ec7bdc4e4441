// SPDX-License-Identifier: Apache-2.0
#include "flowcodec/bitstream/latent_coding.hpp"

#include "flowcodec/bitstream/range_coder.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace flowcodec::bitstream {

using codec::kSymbolMax;
using codec::kSymbolMin;
using grad::Tensor;

namespace {

struct Shapes {
  grad::Extents z, y, g;
};

Shapes shapes_for(const motion::Frame& reference, const codec::Codec& c) {
  const int h = reference.height(), w = reference.width();
  if (h % codec::CodecConfig::divisor() != 0 || w % codec::CodecConfig::divisor() != 0)
    throw std::invalid_argument("inter coding: frame extents must be divisible by " +
                                std::to_string(codec::CodecConfig::divisor()));
  return {{c.config.z_channels, h / 32, w / 32}, {c.config.y_channels, h / 8, w / 8},
          {c.config.g_channels, h / 8, w / 8}};
}

int symbol_of(double v, const char* what) {
  if (v != std::floor(v) || v < kSymbolMin || v > kSymbolMax)
    throw std::logic_error(std::string("inter coding: ") + what + " holds a non-symbol value " + std::to_string(v));
  return static_cast<int>(v);
}

void check(const Tensor& t, const grad::Extents& e, const char* what) {
  if (t.extents() != e)
    throw std::invalid_argument(std::string("inter coding: ") + what + " has extents " + grad::describe(t.extents()) +
                                ", expected " + grad::describe(e));
}

const Tensor& mixture(const codec::Codec& c) { return c.params.at("codec.zmodel.params"); }

// Visits every symbol position with its table in coding order. `on_symbol(table, value&)`
// either consumes or produces the value; the decoder-side stages run between groups.
template <typename OnSymbol>
void walk(InterSymbols& s, const motion::Frame& reference, const codec::Codec& c, codec::DecoderSide& side,
          OnSymbol&& on_symbol) {
  const Tensor& zm = mixture(c);
  const int zc = s.z_hat.channels();
  const Eigen::Index zplane = s.z_hat.size() / zc;
  for (int ch = 0; ch < zc; ++ch) {
    const CdfTable t = z_table(zm, ch);
    for (Eigen::Index i = ch * zplane; i < (ch + 1) * zplane; ++i) on_symbol(t, s.z_hat.values()[i]);
  }
  codec::decode_hyper(s.z_hat, c, side);
  for (Eigen::Index i = 0; i < s.y_hat.size(); ++i)
    on_symbol(gaussian_cdf(side.y_mean[i], side.y_scale_param[i], kSymbolMin, kSymbolMax), s.y_hat.values()[i]);
  codec::decode_motion(s.y_hat, reference, c, side);
  for (Eigen::Index i = 0; i < s.g_hat.size(); ++i)
    on_symbol(gaussian_cdf(side.g_mean[i], side.g_scale_param[i], kSymbolMin, kSymbolMax), s.g_hat.values()[i]);
}

void check_symbols(const InterSymbols& s, const Shapes& e) {
  check(s.z_hat, e.z, "z");
  check(s.y_hat, e.y, "y");
  check(s.g_hat, e.g, "g");
}

}  // namespace

CdfTable z_table(const Tensor& params, int channel) {
  const int k = params.extents().at(1) / 3;
  const double* row = params.values().data() + static_cast<Eigen::Index>(channel) * 3 * k;
  const auto n = static_cast<std::size_t>(k);
  return logistic_mixture_cdf({row, n}, {row + k, n}, {row + 2 * k, n}, kSymbolMin, kSymbolMax);
}

InterFrame encode_inter(const InterSymbols& symbols, const motion::Frame& reference, const codec::Codec& c) {
  check_symbols(symbols, shapes_for(reference, c));
  InterFrame out;
  out.symbols = symbols;
  RangeEncoder enc;
  codec::DecoderSide side;
  walk(out.symbols, reference, c, side, [&](const CdfTable& t, double& v) { enc.encode(t, symbol_of(v, "latent")); });
  out.payload = enc.finish();
  out.flow = side.flow;
  out.reconstruction = codec::decode_frame(out.symbols.g_hat, reference, side, c);
  return out;
}

InterFrame decode_inter(std::span<const std::uint8_t> payload, const motion::Frame& reference, const codec::Codec& c) {
  const Shapes e = shapes_for(reference, c);
  InterFrame out;
  out.symbols = {Tensor::zeros(e.z), Tensor::zeros(e.y), Tensor::zeros(e.g)};
  RangeDecoder dec(payload);
  codec::DecoderSide side;
  walk(out.symbols, reference, c, side, [&](const CdfTable& t, double& v) { v = dec.decode(t); });
  out.payload.assign(payload.begin(), payload.end());
  out.flow = side.flow;
  out.reconstruction = codec::decode_frame(out.symbols.g_hat, reference, side, c);
  return out;
}

double quantized_code_length(const InterSymbols& symbols, const motion::Frame& reference, const codec::Codec& c) {
  check_symbols(symbols, shapes_for(reference, c));
  InterSymbols copy = symbols;
  codec::DecoderSide side;
  double bits = 0.0;
  walk(copy, reference, c, side, [&](const CdfTable& t, double& v) { bits += code_length(t, symbol_of(v, "latent")); });
  return bits;
}

}  // namespace flowcodec::bitstream
