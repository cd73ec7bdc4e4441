// SPDX-License-Identifier: Apache-2.0
#include "flowcodec/codec/model.hpp"

#include "flowcodec/codec/layers.hpp"
#include "flowcodec/grad/random.hpp"
#include "flowcodec/motion/formats.hpp"

#include <cmath>
#include <stdexcept>

namespace flowcodec::codec {

std::vector<LayerSpec> codec_layers(const CodecConfig& c) {
  const int f = c.frame_channels, y = c.y_channels, z = c.z_channels, g = c.g_channels, x = c.context_channels;
  using K = LayerKind;
  return {
      {"mv_enc.0", K::down, 2, y},         {"mv_enc.1", K::down, y, y},      {"mv_enc.2", K::down, y, y},
      {"hyper_enc.0", K::down, y, z},      {"hyper_enc.1", K::down, z, z},   {"hyper_dec.0", K::up, z, y},
      {"hyper_dec.1", K::up, y, 2 * y},    {"mv_dec.0", K::up, y, y},        {"mv_dec.1", K::up, y, y},
      {"mv_dec.2", K::up, y, 2},           {"ctx.feat", K::same, f, x},      {"ctx.refine", K::same, x, x},
      {"ctx_enc.0", K::down, f + x, x},    {"ctx_enc.1", K::down, x, x},     {"ctx_enc.2", K::down, x, g},
      {"ctx_dec.0", K::up, g + x, x},      {"ctx_dec.1", K::up, x, x},       {"ctx_dec.2", K::up, x, x},
      {"ctx_dec.3", K::same, 2 * x, f},    {"prior.0", K::down, x, x},       {"prior.1", K::down, x, x},
      {"prior.2", K::down, x, 2 * g},
  };
}

grad::Extents weight_extents(const LayerSpec& l) {
  const int k = kernel_size(l.kind);
  // Transposed kernels are stored (in, out, k, k).
  if (l.kind == LayerKind::up) return {l.in, l.out, k, k};
  return {l.out, l.in, k, k};
}

namespace {

constexpr const char* kZModel = "codec.zmodel.params";

// Output layers start small so an untrained codec predicts "copy the warped reference".
bool is_output_layer(const std::string& name) { return name == "mv_dec.2" || name == "ctx_dec.3"; }

}  // namespace

Codec init_codec(const CodecConfig& config, std::uint64_t seed) {
  Codec codec{config, {}};
  grad::Rng rng(grad::mix_seed(seed, 0xC0DEC));
  for (const LayerSpec& l : codec_layers(config)) {
    const grad::Extents we = weight_extents(l);
    const int k = kernel_size(l.kind);
    double stddev = std::sqrt(2.0 / static_cast<double>(l.in * k * k));
    if (is_output_layer(l.name)) stddev *= 0.1;
    codec.params[weight_name(l.name)] = grad::normal_tensor(we, stddev, rng);
    codec.params[bias_name(l.name)] = grad::Tensor::zeros({l.out});
  }
  const int k = config.mixture_components;
  grad::Tensor zm = grad::Tensor::zeros({config.z_channels, 3 * k});
  for (int c = 0; c < config.z_channels; ++c)
    for (int j = 0; j < k; ++j) {
      // Locations spread around zero; unit-ish scales.
      zm.values()[c * 3 * k + k + j] = k == 1 ? 0.0 : -1.0 + 2.0 * j / (k - 1);
      zm.values()[c * 3 * k + 2 * k + j] = 0.0;
    }
  codec.params[kZModel] = zm;
  return codec;
}

void validate_codec(const Codec& codec) {
  auto expect = [&](const std::string& name, const grad::Extents& e) {
    auto it = codec.params.find(name);
    if (it == codec.params.end()) throw std::invalid_argument("codec: missing parameter " + name);
    if (it->second.extents() != e)
      throw std::invalid_argument("codec: parameter " + name + " has extents " + grad::describe(it->second.extents()) +
                                  ", expected " + grad::describe(e));
  };
  for (const LayerSpec& l : codec_layers(codec.config)) {
    expect(weight_name(l.name), weight_extents(l));
    expect(bias_name(l.name), {l.out});
  }
  expect(kZModel, {codec.config.z_channels, 3 * codec.config.mixture_components});
}

namespace {

grad::Tensor ints(std::initializer_list<int> v) {
  grad::Tensor t({static_cast<int>(v.size())}, 0.0);
  int i = 0;
  for (int x : v) t.values()[i++] = x;
  return t;
}

int get_int(const grad::Tensor& t, int i) {
  const double v = t.values()[i];
  if (v != std::floor(v) || v < 1 || v > 4096) throw std::runtime_error("checkpoint: bad config entry");
  return static_cast<int>(v);
}

const grad::Tensor& entry(const grad::ParamSet& p, const std::string& name, int count) {
  auto it = p.find(name);
  if (it == p.end()) throw std::runtime_error("checkpoint: missing " + name);
  if (it->second.size() != count) throw std::runtime_error("checkpoint: malformed " + name);
  return it->second;
}

}  // namespace

grad::ParamSet to_checkpoint(const Model& m) {
  grad::ParamSet out;
  grad::merge_prefixed(out, m.flow.params, "flow.");
  grad::merge_prefixed(out, m.codec.params, "codec.");
  const auto& f = m.flow.config;
  const auto& c = m.codec.config;
  out["meta.lambda"] = grad::Tensor::scalar(m.lambda);
  out["meta.flow_config"] = ints({f.levels, f.layers_per_level, f.hidden_channels, f.frame_channels});
  out["meta.codec_config"] =
      ints({c.frame_channels, c.y_channels, c.z_channels, c.g_channels, c.context_channels, c.mixture_components});
  return out;
}

Model from_checkpoint(const grad::ParamSet& p) {
  Model m;
  m.lambda = entry(p, "meta.lambda", 1).item();
  const grad::Tensor& f = entry(p, "meta.flow_config", 4);
  m.flow.config = {get_int(f, 0), get_int(f, 1), get_int(f, 2), get_int(f, 3)};
  const grad::Tensor& c = entry(p, "meta.codec_config", 6);
  m.codec.config = {get_int(c, 0), get_int(c, 1), get_int(c, 2), get_int(c, 3), get_int(c, 4), get_int(c, 5)};
  m.flow.params = grad::select_prefixed(p, "flow.");
  m.codec.params = grad::select_prefixed(p, "codec.");
  validate_codec(m.codec);
  const motion::FlowNet ref = motion::init_flownet(m.flow.config, 0);
  for (const auto& [name, t] : ref.params) {
    auto it = m.flow.params.find(name);
    if (it == m.flow.params.end() || it->second.extents() != t.extents())
      throw std::runtime_error("checkpoint: flow parameter " + name + " missing or malformed");
  }
  return m;
}

void save_model(const std::string& path, const Model& model) { motion::write_checkpoint(path, to_checkpoint(model)); }

Model load_model(const std::string& path) { return from_checkpoint(motion::read_checkpoint(path)); }

void require_codable(int height, int width, const motion::FlowNetConfig& flow) {
  const int d = std::max(CodecConfig::divisor(), flow.divisor());
  if (height <= 0 || width <= 0 || height % d != 0 || width % d != 0)
    throw std::invalid_argument("frame extents " + std::to_string(height) + "x" + std::to_string(width) +
                                " must be positive multiples of " + std::to_string(d));
}

}  // namespace flowcodec::codec
