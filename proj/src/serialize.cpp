#include "fingerloc/serialize.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <variant>

#include <json.hpp>

#include "base64.hpp"
#include "fingerloc/error.hpp"
#include "fingerloc/report.hpp"

namespace fingerloc {
namespace {

using nlohmann::json;

constexpr std::string_view kFormatName = "fingerloc.network";
constexpr std::string_view kChecksumPrefix = "sha256 ";

std::string encode_array(const NdArray& array) {
  std::string bytes(array.size() * sizeof(double), '\0');
  for (std::size_t i = 0; i < array.size(); ++i) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(array[i]);
    for (int b = 0; b < 8; ++b) {
      bytes[i * 8 + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
    }
  }
  return detail::base64_encode(bytes);
}

void decode_array(const json& text, NdArray& array, std::string_view what) {
  const std::optional<std::string> bytes =
      detail::base64_decode(text.get<std::string>());
  if (!bytes || bytes->size() != array.size() * sizeof(double)) {
    throw DataError("network load: bad " + std::string(what) + " payload");
  }
  for (std::size_t i = 0; i < array.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
      bits |= static_cast<std::uint64_t>(
                  static_cast<unsigned char>((*bytes)[i * 8 + b]))
              << (8 * b);
    }
    array[i] = std::bit_cast<double>(bits);
  }
}

json layer_to_json(const Layer& layer) {
  json j;
  j["kind"] = std::string(layer_name(layer));
  if (const auto* d = std::get_if<Dense>(&layer)) {
    j["in"] = d->in;
    j["out"] = d->out;
    j["weights"] = encode_array(d->weights);
    j["bias"] = encode_array(d->bias);
  } else if (const auto* c = std::get_if<Conv2d>(&layer)) {
    j["in_channels"] = c->in_channels;
    j["out_channels"] = c->out_channels;
    j["kernel"] = {c->kernel_h, c->kernel_w};
    j["weights"] = encode_array(c->weights);
    j["bias"] = encode_array(c->bias);
  } else if (const auto* p = std::get_if<MaxPool2d>(&layer)) {
    j["window"] = p->window;
  }
  return j;
}

Layer layer_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "dense") {
    Layer layer = make_dense(j.at("in").get<std::size_t>(),
                             j.at("out").get<std::size_t>());
    auto& d = std::get<Dense>(layer);
    decode_array(j.at("weights"), d.weights, "dense weights");
    decode_array(j.at("bias"), d.bias, "dense bias");
    return layer;
  }
  if (kind == "conv2d") {
    const auto& k = j.at("kernel");
    Layer layer = make_conv2d(j.at("in_channels").get<std::size_t>(),
                              j.at("out_channels").get<std::size_t>(),
                              k.at(0).get<std::size_t>(), k.at(1).get<std::size_t>());
    auto& c = std::get<Conv2d>(layer);
    decode_array(j.at("weights"), c.weights, "conv2d weights");
    decode_array(j.at("bias"), c.bias, "conv2d bias");
    return layer;
  }
  if (kind == "maxpool2d") return MaxPool2d{j.at("window").get<std::size_t>()};
  if (kind == "relu") return Relu{};
  if (kind == "sigmoid") return Sigmoid{};
  if (kind == "flatten") return Flatten{};
  throw DataError("network load: unknown layer kind '" + kind + "'");
}

}  // namespace

std::string save_network(const Network& network) {
  json doc;
  doc["format"] = kFormatName;
  doc["version"] = kNetworkFormatVersion;
  doc["input_shape"] = network.input_shape();
  doc["layers"] = json::array();
  for (const Layer& layer : network.layers()) {
    doc["layers"].push_back(layer_to_json(layer));
  }
  const std::string body = doc.dump();
  return body + "\n" + std::string(kChecksumPrefix) + sha256_hex(body) + "\n";
}

Network load_network(std::string_view bytes) {
  const std::size_t newline = bytes.find('\n');
  if (newline == std::string_view::npos) {
    throw DataError("network load: truncated input");
  }
  const std::string_view body = bytes.substr(0, newline);
  std::string_view trailer = bytes.substr(newline + 1);
  if (!trailer.empty() && trailer.back() == '\n') trailer.remove_suffix(1);
  if (!trailer.starts_with(kChecksumPrefix)) {
    throw DataError("network load: missing checksum");
  }
  if (trailer.substr(kChecksumPrefix.size()) != sha256_hex(body)) {
    throw DataError("network load: checksum mismatch");
  }
  try {
    const json doc = json::parse(body);
    if (doc.at("format").get<std::string>() != kFormatName) {
      throw DataError("network load: not a fingerloc network");
    }
    const int version = doc.at("version").get<int>();
    if (version != kNetworkFormatVersion) {
      throw DataError("network load: unsupported version " +
                      std::to_string(version));
    }
    Network network(doc.at("input_shape").get<Shape>());
    for (const json& layer : doc.at("layers")) {
      network.add(layer_from_json(layer));
    }
    return network;
  } catch (const json::exception& e) {
    throw DataError(std::string("network load: ") + e.what());
  } catch (const ShapeError& e) {
    throw DataError(std::string("network load: ") + e.what());
  }
}

}  // namespace fingerloc
