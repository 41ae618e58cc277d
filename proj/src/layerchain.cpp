#include "anchorfit/layerchain.hpp"

#include <algorithm>
#include <stdexcept>

#include "anchorfit/errors.hpp"

namespace anchorfit {

const TapGeometry& ChainGeometry::at(std::string_view name) const {
  auto it = std::find_if(taps.begin(), taps.end(),
                         [&](const TapGeometry& t) { return t.name == name; });
  if (it == taps.end()) throw NotFoundError("no tap named '" + std::string(name) + "'");
  return *it;
}

ChainGeometry chain_geometry(std::span<const ConvLayerDesc> layers,
                             std::span<const std::string> taps) {
  if (layers.empty()) throw std::invalid_argument("layer chain is empty");
  for (const auto& tap : taps) {
    const bool known = std::any_of(layers.begin(), layers.end(),
                                   [&](const ConvLayerDesc& l) { return l.name == tap; });
    if (!known) throw NotFoundError("tap '" + tap + "' does not name a layer in the chain");
  }

  ChainGeometry out;
  long long jump = 1;
  long long rf = 1;
  for (const auto& layer : layers) {
    if (layer.kernel < 1 || layer.stride < 1 || layer.padding < 0) {
      throw std::invalid_argument("layer '" + layer.name +
                                  "' needs kernel >= 1, stride >= 1, padding >= 0");
    }
    rf += static_cast<long long>(layer.kernel - 1) * jump;
    jump *= layer.stride;
    if (std::find(taps.begin(), taps.end(), layer.name) != taps.end()) {
      out.taps.push_back({layer.name, jump, rf});
    }
  }
  return out;
}

std::vector<ConvLayerDesc> vgg16_detection_chain() {
  const auto conv = [](const char* name) { return ConvLayerDesc{name, 3, 1, 1}; };
  const auto pool = [](const char* name) { return ConvLayerDesc{name, 2, 2, 0}; };
  return {
      conv("conv1_1"), conv("conv1_2"), pool("pool1"),
      conv("conv2_1"), conv("conv2_2"), pool("pool2"),
      conv("conv3_1"), conv("conv3_2"), conv("conv3_3"), pool("pool3"),
      conv("conv4_1"), conv("conv4_2"), conv("conv4_3"), pool("pool4"),
      conv("conv5_1"), conv("conv5_2"), conv("conv5_3"), pool("pool5"),
      conv("conv_fc_6"),
      ConvLayerDesc{"conv_fc_7", 1, 1, 0},
      ConvLayerDesc{"conv6_1", 1, 1, 0},
      ConvLayerDesc{"conv6_2", 3, 2, 1},
  };
}

std::vector<std::string> vgg16_detection_taps() {
  return {"conv3_3", "conv4_3", "conv5_3", "conv_fc_7", "conv6_2"};
}

}  // namespace anchorfit
