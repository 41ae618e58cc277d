#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace anchorfit {

struct ConvLayerDesc {
  std::string name;
  int kernel = 1;
  int stride = 1;
  int padding = 0;
};

struct TapGeometry {
  std::string name;
  long long jump = 1;             // cumulative stride in input pixels
  long long receptive_field = 1;  // theoretical RF in input pixels
};

struct ChainGeometry {
  std::vector<TapGeometry> taps;  // in chain order

  /// Throws NotFoundError for a name that was not tapped.
  const TapGeometry& at(std::string_view name) const;
};

/**
 * Walks the chain with the usual recursion (rf += (kernel-1)*jump; jump *= stride),
 * starting from jump 1 and rf 1 at the input, and records the values after each
 * tapped layer.
 *
 * Throws std::invalid_argument for an empty chain or a malformed layer, and
 * NotFoundError for a tap that names no layer.
 */
ChainGeometry chain_geometry(std::span<const ConvLayerDesc> layers,
                             std::span<const std::string> taps);

/// VGG16 backbone with the extra layers of the five-layer detection pyramid
/// (conv3_3, conv4_3, conv5_3, conv_fc_7, conv6_2); pool5 keeps stride 2.
std::vector<ConvLayerDesc> vgg16_detection_chain();
std::vector<std::string> vgg16_detection_taps();

/// RF column for the five reference detection layers. These are fixed
/// constants: a plain VGG16 chain does not reproduce them (conv3_3 gives 40),
/// since the prediction-module layers behind them are not enumerated.
inline constexpr std::array<int, 5> kReferenceReceptiveFields = {48, 108, 228, 340, 468};
inline constexpr std::array<int, 5> kReferenceStrides = {4, 8, 16, 32, 64};

}  // namespace anchorfit
