#include "anchorfit/boxgeom.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace anchorfit {

BoxShape::BoxShape(double width, double height) : width_(width), height_(height) {
  if (!(std::isfinite(width) && std::isfinite(height)) || width <= 0.0 || height <= 0.0) {
    throw std::invalid_argument("box dimensions must be finite and positive, got " +
                                std::to_string(width) + "x" + std::to_string(height));
  }
}

BoxShape anchor_dims(double size, double ar) {
  if (!(std::isfinite(size) && size > 0.0)) {
    throw std::invalid_argument("anchor size must be positive");
  }
  if (!(std::isfinite(ar) && ar > 0.0)) {
    throw std::invalid_argument("anchor aspect ratio must be positive");
  }
  const double root = std::sqrt(ar);
  return BoxShape(size * root, size / root);
}

double intersection_area(const PlacedBox& a, const PlacedBox& b) noexcept {
  const double ix = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
  const double iy = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  return ix * iy;
}

double iou(const PlacedBox& a, const PlacedBox& b) noexcept {
  const double inter = intersection_area(a, b);
  if (inter <= 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double concentric_iou(const BoxShape& obj, const BoxShape& anchor) noexcept {
  const double inter =
      std::min(obj.width(), anchor.width()) * std::min(obj.height(), anchor.height());
  const double uni = obj.area() + anchor.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace anchorfit
