#pragma once

/**
 * @file anchorfit/boxgeom.hpp
 * @brief Axis-aligned rectangle primitives and IoU.
 *
 * All coordinates are continuous pixels. Shapes are validated on construction,
 * so every BoxShape in flight has strictly positive, finite dimensions.
 */

namespace anchorfit {

/// Absolute tolerance applied to IoU comparisons (threshold tests, ties).
inline constexpr double kIouTolerance = 1e-9;

class BoxShape {
 public:
  /// Throws std::invalid_argument unless both dimensions are finite and > 0.
  BoxShape(double width, double height);

  double width() const noexcept { return width_; }
  double height() const noexcept { return height_; }
  double area() const noexcept { return width_ * height_; }
  double aspect_ratio() const noexcept { return width_ / height_; }

  BoxShape transposed() const noexcept { return BoxShape(height_, width_, Unchecked{}); }
  /// Returns the shape with width >= height.
  BoxShape landscape() const noexcept { return width_ >= height_ ? *this : transposed(); }

  friend bool operator==(const BoxShape&, const BoxShape&) = default;

 private:
  struct Unchecked {};
  BoxShape(double width, double height, Unchecked) noexcept : width_(width), height_(height) {}

  double width_;
  double height_;
};

struct PlacedBox {
  double cx = 0.0;
  double cy = 0.0;
  BoxShape shape;

  double left() const noexcept { return cx - 0.5 * shape.width(); }
  double right() const noexcept { return cx + 0.5 * shape.width(); }
  double top() const noexcept { return cy - 0.5 * shape.height(); }
  double bottom() const noexcept { return cy + 0.5 * shape.height(); }
  double area() const noexcept { return shape.area(); }
};

/// Anchor profile for a scale and aspect ratio: (size*sqrt(ar), size/sqrt(ar)).
BoxShape anchor_dims(double size, double ar);

double intersection_area(const PlacedBox& a, const PlacedBox& b) noexcept;

/// General IoU of two placed boxes; 0 when disjoint.
double iou(const PlacedBox& a, const PlacedBox& b) noexcept;

/// IoU of two shapes sharing a center: I = min(w,W)*min(h,H), U = wh + WH - I.
double concentric_iou(const BoxShape& obj, const BoxShape& anchor) noexcept;

}  // namespace anchorfit
