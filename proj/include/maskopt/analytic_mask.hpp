#pragma once

#include "maskopt/image.hpp"

namespace maskopt {

// Per-pixel mask probability mass in [0,1] prior to dithering.
struct DitherField {
  Extent extent;
  std::vector<double> values;

  double mean() const;
};

/// Rescaled Laplacian magnitude with mean equal to `target_density`.
///
/// The scale s in clamp(s * |A f|, 0, 1) is found by 60 bisection steps.
/// A constant image yields the uniform field. When the Laplacian support
/// is too small to carry the target mass even fully saturated, the support
/// is set to 1 and the remaining mass spread uniformly over the rest.
/// Throws std::invalid_argument unless 0 < target_density <= 1.
DitherField belhachmi_field(const GrayImage& f, double target_density);

/// Classic raster-order Floyd-Steinberg error diffusion, threshold 0.5,
/// weights 7/16 right, 3/16 down-left, 5/16 down, 1/16 down-right. At the
/// border the weights of the targets inside the grid are rescaled to sum to
/// one, so no mass leaves the grid and the mask count stays within 0.5 of
/// the field sum.
BinaryMask floyd_steinberg(const DitherField& field);

/// belhachmi_field followed by floyd_steinberg. Never inpaints.
BinaryMask mask_belhachmi(const GrayImage& f, double target_density);

}  // namespace maskopt
