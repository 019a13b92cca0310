#pragma once

#include <string>

#include "maskopt/image.hpp"

namespace maskopt {

// Mean squared error over all pixels. Throws DimensionError on mismatch.
double mse(const GrayImage& a, const GrayImage& b);

// Peak signal-to-noise ratio in dB with peak 255. Identical images give
// +infinity.
double psnr(const GrayImage& a, const GrayImage& b);
double psnr_from_mse(double mse_value);

// Fraction of set pixels.
double density(const BinaryMask& mask);

// "inf" for the identical-image sentinel, fixed-point otherwise.
std::string format_psnr(double db, int decimals = 6);

}  // namespace maskopt
