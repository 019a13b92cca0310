#pragma once

#include <filesystem>

#include "maskopt/image.hpp"

namespace maskopt {

// PGM (binary "P5", maxval 255 only):
//
//   "P5" <ws> width <ws> height <ws> maxval <single ws> payload
//
// where <ws> is any run of whitespace and '#' comments running to end of
// line. The payload holds width*height bytes in row-major order, top row
// first. Trailing bytes after the payload are ignored.
GrayImage load_image(const std::filesystem::path& path);

// Rounds half-up and clamps to [0,255] before writing.
void save_image(const GrayImage& img, const std::filesystem::path& path);

// Binary masks share the PGM format: 255 = known, 0 = unknown. Any other
// byte value is rejected.
BinaryMask load_mask(const std::filesystem::path& path);
void save_mask(const BinaryMask& mask, const std::filesystem::path& path);

// PFM greyscale:
//
//   "Pf" <ws> width <ws> height <ws> scale <single ws> payload
//
// scale must be -1.0 (little-endian float32). The payload is stored bottom
// row first, as in every other PFM reader and writer. Values outside [0,1]
// raise ValidationError with the first offending row-major index.
ProbMask load_prob_mask(const std::filesystem::path& path);
void save_prob_mask(const ProbMask& mask, const std::filesystem::path& path);

}  // namespace maskopt
