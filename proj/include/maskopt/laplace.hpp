#pragma once

#include "maskopt/image.hpp"

namespace maskopt {

// Five-point Laplacian with unit grid spacing. Off-grid neighbours are
// mirrored onto the centre pixel (u[-1] := u[0]), which is the discrete
// reflecting boundary and keeps the operator symmetric.
GrayImage laplacian_apply(const GrayImage& u);

// Number of in-grid 4-neighbours of pixel i; the diagonal of -A.
int neighbour_count(const Extent& e, std::size_t i);

// r = (1 - c) * A u - c * (u - f), pixelwise.
GrayImage inpainting_residual(const GrayImage& u, const GrayImage& f, const ProbMask& c);
GrayImage inpainting_residual(const GrayImage& u, const GrayImage& f, const BinaryMask& c);

// Mean of squared residual entries.
double residual_loss(const GrayImage& u, const GrayImage& f, const ProbMask& c);

}  // namespace maskopt
