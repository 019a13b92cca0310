#include "maskopt/laplace.hpp"

namespace maskopt {

int neighbour_count(const Extent& e, std::size_t i) {
  const std::size_t x = i % e.width;
  const std::size_t y = i / e.width;
  return (x > 0) + (x + 1 < e.width) + (y > 0) + (y + 1 < e.height);
}

GrayImage laplacian_apply(const GrayImage& u) {
  const std::size_t w = u.width();
  const std::size_t h = u.height();
  GrayImage out(w, h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double c = u.at(x, y);
      const double left = x > 0 ? u.at(x - 1, y) : c;
      const double right = x + 1 < w ? u.at(x + 1, y) : c;
      const double up = y > 0 ? u.at(x, y - 1) : c;
      const double down = y + 1 < h ? u.at(x, y + 1) : c;
      out.at(x, y) = left + right + up + down - 4.0 * c;
    }
  }
  return out;
}

GrayImage inpainting_residual(const GrayImage& u, const GrayImage& f, const ProbMask& c) {
  require_same_extent(u.extent(), f.extent(), "inpainting_residual (u, f)");
  require_same_extent(u.extent(), c.extent(), "inpainting_residual (u, c)");
  GrayImage r = laplacian_apply(u);
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] = (1.0 - c[i]) * r[i] - c[i] * (u[i] - f[i]);
  }
  return r;
}

GrayImage inpainting_residual(const GrayImage& u, const GrayImage& f, const BinaryMask& c) {
  return inpainting_residual(u, f, ProbMask::from_binary(c));
}

double residual_loss(const GrayImage& u, const GrayImage& f, const ProbMask& c) {
  const GrayImage r = inpainting_residual(u, f, c);
  double sum = 0.0;
  for (double v : r.values()) sum += v * v;
  return r.size() == 0 ? 0.0 : sum / static_cast<double>(r.size());
}

}  // namespace maskopt
