#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sidl/tensor.hpp"

namespace sidl {

// Binary PGM (P5, maxval 255). Image values rescaled from [-1,1].
void write_pgm(const std::string& path, const Tensor& image);
// Masks written with values {0, 255}.
void write_mask_pgm(const std::string& path,
                    const std::vector<std::uint8_t>& mask, int width,
                    int height);
// Reads a P5 PGM back into a {1,H,W} tensor with values in [-1,1].
Tensor read_pgm(const std::string& path);

}  // namespace sidl
