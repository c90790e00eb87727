#include "sidl/pgm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace sidl {

void write_pgm(const std::string& path, const Tensor& image) {
  if (image.shape().size() != 3 || image.shape()[0] != 1)
    throw std::invalid_argument("write_pgm: expects {1,H,W} image");
  int H = static_cast<int>(image.shape()[1]);
  int W = static_cast<int>(image.shape()[2]);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("write_pgm: cannot open " + path);
  f << "P5\n" << W << " " << H << "\n255\n";
  for (double v : image.values()) {
    double u = std::clamp((v + 1.0) * 0.5, 0.0, 1.0);
    f.put(static_cast<char>(std::lround(u * 255.0)));
  }
  if (!f) throw std::runtime_error("write_pgm: write failed " + path);
}

void write_mask_pgm(const std::string& path,
                    const std::vector<std::uint8_t>& mask, int width,
                    int height) {
  if (mask.size() != static_cast<std::size_t>(width) * height)
    throw std::invalid_argument("write_mask_pgm: size mismatch");
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("write_mask_pgm: cannot open " + path);
  f << "P5\n" << width << " " << height << "\n255\n";
  for (auto m : mask) f.put(m ? static_cast<char>(255) : 0);
  if (!f) throw std::runtime_error("write_mask_pgm: write failed " + path);
}

Tensor read_pgm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("read_pgm: cannot open " + path);
  std::string magic;
  f >> magic;
  if (magic != "P5") throw std::runtime_error("read_pgm: not a P5 file");
  int w = 0, h = 0, maxval = 0;
  f >> w >> h >> maxval;
  if (w <= 0 || h <= 0 || maxval != 255)
    throw std::runtime_error("read_pgm: unsupported header");
  f.get();  // single whitespace after header
  std::vector<double> data(static_cast<std::size_t>(w) * h);
  for (auto& v : data) {
    int c = f.get();
    if (c == EOF) throw std::runtime_error("read_pgm: truncated file");
    v = static_cast<double>(c) / 255.0 * 2.0 - 1.0;
  }
  return Tensor::from({1, static_cast<std::size_t>(h), static_cast<std::size_t>(w)},
                      std::move(data));
}

}  // namespace sidl
