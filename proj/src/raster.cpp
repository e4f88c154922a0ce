#include "bmot/raster.hpp"

#include <cmath>
#include <fstream>

namespace bmot {

namespace {

void hsv_to_rgb(double h, double s, double v, std::uint8_t* out) {
  h = std::fmod(h, 360.0) / 60.0;
  int sector = static_cast<int>(h) % 6;
  double f = h - std::floor(h);
  double p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
  double r = 0, g = 0, b = 0;
  switch (sector) {
    case 0: r = v; g = t; b = p; break;
    case 1: r = q; g = v; b = p; break;
    case 2: r = p; g = v; b = t; break;
    case 3: r = p; g = q; b = v; break;
    case 4: r = t; g = p; b = v; break;
    default: r = v; g = p; b = q; break;
  }
  out[0] = static_cast<std::uint8_t>(std::lround(r * 255));
  out[1] = static_cast<std::uint8_t>(std::lround(g * 255));
  out[2] = static_cast<std::uint8_t>(std::lround(b * 255));
}

}  // namespace

RasterResult rasterize_partition(const GroundCost& cost,
                                 const std::vector<Point>& targets,
                                 const std::vector<double>& shift_values,
                                 const Density& density, int resolution,
                                 int threads) {
  if (resolution < 4 || resolution > 4096)
    throw ConfigError("raster resolution must be in [4, 4096]");
  const int dim = density.dim();
  const double side = density.side();
  const int R = resolution;
  RasterResult out;
  out.dim = dim;
  out.resolution = R;
  out.slices = dim == 3 ? std::min(R, 16) : 1;
  out.labels.assign(static_cast<std::size_t>(R) * R * out.slices, -1);

  const double step = side / R;
  parallel_for(static_cast<std::size_t>(R) * out.slices, threads,
               [&](std::size_t begin, std::size_t end) {
                 for (std::size_t job = begin; job < end; ++job) {
                   int slice = static_cast<int>(job) / R;
                   int row = static_cast<int>(job) % R;
                   Point x{};
                   if (dim == 3)
                     x[2] = (slice + 0.5) * side / out.slices;
                   x[1] = (R - 1 - row + 0.5) * step;  // row 0 at the top
                   for (int col = 0; col < R; ++col) {
                     x[0] = (col + 0.5) * step;
                     std::size_t at = job * R + col;
                     if (density.value(x.data()) > 0)
                       out.labels[at] = partition_label(cost, targets,
                                                        shift_values,
                                                        x.data(), dim);
                   }
                 }
               });

  // Region masses on a midpoint grid; coarser in 3D to keep the sample
  // count bounded.
  const int Rm = dim == 3 ? std::min(R, 64) : R;
  const double mass_step = side / Rm;
  std::uint64_t rows = 1;
  for (int a = 1; a < dim; ++a) rows *= Rm;
  std::vector<std::vector<double>> row_mass(
      rows, std::vector<double>(targets.size(), 0.0));
  double cell = 1.0;
  for (int a = 0; a < dim; ++a) cell *= mass_step;
  parallel_for(rows, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t job = begin; job < end; ++job) {
      Point x{};
      std::uint64_t rest = job;
      for (int a = dim - 1; a >= 1; --a) {
        x[a] = (static_cast<double>(rest % Rm) + 0.5) * mass_step;
        rest /= Rm;
      }
      for (int col = 0; col < Rm; ++col) {
        x[0] = (col + 0.5) * mass_step;
        double w = density.value(x.data());
        if (w <= 0) continue;
        std::int32_t lab =
            partition_label(cost, targets, shift_values, x.data(), dim);
        row_mass[job][lab] += w * cell;
      }
    }
  });
  out.masses.assign(targets.size(), 0.0);
  for (const auto& partial : row_mass)
    for (std::size_t i = 0; i < partial.size(); ++i)
      out.masses[i] += partial[i];
  return out;
}

PartitionImage render_partition(const RasterResult& raster, int n_targets) {
  (void)n_targets;
  PartitionImage img;
  img.width = raster.resolution;
  img.height = raster.resolution * raster.slices;
  img.rgb.assign(static_cast<std::size_t>(img.width) * img.height * 3, 0);
  // Fixed 32-color palette; labels wrap around.  The 137-degree hue stride
  // keeps consecutive labels far apart on the wheel.
  std::uint8_t palette[32 * 3];
  for (int i = 0; i < 32; ++i)
    hsv_to_rgb(std::fmod(137.0 * i, 360.0), 0.65, 0.95, &palette[3 * i]);
  for (std::size_t p = 0; p < raster.labels.size(); ++p) {
    std::int32_t lab = raster.labels[p];
    if (lab < 0) continue;
    int c = lab % 32;
    img.rgb[3 * p] = palette[3 * c];
    img.rgb[3 * p + 1] = palette[3 * c + 1];
    img.rgb[3 * p + 2] = palette[3 * c + 2];
  }
  return img;
}

void write_ppm(const std::string& path, const PartitionImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.rgb.data()),
            static_cast<std::streamsize>(image.rgb.size()));
  if (!out) throw IoError("failed while writing: " + path);
}

}  // namespace bmot
