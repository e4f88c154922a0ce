#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bmot/measure.hpp"
#include "bmot/shifts.hpp"

namespace bmot {

// Pixelated view of the reconstructed partition.  In two dimensions this is
// one resolution x resolution frame; in three, up to 16 axis-2 slices are
// stacked vertically into a single frame.
struct RasterResult {
  int dim = 2;
  int resolution = 0;
  int slices = 1;                    // 1 in 2D
  std::vector<std::int32_t> labels;  // row-major per slice, -1 = no density
  std::vector<double> masses;        // measure captured per target region
};

RasterResult rasterize_partition(const GroundCost& cost,
                                 const std::vector<Point>& targets,
                                 const std::vector<double>& shift_values,
                                 const Density& density, int resolution,
                                 int threads);

struct PartitionImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // 3 bytes per pixel, row-major
};

// Colors each label from a fixed 32-entry palette (wrapping for larger n);
// -1 renders black.
PartitionImage render_partition(const RasterResult& raster, int n_targets);

// Binary PPM (P6) writer.
void write_ppm(const std::string& path, const PartitionImage& image);

}  // namespace bmot
