// Python bindings for the main operations: solve, partition raster, shift
// extraction, and the exact references used in notebooks.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bmot/config.hpp"
#include "bmot/driver.hpp"
#include "bmot/oracle.hpp"
#include "bmot/raster.hpp"
#include "bmot/summary.hpp"
#include "bmot/wasserstein.hpp"

namespace py = pybind11;

namespace {

bmot::RunConfig config_from_text(const std::string& text) {
  return bmot::parse_config_text(text);
}

}  // namespace

PYBIND11_MODULE(bmot, m) {
  m.doc() = "semi-discrete optimal transport via the boundary method";
  m.attr("__version__") = "1.0.0";

  py::register_exception<bmot::ConfigError>(m, "BmotConfigError",
                                            PyExc_ValueError);
  py::register_exception<bmot::NumericalError>(m, "BmotNumericalError",
                                               PyExc_RuntimeError);
  py::register_exception<bmot::IoError>(m, "BmotIoError", PyExc_OSError);

  m.def(
      "solve_json",
      [](const std::string& config_text) {
        bmot::RunConfig cfg = config_from_text(config_text);
        bmot::RunResult result = bmot::run_boundary_method(cfg);
        return bmot::summary_to_json_text(cfg, result);
      },
      py::arg("config_text"),
      "Run the boundary method on a JSON config and return the summary as "
      "JSON text.");

  m.def(
      "wasserstein",
      [](const std::string& config_text) {
        bmot::RunConfig cfg = config_from_text(config_text);
        bmot::RunResult result = bmot::run_boundary_method(cfg);
        return py::make_tuple(result.wasserstein.value,
                              result.wasserstein.error_bound,
                              result.wasserstein.available);
      },
      py::arg("config_text"),
      "Return (value, certified_error_bound, available) for a config.");

  m.def(
      "shift_vector",
      [](const std::string& config_text) {
        bmot::RunConfig cfg = config_from_text(config_text);
        bmot::RunResult result = bmot::run_boundary_method(cfg);
        return result.shifts.value;
      },
      py::arg("config_text"), "Return the shift vector (anchor at zero).");

  m.def(
      "partition_labels",
      [](const std::string& config_text, int resolution) {
        bmot::RunConfig cfg = config_from_text(config_text);
        bmot::RunResult result = bmot::run_boundary_method(cfg);
        bmot::RasterResult raster = bmot::rasterize_partition(
            cfg.cost, cfg.targets, result.shifts.value, cfg.density,
            resolution, bmot::resolve_threads(cfg.threads));
        return py::make_tuple(raster.labels, raster.masses, raster.slices);
      },
      py::arg("config_text"), py::arg("resolution") = 64,
      "Rasterize the reconstructed partition; returns (labels, masses, "
      "slices).");

  m.def("exact_reference", [](const std::string& name) -> py::object {
    auto v = bmot::exact_reference_value(name);
    if (!v) return py::none();
    return py::float_(*v);
  });
}
