#include "dwlab/data.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dwlab {

std::string to_string(DataShape s) { return s == DataShape::Gaussian ? "gaussian" : "dgaussian"; }

std::string to_string(DataSlot s) {
  switch (s) {
    case DataSlot::Phi: return "phi";
    case DataSlot::Psi: return "psi";
    case DataSlot::Both: return "both";
  }
  return "?";
}

DataShape parse_data_shape(const std::string& s) {
  if (s == "gaussian") return DataShape::Gaussian;
  if (s == "dgaussian") return DataShape::DGaussian;
  throw std::invalid_argument("unknown data shape '" + s + "'");
}

DataSlot parse_data_slot(const std::string& s) {
  if (s == "phi") return DataSlot::Phi;
  if (s == "psi") return DataSlot::Psi;
  if (s == "both") return DataSlot::Both;
  throw std::invalid_argument("unknown data slot '" + s + "'");
}

double mass(const GridField& f) {
  return std::accumulate(f.values().begin(), f.values().end(), 0.0) * f.spec().cell_volume();
}

double data_norm(const WaveState& s) {
  const int n = s.spec().dim;
  const int k = n / 2;
  return lp_norm(s.u, LpNorm::L1) + sobolev_norm(s.u, 1 + k) + lp_norm(s.v, LpNorm::L1) +
         sobolev_norm(s.v, k);
}

WaveState make_data(const GridSpec& grid, const DataSpec& d) {
  if (!(d.width > 0.0)) throw std::invalid_argument("data width must be positive");
  GridField zero(grid);
  if (d.amplitude <= 0.0) return WaveState(0.0, zero, zero);
  const double c = d.center, w = d.width;
  auto shape = GridField::from_function(grid, [&](double x1, double x2) {
    const double r2 = (x1 - c) * (x1 - c) + (grid.dim == 2 ? (x2 - c) * (x2 - c) : 0.0);
    const double g = std::exp(-r2 / (w * w));
    return d.shape == DataShape::Gaussian ? g : -2.0 * (x1 - c) / (w * w) * g;
  });
  WaveState s(0.0, d.slot == DataSlot::Psi ? zero : shape,
              d.slot == DataSlot::Phi ? zero : shape);
  const double scale = d.amplitude / data_norm(s);
  s.u *= scale;
  s.v *= scale;
  return s;
}

double support_radius(const GridSpec& grid, const DataSpec& d) {
  const double reach = d.width * std::sqrt(std::log(1e16)) + (d.shape == DataShape::DGaussian ? d.width : 0.0);
  return reach + std::abs(d.center) * (grid.dim == 2 ? std::sqrt(2.0) : 1.0);
}

void require_no_wrap(const GridSpec& grid, const DataSpec& d, double t_max) {
  const double need = support_radius(grid, d) + t_max + 2.0;
  if (grid.half_length < need)
    throw std::invalid_argument("torus half-length " + std::to_string(grid.half_length) +
                                " is below R_data + t_max + 2 = " + std::to_string(need));
}

}  // namespace dwlab
