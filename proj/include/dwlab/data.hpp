#pragma once

// Initial data shapes and amplitude normalization.

#include <string>

#include "dwlab/grid.hpp"

namespace dwlab {

enum class DataShape { Gaussian, DGaussian };
/// Which Cauchy component carries the bump.
enum class DataSlot { Phi, Psi, Both };

std::string to_string(DataShape s);
std::string to_string(DataSlot s);
DataShape parse_data_shape(const std::string& s);
DataSlot parse_data_slot(const std::string& s);

struct DataSpec {
  DataShape shape = DataShape::Gaussian;
  DataSlot slot = DataSlot::Psi;
  /// Target value of the data norm below; <= 0 means zero data.
  double amplitude = 1e-2;
  double center = 0.0;  // along every axis
  double width = 1.0;
};

/// ||phi||_{L^1} + ||phi||_{H^{1+[n/2]}} + ||psi||_{L^1} + ||psi||_{H^{[n/2]}}.
double data_norm(const WaveState& s);

/// Samples the shape and rescales it so data_norm equals the amplitude.
/// Gaussian: exp(-|x-c|^2/w^2); DGaussian: its x_1-derivative (zero mean).
WaveState make_data(const GridSpec& grid, const DataSpec& d);

/// Radius beyond which the shape is below 1e-16 of its peak, plus |center|.
double support_radius(const GridSpec& grid, const DataSpec& d);

/// Throws std::invalid_argument unless L >= R_data + t_max + 2.
void require_no_wrap(const GridSpec& grid, const DataSpec& d, double t_max);

/// Integral of u over the grid (Riemann sum).
double mass(const GridField& f);

}  // namespace dwlab
