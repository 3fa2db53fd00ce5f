#pragma once

// Output writers: manifests, CSV series, plot scripts.

#include <string>
#include <utility>
#include <vector>

#include "dwlab/trajectory.hpp"

namespace dwlab {

/// Ordered "key = value" record; readable back with Config::from_file.
class Manifest {
 public:
  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, double value);
  void add(const std::string& key, int value);
  void add(const std::string& key, bool value);
  std::string text() const;
  void write(const std::string& path) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return rows_; }

 private:
  std::vector<std::pair<std::string, std::string>> rows_;
};

/// %.17g, with "inf"/"nan" spelled out.
std::string format_real(double v);

/// Columns t, L1, L2, Linf, H1dot, energy, forcing, xnorm.
void write_norms_csv(const std::string& path, const std::vector<NormRecord>& records);

/// Python/matplotlib script drawing log-log norm curves from a norms CSV.
void write_decay_plot_script(const std::string& path, const std::string& csv_name);
/// Script drawing T_est against epsilon per nonlinearity from a sweep summary.
void write_sweep_plot_script(const std::string& path, const std::string& csv_name);
/// Script drawing I_R, Y(R) and the certificate's left side.
void write_certificate_plot_script(const std::string& path, const std::string& csv_name);

/// Creates the directory (and parents); throws on failure.
void ensure_dir(const std::string& path);

}  // namespace dwlab
