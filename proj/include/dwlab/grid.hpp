#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dwlab {

using cplx = std::complex<double>;

/// Uniform periodic grid on the torus [-L, L)^n, N points per axis.
struct GridSpec {
  int dim = 1;
  double half_length = 1.0;
  int points = 64;

  GridSpec() = default;
  GridSpec(int n, double L, int N);

  double dx() const { return 2.0 * half_length / points; }
  double cell_volume() const { return dim == 1 ? dx() : dx() * dx(); }
  double volume() const { return dim == 1 ? 2.0 * half_length : 4.0 * half_length * half_length; }
  std::size_t size() const;
  /// Length of the half-complex (r2c) spectrum.
  std::size_t spectral_size() const;
  /// Physical coordinate of index i along an axis.
  double coord(int i) const { return -half_length + i * dx(); }
  /// Angular wavenumber of FFT index m along an axis.
  double wavenumber(int m) const;
  /// Wavenumber used for odd derivatives: the Nyquist mode maps to zero.
  double diff_wavenumber(int m) const;

  bool operator==(const GridSpec&) const = default;
};

/// Thrown when a field holds NaN or inf; carries the first offending index.
class NonFiniteError : public std::runtime_error {
 public:
  NonFiniteError(std::size_t index, const std::string& what)
      : std::runtime_error(what), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

/// Real samples on a GridSpec, row-major for n = 2 (index i*N + j, x_1 along i).
class GridField {
 public:
  GridField() = default;
  explicit GridField(const GridSpec& spec) : spec_(spec), values_(spec.size(), 0.0) {}
  GridField(const GridSpec& spec, std::vector<double> values);

  template <class F>
  static GridField from_function(const GridSpec& spec, F&& f) {
    GridField g(spec);
    const int N = spec.points;
    if (spec.dim == 1) {
      for (int i = 0; i < N; ++i) g.values_[i] = f(spec.coord(i), 0.0);
    } else {
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
          g.values_[static_cast<std::size_t>(i) * N + j] = f(spec.coord(i), spec.coord(j));
    }
    return g;
  }

  const GridSpec& spec() const { return spec_; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& data() { return values_; }
  const std::vector<double>& data() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  GridField& operator+=(const GridField& o);
  GridField& operator-=(const GridField& o);
  GridField& operator*=(double a);

 private:
  GridSpec spec_;
  std::vector<double> values_;
};

GridField operator+(GridField a, const GridField& b);
GridField operator-(GridField a, const GridField& b);
GridField operator*(double s, GridField a);

/// Cauchy data pair (u, u_t) at time t.
struct WaveState {
  double t = 0.0;
  GridField u;
  GridField v;

  WaveState() = default;
  WaveState(double time, GridField u_, GridField v_);
  const GridSpec& spec() const { return u.spec(); }
};

enum class LpNorm { L1, L2, Linf };

/// Forward r2c transform (unnormalized) and c2r inverse (normalized).
std::vector<cplx> forward(const GridField& f);
GridField inverse(const GridSpec& spec, std::span<const cplx> spectrum);

/// Precomputed per-mode quantities of the half-complex spectrum.
struct SpectralTable {
  std::vector<double> xi2;           // |xi|^2
  std::vector<double> xi2_diff;      // |xi|^2 with Nyquist components zeroed
  std::vector<double> multiplicity;  // Hermitian weight (1 or 2)
  std::vector<double> diff_k[2];     // per-axis derivative wavenumbers
};
const SpectralTable& spectral_table(const GridSpec& spec);

/// Riemann sums with cell weight dx^n for p in {1, 2}; max-abs for inf.
double lp_norm(const GridField& f, LpNorm p);
/// (int |u|^q dx)  -- the q-th power of the L^q norm.
double lq_power(const GridField& f, double q);
std::vector<GridField> spectral_gradient(const GridField& f);
/// (sum_xi (1+|xi|^2)^k |u_hat|^2)^(1/2) with Parseval scaling, k in {0,1,2}.
double sobolev_norm(const GridField& f, int k);
/// ||grad u||_{L^2} from the spectrum (Nyquist mode not differentiated).
double hdot1_norm(const GridField& f);
/// L^2 norm evaluated in frequency space.
double l2_norm_spectral(const GridField& f);

struct GnReport {
  /// Ratio LHS/RHS without constant for the L^{1+2/n} bound.
  double ratio_lq = 0.0;
  /// Ratio LHS/RHS without constant for the L^{2+4/n} bound.
  double ratio_l2q = 0.0;
};
GnReport gn_check(const GridField& f);

/// Throws NonFiniteError when a value is not finite.
void require_finite(const GridField& f);

/// Flat little-endian float64 dump plus a text sidecar "<path>.hdr".
void write_field(const std::string& path, const GridField& f, double t);
GridField read_field(const std::string& path, double* t = nullptr);
/// CSV "x,value" of a 1-d field or of the x_2 = 0 row of a 2-d field.
void write_field_csv(const std::string& path, const GridField& f);

}  // namespace dwlab
