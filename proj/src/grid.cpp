#include "dwlab/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <tuple>

#include "dwlab/kernels.hpp"

namespace dwlab {

// ---------------------------------------------------------------------------
// GridSpec

GridSpec::GridSpec(int n, double L, int N) : dim(n), half_length(L), points(N) {
  if (n != 1 && n != 2) throw std::invalid_argument("grid dimension must be 1 or 2");
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("grid half-length must be positive");
  if (N < 16 || (N & (N - 1)) != 0)
    throw std::invalid_argument("points per axis must be a power of two >= 16");
}

std::size_t GridSpec::size() const {
  const auto N = static_cast<std::size_t>(points);
  return dim == 1 ? N : N * N;
}

std::size_t GridSpec::spectral_size() const {
  const auto N = static_cast<std::size_t>(points);
  return dim == 1 ? N / 2 + 1 : N * (N / 2 + 1);
}

double GridSpec::wavenumber(int m) const {
  const int mm = m <= points / 2 ? m : m - points;
  return M_PI * mm / half_length;
}

double GridSpec::diff_wavenumber(int m) const {
  return m == points / 2 ? 0.0 : wavenumber(m);
}

// ---------------------------------------------------------------------------
// GridField

GridField::GridField(const GridSpec& spec, std::vector<double> values)
    : spec_(spec), values_(std::move(values)) {
  if (values_.size() != spec_.size()) throw std::invalid_argument("field size does not match grid");
}

GridField& GridField::operator+=(const GridField& o) {
  if (!(spec_ == o.spec_)) throw std::invalid_argument("grid mismatch in field addition");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

GridField& GridField::operator-=(const GridField& o) {
  if (!(spec_ == o.spec_)) throw std::invalid_argument("grid mismatch in field subtraction");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

GridField& GridField::operator*=(double a) {
  for (auto& v : values_) v *= a;
  return *this;
}

GridField operator+(GridField a, const GridField& b) { return a += b; }
GridField operator-(GridField a, const GridField& b) { return a -= b; }
GridField operator*(double s, GridField a) { return a *= s; }

WaveState::WaveState(double time, GridField u_, GridField v_)
    : t(time), u(std::move(u_)), v(std::move(v_)) {
  if (!(u.spec() == v.spec())) throw std::invalid_argument("u and u_t must share a grid");
}

// ---------------------------------------------------------------------------
// FFT plans

namespace {

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

const PlanPair& plans_for(int dim, int N) {
  static std::map<std::pair<int, int>, PlanPair> cache;
  std::lock_guard lock(plan_mutex());
  auto key = std::make_pair(dim, N);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  const std::size_t real_n = dim == 1 ? N : static_cast<std::size_t>(N) * N;
  const std::size_t cplx_n = dim == 1 ? N / 2 + 1 : static_cast<std::size_t>(N) * (N / 2 + 1);
  std::vector<double> r(real_n);
  std::vector<cplx> c(cplx_n);
  auto* cp = reinterpret_cast<fftw_complex*>(c.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p;
  if (dim == 1) {
    p.fwd = fftw_plan_dft_r2c_1d(N, r.data(), cp, flags);
    p.bwd = fftw_plan_dft_c2r_1d(N, cp, r.data(), flags);
  } else {
    p.fwd = fftw_plan_dft_r2c_2d(N, N, r.data(), cp, flags);
    p.bwd = fftw_plan_dft_c2r_2d(N, N, cp, r.data(), flags);
  }
  return cache.emplace(key, p).first->second;
}

}  // namespace

std::vector<cplx> forward(const GridField& f) {
  const auto& spec = f.spec();
  const auto& p = plans_for(spec.dim, spec.points);
  std::vector<double> in(f.values().begin(), f.values().end());
  std::vector<cplx> out(spec.spectral_size());
  fftw_execute_dft_r2c(p.fwd, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

GridField inverse(const GridSpec& spec, std::span<const cplx> spectrum) {
  if (spectrum.size() != spec.spectral_size()) throw std::invalid_argument("spectrum size mismatch");
  const auto& p = plans_for(spec.dim, spec.points);
  std::vector<cplx> scratch(spectrum.begin(), spectrum.end());  // c2r clobbers its input
  std::vector<double> out(spec.size());
  fftw_execute_dft_c2r(p.bwd, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
  const double scale = 1.0 / static_cast<double>(spec.size());
  for (auto& v : out) v *= scale;
  return GridField(spec, std::move(out));
}

const SpectralTable& spectral_table(const GridSpec& spec) {
  static std::map<std::tuple<int, double, int>, std::unique_ptr<SpectralTable>> cache;
  static std::mutex m;
  std::lock_guard lock(m);
  auto key = std::make_tuple(spec.dim, spec.half_length, spec.points);
  if (auto it = cache.find(key); it != cache.end()) return *it->second;
  auto t = std::make_unique<SpectralTable>();
  const int N = spec.points;
  const int half = N / 2 + 1;
  const std::size_t M = spec.spectral_size();
  t->xi2.resize(M);
  t->xi2_diff.resize(M);
  t->multiplicity.resize(M);
  t->diff_k[0].resize(M);
  if (spec.dim == 2) t->diff_k[1].resize(M);
  if (spec.dim == 1) {
    for (int m = 0; m < half; ++m) {
      const double k = spec.wavenumber(m), kd = spec.diff_wavenumber(m);
      t->xi2[m] = k * k;
      t->xi2_diff[m] = kd * kd;
      t->multiplicity[m] = (m == 0 || m == N / 2) ? 1.0 : 2.0;
      t->diff_k[0][m] = kd;
    }
  } else {
    for (int i = 0; i < N; ++i) {
      const double k1 = spec.wavenumber(i), kd1 = spec.diff_wavenumber(i);
      for (int j = 0; j < half; ++j) {
        const std::size_t idx = static_cast<std::size_t>(i) * half + j;
        const double k2 = spec.wavenumber(j), kd2 = spec.diff_wavenumber(j);
        t->xi2[idx] = k1 * k1 + k2 * k2;
        t->xi2_diff[idx] = kd1 * kd1 + kd2 * kd2;
        t->multiplicity[idx] = (j == 0 || j == N / 2) ? 1.0 : 2.0;
        t->diff_k[0][idx] = kd1;
        t->diff_k[1][idx] = kd2;
      }
    }
  }
  return *cache.emplace(key, std::move(t)).first->second;
}

// ---------------------------------------------------------------------------
// Norms

void require_finite(const GridField& f) {
  if (auto idx = kernels::first_nonfinite(f.values()))
    throw NonFiniteError(*idx, "non-finite field value at index " + std::to_string(*idx));
}

double lp_norm(const GridField& f, LpNorm p) {
  require_finite(f);
  switch (p) {
    case LpNorm::L1: return kernels::sum_abs(f.values()) * f.spec().cell_volume();
    case LpNorm::L2: return std::sqrt(kernels::sum_sq(f.values()) * f.spec().cell_volume());
    case LpNorm::Linf: return kernels::max_abs(f.values());
  }
  return 0.0;
}

double lq_power(const GridField& f, double q) {
  require_finite(f);
  return kernels::sum_pow(f.values(), q) * f.spec().cell_volume();
}

std::vector<GridField> spectral_gradient(const GridField& f) {
  const auto& spec = f.spec();
  const auto& tab = spectral_table(spec);
  const auto hat = forward(f);
  std::vector<GridField> out;
  std::vector<cplx> d(hat.size());
  for (int a = 0; a < spec.dim; ++a) {
    for (std::size_t m = 0; m < hat.size(); ++m) d[m] = cplx(0.0, tab.diff_k[a][m]) * hat[m];
    out.push_back(inverse(spec, d));
  }
  return out;
}

namespace {

// Parseval factor: int |u|^2 dx = dx^n / N^n * sum_half mult |u_hat|^2.
double parseval_scale(const GridSpec& spec) {
  return spec.cell_volume() / static_cast<double>(spec.size());
}

}  // namespace

double l2_norm_spectral(const GridField& f) {
  require_finite(f);
  const auto& tab = spectral_table(f.spec());
  const auto hat = forward(f);
  return std::sqrt(kernels::weighted_energy(hat, tab.multiplicity) * parseval_scale(f.spec()));
}

double sobolev_norm(const GridField& f, int k) {
  if (k < 0 || k > 2) throw std::invalid_argument("sobolev order must be 0, 1 or 2");
  require_finite(f);
  const auto& tab = spectral_table(f.spec());
  const auto hat = forward(f);
  std::vector<double> w(hat.size());
  for (std::size_t m = 0; m < w.size(); ++m)
    w[m] = tab.multiplicity[m] * std::pow(1.0 + tab.xi2_diff[m], k);
  return std::sqrt(kernels::weighted_energy(hat, w) * parseval_scale(f.spec()));
}

double hdot1_norm(const GridField& f) {
  require_finite(f);
  const auto& tab = spectral_table(f.spec());
  const auto hat = forward(f);
  std::vector<double> w(hat.size());
  for (std::size_t m = 0; m < w.size(); ++m) w[m] = tab.multiplicity[m] * tab.xi2_diff[m];
  return std::sqrt(kernels::weighted_energy(hat, w) * parseval_scale(f.spec()));
}

GnReport gn_check(const GridField& f) {
  const double l2 = lp_norm(f, LpNorm::L2);
  if (l2 == 0.0) throw std::invalid_argument("Gagliardo-Nirenberg check needs a nonzero field");
  const int n = f.spec().dim;
  const double q = 1.0 + 2.0 / n;
  const double grad = hdot1_norm(f);
  GnReport r;
  const double lhs_q = lq_power(f, q);
  const double rhs_q = std::pow(grad, 1.0 - n / 2.0) * std::pow(l2, 2.0 / n + n / 2.0);
  r.ratio_lq = lhs_q / rhs_q;
  const double lhs_2q = std::sqrt(lq_power(f, 2.0 * q));
  const double rhs_2q = grad * std::pow(l2, 2.0 / n);
  r.ratio_l2q = lhs_2q / rhs_2q;
  return r;
}

// ---------------------------------------------------------------------------
// I/O

void write_field(const std::string& path, const GridField& f, double t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write field file '" + path + "'");
  for (double v : f.values()) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    char bytes[8];
    std::memcpy(bytes, &bits, 8);
    out.write(bytes, 8);
  }
  std::ofstream hdr(path + ".hdr");
  if (!hdr) throw std::runtime_error("cannot write field header '" + path + ".hdr'");
  hdr << std::setprecision(17) << "n = " << f.spec().dim << "\nN = " << f.spec().points
      << "\nL = " << f.spec().half_length << "\nt = " << t << "\n";
}

GridField read_field(const std::string& path, double* t) {
  std::ifstream hdr(path + ".hdr");
  if (!hdr) throw std::runtime_error("missing field header '" + path + ".hdr'");
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(hdr, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto key = line.substr(0, eq), val = line.substr(eq + 1);
    key.erase(std::remove_if(key.begin(), key.end(), ::isspace), key.end());
    kv[key] = val;
  }
  for (const char* k : {"n", "N", "L", "t"})
    if (!kv.count(k)) throw std::runtime_error(std::string("field header lacks key ") + k);
  GridSpec spec(std::stoi(kv["n"]), std::stod(kv["L"]), std::stoi(kv["N"]));
  if (t) *t = std::stod(kv["t"]);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("missing field file '" + path + "'");
  std::vector<double> values(spec.size());
  for (auto& v : values) {
    char bytes[8];
    if (!in.read(bytes, 8)) throw std::runtime_error("truncated field file '" + path + "'");
    std::uint64_t bits;
    std::memcpy(&bits, bytes, 8);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    v = std::bit_cast<double>(bits);
  }
  return GridField(spec, std::move(values));
}

void write_field_csv(const std::string& path, const GridField& f) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  const auto& spec = f.spec();
  const int N = spec.points;
  out << "x,value\n" << std::setprecision(17);
  for (int i = 0; i < N; ++i) {
    const double v = spec.dim == 1 ? f[i] : f[static_cast<std::size_t>(i) * N + N / 2];
    out << spec.coord(i) << "," << v << "\n";
  }
}

}  // namespace dwlab
