#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <numbers>

#include <fftw3.h>
#include <json.hpp>

#include "umlab/errors.hpp"
#include "umlab/multiplier.hpp"

namespace umlab {

namespace {

constexpr char kMagic[4] = {'U', 'M', 'L', 'G'};
constexpr std::uint32_t kGridVersion = 1;

std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

void validate(const GridField& g) {
  if (g.counts.empty() || g.counts.size() > 3 || g.extents.size() != g.counts.size())
    throw InvalidArgument("grid must have 1 to 3 axes with matching extents and counts");
  for (std::size_t k = 0; k < g.counts.size(); ++k) {
    const int n = g.counts[k];
    if (n < 2 || !std::has_single_bit(static_cast<unsigned>(n)))
      throw InvalidArgument("grid counts must be powers of two >= 2");
    if (!(g.extents[k] > 0.0)) throw InvalidArgument("grid extents must be positive");
  }
  if (!g.samples.empty() && g.samples.size() != g.size()) throw InvalidArgument("grid sample count mismatch");
}

// Multi-index of a row-major flat index (last axis fastest).
template <class F>
void for_each_index(const std::vector<int>& counts, F&& f) {
  const int d = static_cast<int>(counts.size());
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  for (std::size_t flat = 0;; ++flat) {
    f(flat, idx);
    int k = d - 1;
    while (k >= 0 && ++idx[static_cast<std::size_t>(k)] == counts[static_cast<std::size_t>(k)])
      idx[static_cast<std::size_t>(k--)] = 0;
    if (k < 0) return;
  }
}

// f(x_k) = sum_j exp(i xi_j x_k) a_j dxi^d on centered grids with
// dxi dx = 2 pi / N, via one unnormalized backward DFT and checkerboard signs.
GridField inverse_transform(const GridField& freq, std::vector<Complex> data) {
  const int d = freq.dims();
  GridField out;
  out.counts = freq.counts;
  for (int k = 0; k < d; ++k)
    out.extents.push_back(2.0 * std::numbers::pi * freq.counts[static_cast<std::size_t>(k)] /
                          freq.extents[static_cast<std::size_t>(k)]);

  auto parity = [&](const std::vector<int>& idx) {
    int s = 0;
    for (int v : idx) s += v;
    return s & 1;
  };
  for_each_index(freq.counts, [&](std::size_t flat, const std::vector<int>& idx) {
    if (parity(idx)) data[flat] = -data[flat];
  });

  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft(d, freq.counts.data(), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  if (!plan) throw Error(ErrorCode::InvalidArgument, "FFT planning failed");
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }

  double scale = freq.cell_volume();
  int global = 0;
  for (int n : freq.counts) global += n / 2;
  if (global & 1) scale = -scale;
  for_each_index(freq.counts, [&](std::size_t flat, const std::vector<int>& idx) {
    data[flat] *= parity(idx) ? -scale : scale;
  });
  out.samples = std::move(data);
  return out;
}

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& os, double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(u >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw IoError("grid file truncated");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw IoError("grid file truncated");
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &u, 8);
  return v;
}

}  // namespace

GridField::GridField(std::vector<double> ext, std::vector<int> cnt)
    : extents(std::move(ext)), counts(std::move(cnt)) {
  validate(*this);
  samples.assign(size(), Complex{});
}

std::size_t GridField::size() const {
  std::size_t n = 1;
  for (int c : counts) n *= static_cast<std::size_t>(c);
  return n;
}

double GridField::cell_volume() const {
  double v = 1.0;
  for (int k = 0; k < dims(); ++k) v *= spacing(k);
  return v;
}

Vec GridField::coordinate(std::size_t flat) const {
  const int d = dims();
  Vec x(d);
  for (int k = d - 1; k >= 0; --k) {
    const auto n = static_cast<std::size_t>(counts[static_cast<std::size_t>(k)]);
    const auto j = static_cast<double>(flat % n);
    flat /= n;
    x(k) = (j - 0.5 * static_cast<double>(n)) * spacing(k);
  }
  return x;
}

GridField sample_frequency(const BumpAmplitude& bump, std::vector<double> extents, std::vector<int> counts) {
  GridField g(std::move(extents), std::move(counts));
  if (g.dims() != bump.dimension()) throw InvalidArgument("grid and bump dimensions differ");
  for (int k = 0; k < g.dims(); ++k) {
    const double half = 0.5 * g.extents[static_cast<std::size_t>(k)];
    if (std::abs(bump.center()(k)) + bump.eps() > half - g.spacing(k))
      throw InvalidArgument("frequency grid does not cover the bump support");
  }
  for (std::size_t i = 0; i < g.size(); ++i) g.samples[i] = bump(g.coordinate(i));
  return g;
}

GridField apply_grid(const Symbol& sym, const GridField& f_hat, double t) {
  validate(f_hat);
  if (f_hat.samples.size() != f_hat.size()) throw InvalidArgument("grid has no samples");
  if (f_hat.dims() != sym.dimension()) throw InvalidArgument("grid and symbol dimensions differ");
  if (!std::isfinite(t)) throw InvalidArgument("t must be finite");
  std::vector<Complex> data = f_hat.samples;
  if (t != 0.0) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      const Vec xi = f_hat.coordinate(i);
      if (xi.squaredNorm() == 0.0) continue;
      data[i] *= std::polar(1.0, t * sym.eval(xi));
    }
  }
  return inverse_transform(f_hat, std::move(data));
}

double discrete_l2(const GridField& field) { return discrete_lp(field, 2.0); }

double discrete_lp(const GridField& field, double p) {
  if (!(p >= 1.0)) throw DomainError("p must be at least 1");
  double s = 0.0;
  for (const Complex& z : field.samples) s += std::pow(std::abs(z), p);
  return std::pow(s * field.cell_volume(), 1.0 / p);
}

Complex interpolate(const GridField& field, const Vec& y) {
  const int d = field.dims();
  if (y.size() != d) throw InvalidArgument("interpolation point dimension mismatch");
  std::vector<int> base(static_cast<std::size_t>(d));
  std::vector<std::array<double, 4>> w(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    const int n = field.counts[static_cast<std::size_t>(k)];
    const double s = y(k) / field.spacing(k) + 0.5 * n;
    const int i0 = static_cast<int>(std::floor(s));
    if (i0 - 1 < 0 || i0 + 2 > n - 1) throw DomainError("interpolation point outside the grid interior");
    const double f = s - i0;
    base[static_cast<std::size_t>(k)] = i0 - 1;
    w[static_cast<std::size_t>(k)] = {-f * (f - 1.0) * (f - 2.0) / 6.0, (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0,
                                      -(f + 1.0) * f * (f - 2.0) / 2.0, (f + 1.0) * f * (f - 1.0) / 6.0};
  }
  Complex sum = 0.0;
  const std::vector<int> four(static_cast<std::size_t>(d), 4);
  for_each_index(four, [&](std::size_t, const std::vector<int>& idx) {
    double weight = 1.0;
    std::size_t flat = 0;
    for (int k = 0; k < d; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      weight *= w[ku][static_cast<std::size_t>(idx[ku])];
      flat = flat * static_cast<std::size_t>(field.counts[ku]) + static_cast<std::size_t>(base[ku] + idx[ku]);
    }
    sum += weight * field.samples[flat];
  });
  return sum;
}

void write_grid(const GridField& field, const std::string& path) {
  validate(field);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path);
  os.write(kMagic, 4);
  put_u32(os, kGridVersion);
  put_u32(os, static_cast<std::uint32_t>(field.dims()));
  for (double e : field.extents) put_f64(os, e);
  for (int c : field.counts) put_u32(os, static_cast<std::uint32_t>(c));
  for (const Complex& z : field.samples) {
    put_f64(os, z.real());
    put_f64(os, z.imag());
  }
  if (!os) throw IoError("write failed: " + path);
}

GridField read_grid(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw IoError("not a grid file: " + path);
  if (get_u32(is) != kGridVersion) throw IoError("unsupported grid file version");
  const std::uint32_t d = get_u32(is);
  if (d < 1 || d > 3) throw IoError("grid file has bad dimension");
  GridField g;
  for (std::uint32_t k = 0; k < d; ++k) g.extents.push_back(get_f64(is));
  for (std::uint32_t k = 0; k < d; ++k) g.counts.push_back(static_cast<int>(get_u32(is)));
  validate(g);
  g.samples.resize(g.size());
  for (auto& z : g.samples) {
    const double re = get_f64(is);
    z = Complex(re, get_f64(is));
  }
  return g;
}

std::string grid_sidecar_json(const GridField& field, const std::string& data_file) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["data_file"] = data_file;
  j["dims"] = field.dims();
  j["extents"] = field.extents;
  j["counts"] = field.counts;
  j["cell_volume"] = field.cell_volume();
  j["layout"] = "row-major, last axis fastest; coordinate (j - N/2) * extent / N";
  j["encoding"] = "magic UMLG, u32 version, u32 dims, f64 extents, u32 counts, complex128 samples; little endian";
  return j.dump(2);
}

double bump_lp_norm(const BumpAmplitude& bump, double p, int points) {
  const int d = bump.dimension();
  if (d < 1 || d > 3) throw InvalidArgument("bump norm supports 1 <= d <= 3");
  if (points == 0) points = d == 1 ? 4096 : d == 2 ? 1024 : 128;
  std::vector<double> extents;
  for (int k = 0; k < d; ++k) extents.push_back(4.0 * (bump.center().cwiseAbs().maxCoeff() + bump.eps()));
  const GridField f_hat = sample_frequency(bump, extents, std::vector<int>(static_cast<std::size_t>(d), points));
  return discrete_lp(inverse_transform(f_hat, f_hat.samples), p);
}

}  // namespace umlab
