#include "exsim/wavepacket.hpp"

#include <cmath>

#include "exsim/units.hpp"

namespace exsim {

namespace {

using cplx = std::complex<double>;
constexpr cplx I{0.0, 1.0};

void require_normalizable(ExcitonState& s, const char* what) {
  const double n = s.amp.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw WavepacketError(std::string(what) + " has no amplitude on occupied sites");
  }
  s.amp /= n;
}

}  // namespace

ExcitonState make_gaussian(std::shared_ptr<const DisorderRealization> real,
                           std::array<double, 2> center_cells,
                           std::array<double, 2> sigma_m,
                           std::array<double, 2> k0) {
  if (!real) throw WavepacketError("make_gaussian needs a realization");
  const LatticeSpec& spec = real->spec;
  for (int ax = 0; ax < spec.dims; ++ax) {
    if (!(sigma_m[ax] > 0.0)) throw WavepacketError("gaussian width must be positive");
  }
  ExcitonState s;
  s.realization = real;
  const auto cells = real->occupied_cells();
  s.amp.resize(static_cast<int>(cells.size()));
  const double a = spec.spacing;
  for (size_t b = 0; b < cells.size(); ++b) {
    const auto c = spec.coords(cells[b]);
    double arg2 = 0.0, phase = 0.0;
    for (int ax = 0; ax < spec.dims; ++ax) {
      const double d = (c[ax] - center_cells[ax]) * a;
      arg2 += d * d / (2.0 * sigma_m[ax] * sigma_m[ax]);
      phase += k0[ax] * c[ax] * a;
    }
    s.amp[static_cast<int>(b)] = std::exp(-arg2) * std::exp(I * phase);
  }
  require_normalizable(s, "gaussian packet");
  return s;
}

ExcitonState make_eigenstate(std::shared_ptr<const DisorderRealization> real,
                             std::array<double, 2> k) {
  if (!real) throw WavepacketError("make_eigenstate needs a realization");
  const LatticeSpec& spec = real->spec;
  ExcitonState s;
  s.realization = real;
  const auto cells = real->occupied_cells();
  if (cells.empty()) throw WavepacketError("realization has no occupied sites");
  s.amp.resize(static_cast<int>(cells.size()));
  const double a = spec.spacing;
  const double inv = 1.0 / std::sqrt(static_cast<double>(cells.size()));
  for (size_t b = 0; b < cells.size(); ++b) {
    const auto c = spec.coords(cells[b]);
    double phase = 0.0;
    for (int ax = 0; ax < spec.dims; ++ax) phase += k[ax] * c[ax] * a;
    s.amp[static_cast<int>(b)] = inv * std::exp(I * phase);
  }
  return s;
}

ExcitonState make_single_site(std::shared_ptr<const DisorderRealization> real,
                              std::array<int, 2> cell) {
  if (!real) throw WavepacketError("make_single_site needs a realization");
  const LatticeSpec& spec = real->spec;
  if (spec.dims == 1) cell[1] = 0;
  if (!spec.contains(cell)) throw WavepacketError("cell lies outside the lattice");
  const int flat = spec.flat_index(cell);
  if (!real->is_occupied(flat)) throw WavepacketError("cell is vacant");
  ExcitonState s;
  s.realization = real;
  const auto cells = real->occupied_cells();
  s.amp = Eigen::VectorXcd::Zero(static_cast<int>(cells.size()));
  for (size_t b = 0; b < cells.size(); ++b) {
    if (cells[b] == flat) {
      s.amp[static_cast<int>(b)] = 1.0;
      break;
    }
  }
  return s;
}

double bessel_j(int m, double x) {
  double sign = 1.0;
  if (m < 0) {
    m = -m;
    if (m % 2) sign = -sign;
  }
  if (x < 0) {
    x = -x;
    if (m % 2) sign = -sign;
  }
  return sign * std::cyl_bessel_j(static_cast<double>(m), x);
}

ExcitonState make_bessel_focus(std::shared_ptr<const DisorderRealization> real,
                               std::array<int, 2> target, double tau,
                               double alpha, double tail_threshold) {
  if (!real) throw WavepacketError("make_bessel_focus needs a realization");
  const LatticeSpec& spec = real->spec;
  if (spec.dims != 1) {
    throw WavepacketError("bessel focus preparation is defined for 1D chains only");
  }
  if (!(tau >= 0.0)) throw WavepacketError("focus delay must be nonnegative");
  target[1] = 0;
  if (!spec.contains(target)) throw WavepacketError("target lies outside the lattice");

  const double arg = 2.0 * alpha * tau;
  const int n0 = target[0];
  // Probability inside the array for the ideal infinite-chain profile.
  double inside = 0.0;
  for (int x = 0; x < spec.extent[0]; ++x) {
    const double j = bessel_j(x - n0, arg);
    inside += j * j;
  }
  if (1.0 - inside > tail_threshold) {
    throw WavepacketError(
        "bessel focus tail beyond the array edge exceeds the threshold; "
        "shorten tau or enlarge the lattice");
  }

  ExcitonState s;
  s.realization = real;
  const auto cells = real->occupied_cells();
  s.amp.resize(static_cast<int>(cells.size()));
  for (size_t b = 0; b < cells.size(); ++b) {
    const int d = spec.coords(cells[b])[0] - n0;
    s.amp[static_cast<int>(b)] =
        bessel_j(d, arg) * std::exp(I * (units::pi / 2.0) * static_cast<double>(d));
  }
  require_normalizable(s, "bessel focus state");
  return s;
}

int KSpectrum::folded(int axis, int raw) const {
  const int n = spec.extent[axis];
  return raw > n / 2 ? raw - n : raw;
}

double KSpectrum::k_value(int axis, int raw) const {
  const int n = spec.extent[axis];
  return units::two_pi * folded(axis, raw) / (n * spec.spacing);
}

KSpectrum k_transform(const ExcitonState& state) {
  const LatticeSpec& spec = state.realization->spec;
  const int nx = spec.extent[0], ny = spec.extent[1];

  // Scatter to the full grid, then separable unitary DFT (naive; lattice
  // extents here are small enough that O(N^2) per axis is immaterial).
  Eigen::VectorXcd full = Eigen::VectorXcd::Zero(spec.cell_count());
  const auto cells = state.realization->occupied_cells();
  for (size_t b = 0; b < cells.size(); ++b) full[cells[b]] = state.amp[static_cast<int>(b)];

  Eigen::MatrixXcd fx(nx, nx);
  for (int v = 0; v < nx; ++v)
    for (int n = 0; n < nx; ++n)
      fx(v, n) = std::exp(-I * (units::two_pi * v * n / nx)) / std::sqrt(double(nx));

  Eigen::Map<Eigen::MatrixXcd> grid(full.data(), nx, ny);  // column = one y row
  Eigen::MatrixXcd after_x = fx * grid;

  KSpectrum out;
  out.spec = spec;
  if (ny == 1) {
    out.g = Eigen::Map<Eigen::VectorXcd>(after_x.data(), nx);
    return out;
  }
  Eigen::MatrixXcd fy(ny, ny);
  for (int v = 0; v < ny; ++v)
    for (int n = 0; n < ny; ++n)
      fy(v, n) = std::exp(-I * (units::two_pi * v * n / ny)) / std::sqrt(double(ny));
  Eigen::MatrixXcd res = after_x * fy.transpose();
  out.g = Eigen::Map<Eigen::VectorXcd>(res.data(), spec.cell_count());
  return out;
}

Eigen::VectorXcd k_inverse(const KSpectrum& ks) {
  const int nx = ks.spec.extent[0], ny = ks.spec.extent[1];
  Eigen::MatrixXcd fx(nx, nx);
  for (int n = 0; n < nx; ++n)
    for (int v = 0; v < nx; ++v)
      fx(n, v) = std::exp(I * (units::two_pi * v * n / nx)) / std::sqrt(double(nx));
  Eigen::Map<const Eigen::MatrixXcd> grid(ks.g.data(), nx, ny);
  Eigen::MatrixXcd after_x = fx * grid;
  if (ny == 1) return Eigen::Map<Eigen::VectorXcd>(after_x.data(), nx);
  Eigen::MatrixXcd fy(ny, ny);
  for (int n = 0; n < ny; ++n)
    for (int v = 0; v < ny; ++v)
      fy(n, v) = std::exp(I * (units::two_pi * v * n / ny)) / std::sqrt(double(ny));
  Eigen::MatrixXcd res = after_x * fy.transpose();
  return Eigen::Map<Eigen::VectorXcd>(res.data(), ks.spec.cell_count());
}

PacketStats packet_stats(const ExcitonState& state) {
  const LatticeSpec& spec = state.realization->spec;
  const auto cells = state.realization->occupied_cells();
  PacketStats st;
  double total = 0.0, p2 = 0.0;
  std::array<double, 2> m1 = {0, 0}, m2 = {0, 0};
  for (size_t b = 0; b < cells.size(); ++b) {
    const double p = std::norm(state.amp[static_cast<int>(b)]);
    const auto c = spec.coords(cells[b]);
    total += p;
    p2 += p * p;
    for (int ax = 0; ax < spec.dims; ++ax) {
      m1[ax] += p * c[ax];
      m2[ax] += p * c[ax] * c[ax];
    }
  }
  st.norm = std::sqrt(total);
  if (total <= 0.0) return st;
  for (int ax = 0; ax < spec.dims; ++ax) {
    st.center[ax] = m1[ax] / total;
    const double var = m2[ax] / total - st.center[ax] * st.center[ax];
    st.width[ax] = std::sqrt(std::max(var, 0.0)) * spec.spacing;
  }
  st.participation = total * total / p2;
  return st;
}

double target_probability(const ExcitonState& state, std::array<int, 2> cell) {
  const LatticeSpec& spec = state.realization->spec;
  if (spec.dims == 1) cell[1] = 0;
  if (!spec.contains(cell)) throw WavepacketError("cell lies outside the lattice");
  const int flat = spec.flat_index(cell);
  if (!state.realization->is_occupied(flat)) return 0.0;
  const auto cells = state.realization->occupied_cells();
  for (size_t b = 0; b < cells.size(); ++b) {
    if (cells[b] == flat) return std::norm(state.amp[static_cast<int>(b)]);
  }
  return 0.0;
}

double window_probability(const ExcitonState& state, std::array<int, 2> cell, int w) {
  const LatticeSpec& spec = state.realization->spec;
  if (spec.dims == 1) cell[1] = 0;
  const auto cells = state.realization->occupied_cells();
  double p = 0.0;
  for (size_t b = 0; b < cells.size(); ++b) {
    const auto c = spec.coords(cells[b]);
    if (std::abs(c[0] - cell[0]) <= w &&
        (spec.dims == 1 || std::abs(c[1] - cell[1]) <= w)) {
      p += std::norm(state.amp[static_cast<int>(b)]);
    }
  }
  return p;
}

double core_width(const ExcitonState& state, std::array<int, 2> cell, int w) {
  const LatticeSpec& spec = state.realization->spec;
  if (spec.dims == 1) cell[1] = 0;
  const auto cells = state.realization->occupied_cells();
  double total = 0.0;
  std::array<double, 2> m1 = {0, 0}, m2 = {0, 0};
  for (size_t b = 0; b < cells.size(); ++b) {
    const auto c = spec.coords(cells[b]);
    if (std::abs(c[0] - cell[0]) > w ||
        (spec.dims == 2 && std::abs(c[1] - cell[1]) > w)) {
      continue;
    }
    const double p = std::norm(state.amp[static_cast<int>(b)]);
    total += p;
    for (int ax = 0; ax < spec.dims; ++ax) {
      m1[ax] += p * c[ax];
      m2[ax] += p * c[ax] * c[ax];
    }
  }
  if (total <= 0.0) return 0.0;
  double var = 0.0;
  for (int ax = 0; ax < spec.dims; ++ax) {
    const double mu = m1[ax] / total;
    var += m2[ax] / total - mu * mu;
  }
  return std::sqrt(std::max(var / spec.dims, 0.0)) * spec.spacing;
}

KStats k_stats(const KSpectrum& ks, int axis) {
  const int n = ks.spec.extent[axis];
  const int nx = ks.spec.extent[0];
  // Circular first moment over the folded Brillouin zone, then a
  // minimal-image second moment about it. Robust against packets whose
  // spectrum straddles the zone edge.
  cplx m1 = 0.0;
  const int total = ks.spec.cell_count();
  for (int flat = 0; flat < total; ++flat) {
    const int raw = axis == 0 ? flat % nx : flat / nx;
    const double w = std::norm(ks.g[flat]);
    m1 += w * std::exp(I * (units::two_pi * raw / n));
  }
  KStats out;
  const double ang = std::arg(m1);  // (-pi, pi]
  out.center = ang / ks.spec.spacing;
  const double center_steps = ang * n / units::two_pi;
  double wsum = 0.0, var = 0.0;
  for (int flat = 0; flat < total; ++flat) {
    const int raw = axis == 0 ? flat % nx : flat / nx;
    const double w = std::norm(ks.g[flat]);
    if (w == 0.0) continue;
    double d = raw - center_steps;
    d -= n * std::round(d / n);  // minimal image in grid steps
    wsum += w;
    var += w * d * d;
  }
  if (wsum > 0.0) {
    out.sigma = std::sqrt(var / wsum) * units::two_pi / (n * ks.spec.spacing);
  }
  return out;
}

}  // namespace exsim
