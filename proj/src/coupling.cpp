#include "exsim/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace exsim {

std::array<double, 3> dipole_axis(const CouplingModel& model) {
  const double st = std::sin(model.theta);
  return {std::cos(model.theta), st * std::sin(model.phi), st * std::cos(model.phi)};
}

double coupling_element(const CouplingModel& model, int dx, int dy) {
  if (dx == 0 && dy == 0) {
    throw CouplingError("coupling_element needs a nonzero displacement");
  }
  const double r2 = static_cast<double>(dx) * dx + static_cast<double>(dy) * dy;
  if (model.kind == CouplingKind::nearest_neighbor) {
    return r2 == 1.0 ? model.alpha : 0.0;
  }
  // Dipolar. Allow r == truncation with a tolerance so integer cutoffs
  // include their boundary shell.
  if (r2 > model.truncation * model.truncation * (1.0 + 1e-12)) return 0.0;
  const double r = std::sqrt(r2);
  const auto f = dipole_axis(model);
  const double cosg = (dx * f[0] + dy * f[1]) / r;
  return model.alpha * (1.0 - 3.0 * cosg * cosg) / (r2 * r);
}

double dispersion_nn(const CouplingModel& model, double k, double spacing) {
  const double a1 = coupling_element(model, 1, 0);
  return model.site_energy + 2.0 * a1 * std::cos(k * spacing);
}

double dispersion_lr(const CouplingModel& model, double k, double spacing) {
  double e = model.site_energy;
  const int reach = model.kind == CouplingKind::nearest_neighbor
                        ? 1
                        : static_cast<int>(std::floor(model.truncation + 1e-9));
  for (int n = 1; n <= reach; ++n) {
    e += 2.0 * coupling_element(model, n, 0) * std::cos(k * spacing * n);
  }
  return e;
}

namespace {

struct StencilEntry {
  int dx, dy;
  double value;
};

std::vector<StencilEntry> make_stencil(const CouplingModel& model, int dims) {
  std::vector<StencilEntry> st;
  const int reach = model.kind == CouplingKind::nearest_neighbor
                        ? 1
                        : static_cast<int>(std::floor(model.truncation + 1e-9));
  const int reach_y = dims == 2 ? reach : 0;
  for (int dy = -reach_y; dy <= reach_y; ++dy) {
    for (int dx = -reach; dx <= reach; ++dx) {
      if (dx == 0 && dy == 0) continue;
      const double v = coupling_element(model, dx, dy);
      if (v != 0.0) st.push_back({dx, dy, v});
    }
  }
  return st;
}

}  // namespace

HamiltonianMatrix build_hamiltonian(const CouplingModel& model,
                                    std::shared_ptr<const DisorderRealization> real) {
  if (!real) throw CouplingError("build_hamiltonian needs a realization");
  if (!(model.alpha != 0.0) || !std::isfinite(model.alpha)) {
    throw CouplingError("coupling strength must be nonzero and finite");
  }
  if (model.kind == CouplingKind::dipolar && model.truncation < 1.0) {
    throw CouplingError("dipolar truncation must reach at least one lattice spacing");
  }

  const LatticeSpec& spec = real->spec;
  const int reach = model.kind == CouplingKind::nearest_neighbor
                        ? 1
                        : static_cast<int>(std::floor(model.truncation + 1e-9));
  if (model.boundary == Boundary::periodic) {
    if (spec.extent[0] < 2 * reach + 1 ||
        (spec.dims == 2 && spec.extent[1] < 2 * reach + 1)) {
      throw CouplingError("periodic boundary needs extent > 2x coupling range");
    }
  }

  HamiltonianMatrix h;
  h.realization = real;
  h.model = model;
  h.basis_to_cell = real->occupied_cells();
  h.n = static_cast<int>(h.basis_to_cell.size());
  if (h.n == 0) throw CouplingError("realization has no occupied sites");

  h.cell_to_basis.assign(spec.cell_count(), -1);
  for (int b = 0; b < h.n; ++b) h.cell_to_basis[h.basis_to_cell[b]] = b;

  h.diag.assign(h.n, model.site_energy);
  h.row_ptr.assign(h.n + 1, 0);

  const auto stencil = make_stencil(model, spec.dims);

  std::vector<std::pair<int, double>> row;
  row.reserve(stencil.size());
  h.col.reserve(static_cast<size_t>(h.n) * std::min<size_t>(stencil.size(), 64));
  h.val.reserve(h.col.capacity());

  for (int b = 0; b < h.n; ++b) {
    const auto c = spec.coords(h.basis_to_cell[b]);
    row.clear();
    for (const auto& s : stencil) {
      int x = c[0] + s.dx;
      int y = c[1] + s.dy;
      if (model.boundary == Boundary::periodic) {
        x = (x % spec.extent[0] + spec.extent[0]) % spec.extent[0];
        y = (y % spec.extent[1] + spec.extent[1]) % spec.extent[1];
      } else if (x < 0 || x >= spec.extent[0] || y < 0 || y >= spec.extent[1]) {
        continue;
      }
      const int nb = h.cell_to_basis[spec.flat_index({x, y})];
      if (nb >= 0) row.emplace_back(nb, s.value);
    }
    std::sort(row.begin(), row.end());
    for (const auto& [j, v] : row) {
      h.col.push_back(j);
      h.val.push_back(v);
    }
    h.row_ptr[b + 1] = static_cast<int>(h.col.size());
  }
  return h;
}

Eigen::VectorXcd HamiltonianMatrix::apply(const Eigen::VectorXcd& x) const {
  Eigen::VectorXcd y(n);
  for (int i = 0; i < n; ++i) {
    std::complex<double> acc = diag[i] * x[i];
    for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) acc += val[p] * x[col[p]];
    y[i] = acc;
  }
  return y;
}

Eigen::VectorXcd HamiltonianMatrix::apply_shifted(
    const Eigen::VectorXcd& x, const std::vector<double>& extra_diag) const {
  Eigen::VectorXcd y(n);
  for (int i = 0; i < n; ++i) {
    std::complex<double> acc = (diag[i] + extra_diag[i]) * x[i];
    for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) acc += val[p] * x[col[p]];
    y[i] = acc;
  }
  return y;
}

double HamiltonianMatrix::expectation(const Eigen::VectorXcd& x) const {
  return std::real(x.dot(apply(x)));
}

Eigen::MatrixXd HamiltonianMatrix::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = diag[i];
    for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) m(i, col[p]) = val[p];
  }
  return m;
}

void HamiltonianMatrix::spectral_bounds(double& center, double& radius) const {
  double lo = diag[0], hi = diag[0];
  for (int i = 0; i < n; ++i) {
    double r = 0.0;
    for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) r += std::abs(val[p]);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  center = 0.5 * (lo + hi);
  radius = 0.5 * (hi - lo);
}

double HamiltonianMatrix::max_abs_row_sum() const {
  double m = 0.0;
  for (int i = 0; i < n; ++i) {
    double r = 0.0;
    for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) r += std::abs(val[p]);
    m = std::max(m, r);
  }
  return m;
}

std::string hamiltonian_to_triplets(const HamiltonianMatrix& h) {
  std::ostringstream out;
  out.precision(17);
  for (int i = 0; i < h.n; ++i) {
    if (h.diag[i] != 0.0) out << i << ' ' << i << ' ' << h.diag[i] << '\n';
    for (int p = h.row_ptr[i]; p < h.row_ptr[i + 1]; ++p) {
      out << i << ' ' << h.col[p] << ' ' << h.val[p] << '\n';
    }
  }
  return out.str();
}

}  // namespace exsim
