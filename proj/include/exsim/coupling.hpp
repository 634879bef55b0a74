#pragma once

#include <array>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "exsim/lattice.hpp"

// Excitation-hopping couplings between monomers and assembly of the
// single-excitation Hamiltonian over the occupied sites of a realization.
//
// Two coupling laws are supported:
//  * nearest_neighbor: constant alpha_ref between axis-adjacent cells.
//  * dipolar: alpha_ref * (a/r)^3 * (1 - 3 cos^2 gamma), where gamma is the
//    angle between the bond and the transition-dipole axis set by the
//    external field direction. The prefactor is normalized so that a bond
//    perpendicular to the dipole axis at distance a couples with exactly
//    alpha_ref; at gamma = 0 the same bond gives -2 alpha_ref, and the two
//    regimes change sign at cos^2 gamma = 1/3.
//
// The dipole axis is parameterized by polar angle theta measured from the
// lattice x axis and azimuth phi about it: f = (cos theta,
// sin theta sin phi, sin theta cos phi) in (x, y, normal) components, so
// phi = 0 tilts the axis out of the lattice plane and phi = 90 deg keeps it
// in-plane along y.

namespace exsim {

class CouplingError : public std::runtime_error {
 public:
  explicit CouplingError(const std::string& what) : std::runtime_error(what) {}
};

enum class CouplingKind { nearest_neighbor, dipolar };
enum class Boundary { open, periodic };

struct CouplingModel {
  CouplingKind kind = CouplingKind::nearest_neighbor;
  double alpha = 0.0;       // alpha_ref, rad/s
  double theta = 0.0;       // dipole axis polar angle from x axis, rad
  double phi = 0.0;         // azimuth about the x axis, rad
  double truncation = 1.0;  // dipolar range cutoff in units of a
  double site_energy = 0.0; // Delta E on the diagonal, rad/s
  Boundary boundary = Boundary::open;
};

// Unit dipole-axis vector (x, y, normal) for the model's angles.
std::array<double, 3> dipole_axis(const CouplingModel& model);

// Coupling between two cells separated by displacement (dx, dy) in units of
// the lattice constant. Zero displacement is rejected. Beyond-truncation
// dipolar pairs and non-adjacent nearest-neighbor pairs give exactly 0.
double coupling_element(const CouplingModel& model, int dx, int dy);

// Analytic band structure of the defect-free 1D chain, k in rad/m.
double dispersion_nn(const CouplingModel& model, double k, double spacing);
double dispersion_lr(const CouplingModel& model, double k, double spacing);

// Hamiltonian over occupied sites, stored sparse (CSR) with the dense form
// materialized on demand. Basis index b corresponds to the b-th occupied
// cell in flat-index order.
struct HamiltonianMatrix {
  std::shared_ptr<const DisorderRealization> realization;
  CouplingModel model;

  int n = 0;                      // occupied-site count
  std::vector<int> basis_to_cell; // size n
  std::vector<int> cell_to_basis; // size cell_count, -1 for vacant

  // CSR of the off-diagonal part; diagonal kept separately.
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<double> val;
  std::vector<double> diag;

  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;  // H x
  // H x with per-site energies shifted by extra_diag (pulsed evolution).
  Eigen::VectorXcd apply_shifted(const Eigen::VectorXcd& x,
                                 const std::vector<double>& extra_diag) const;
  double expectation(const Eigen::VectorXcd& x) const;      // Re <x|H|x>
  Eigen::MatrixXd dense() const;

  // Gershgorin bounds on the spectrum: [center - radius, center + radius].
  void spectral_bounds(double& center, double& radius) const;
  double max_abs_row_sum() const;  // max_i sum_j |H_ij| off-diagonal
};

HamiltonianMatrix build_hamiltonian(const CouplingModel& model,
                                    std::shared_ptr<const DisorderRealization> real);

// Sparse triplet text form "i j value" (basis indices), and its parser.
std::string hamiltonian_to_triplets(const HamiltonianMatrix& h);

}  // namespace exsim
