#pragma once

#include <array>
#include <complex>
#include <memory>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "exsim/lattice.hpp"

// Single-excitation states over the occupied sites of a realization, plus
// k-space analysis. Amplitudes are stored in the same basis ordering the
// Hamiltonian uses: occupied cells ascending by flat index. k spectra are
// taken over the full grid (vacant cells contribute zero amplitude) with a
// unitary DFT per axis, so Parseval holds exactly.

namespace exsim {

class WavepacketError : public std::runtime_error {
 public:
  explicit WavepacketError(const std::string& what) : std::runtime_error(what) {}
};

struct ExcitonState {
  std::shared_ptr<const DisorderRealization> realization;
  Eigen::VectorXcd amp;  // one entry per occupied cell

  int size() const { return static_cast<int>(amp.size()); }
  double norm() const { return amp.norm(); }
};

// Gaussian wavepacket: amplitude envelope exp(-(r - r0)^2 / (2 sigma^2))
// with plane-wave carrier exp(i k . r). Centers are in cell coordinates
// (may be fractional), widths in meters (amplitude width; the probability
// rms width is sigma/sqrt(2)), carrier k in rad/m per axis.
ExcitonState make_gaussian(std::shared_ptr<const DisorderRealization> real,
                           std::array<double, 2> center_cells,
                           std::array<double, 2> sigma_m,
                           std::array<double, 2> k0);

// Constant-magnitude Bloch wave exp(i k . r)/sqrt(N_occ) over occupied
// sites. On a defect-free periodic lattice with k on the reciprocal grid
// this is an exact eigenstate of the hopping Hamiltonian.
ExcitonState make_eigenstate(std::shared_ptr<const DisorderRealization> real,
                             std::array<double, 2> k);

// All amplitude on one cell.
ExcitonState make_single_site(std::shared_ptr<const DisorderRealization> real,
                              std::array<int, 2> cell);

// 1D preparation that refocuses onto the target cell after free evolution
// for time tau under nearest-neighbor coupling alpha: amplitudes are Bessel
// functions J_{n-n0}(2 alpha tau) with quarter-turn phase twists. Rejects
// 2D lattices and preparations whose tail beyond the array edge exceeds
// tail_threshold of the probability.
ExcitonState make_bessel_focus(std::shared_ptr<const DisorderRealization> real,
                               std::array<int, 2> target, double tau,
                               double alpha, double tail_threshold = 1e-6);

// J_m(x) for any integer order and real argument.
double bessel_j(int m, double x);

struct KSpectrum {
  LatticeSpec spec;
  Eigen::VectorXcd g;  // raw DFT layout, flat index nu_y * Nx + nu_x

  // Zone-folded integer index in (-N/2, N/2] for a raw axis index.
  int folded(int axis, int raw) const;
  // Wavenumber in rad/m for a raw axis index.
  double k_value(int axis, int raw) const;
};

KSpectrum k_transform(const ExcitonState& state);
// Full-grid amplitudes (vacant cells included) from a spectrum.
Eigen::VectorXcd k_inverse(const KSpectrum& spec);

struct PacketStats {
  std::array<double, 2> center = {0, 0};  // cell coordinates
  std::array<double, 2> width = {0, 0};   // probability rms width, meters
  double participation = 0;               // 1 / sum p^2
  double norm = 0;
};

PacketStats packet_stats(const ExcitonState& state);

// Probability on one cell (0 if vacant).
double target_probability(const ExcitonState& state, std::array<int, 2> cell);
// Probability within a square window of half-width w cells around a cell.
double window_probability(const ExcitonState& state, std::array<int, 2> cell, int w);
// Probability rms width (meters) computed only within the window; isolates
// the focused core from slow dispersive tails.
double core_width(const ExcitonState& state, std::array<int, 2> cell, int w);

struct KStats {
  double center = 0;  // rad/m, circular mean folded to (-pi/a, pi/a]
  double sigma = 0;   // rad/m, rms about the center with minimal-image wrap
};

KStats k_stats(const KSpectrum& spec, int axis);

}  // namespace exsim
