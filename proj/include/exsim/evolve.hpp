#pragma once

#include <array>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "exsim/coupling.hpp"
#include "exsim/wavepacket.hpp"

// Time evolution. Static Hamiltonians propagate either through a dense
// eigendecomposition (small instances, reusable factorization) or a
// Chebyshev expansion of exp(-iHt) driven by sparse matrix-vector products
// (large instances; converges to machine precision, cost linear in the
// spectral radius times t). Pulsed evolution splits the pulse window into
// adaptive substeps, freezing the Hamiltonian at each substep midpoint and
// applying the static kernel; step doubling provides the error estimate.

namespace exsim {

class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

// Per-site phase Phi_i accumulated during a control pulse. Applying the
// mask multiplies each occupied-site amplitude by exp(-i Phi_i).
struct PhaseMask {
  std::shared_ptr<const DisorderRealization> realization;
  std::vector<double> phi;  // one entry per occupied cell, basis order
};

ExcitonState apply_phase_mask(const ExcitonState& state, const PhaseMask& mask);
PhaseMask combine_masks(const PhaseMask& a, const PhaseMask& b);
// Builds a mask from a per-cell function of cell coordinates.
PhaseMask mask_from_cells(std::shared_ptr<const DisorderRealization> real,
                          const std::function<double(std::array<int, 2>)>& phi);

class Propagator {
 public:
  enum class Method { automatic, dense, chebyshev };

  explicit Propagator(const HamiltonianMatrix& h, Method m = Method::automatic);

  // psi -> exp(-i H dt) psi. Either sign of dt.
  void apply_inplace(Eigen::VectorXcd& psi, double dt) const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& psi, double dt) const;
  ExcitonState apply(const ExcitonState& state, double dt) const;

  // Column b of U(dt): the state a single-site excitation evolves into.
  Eigen::VectorXcd column(int basis_index, double dt) const;

  Method chosen() const { return m_method; }

  // Instances at or below this size take the dense path under automatic
  // selection; above it the Chebyshev path wins on time and memory.
  static constexpr int dense_cutoff = 1024;

 private:
  const HamiltonianMatrix* m_h;
  Method m_method;
  double m_center = 0, m_radius = 0;
  Eigen::VectorXd m_evals;
  Eigen::MatrixXd m_evecs;
};

ExcitonState propagate_static(const HamiltonianMatrix& h, const ExcitonState& s,
                              double dt,
                              Propagator::Method m = Propagator::Method::automatic);

// One Chebyshev application of exp(-i (H + diag(extra)) dt) without building
// a Propagator; the kernel the pulsed integrator uses for its substeps.
void chebyshev_apply(const HamiltonianMatrix& h, const std::vector<double>& extra_diag,
                     Eigen::VectorXcd& psi, double dt);

// Site-energy modulation eps_i(t) = c1[i] e(t) + c2[i] e(t)^2 over a window
// [t_start, t_start + duration], where e is a normalized envelope: a
// sin^2(pi (t - t_start)/T) hump or a tabulated curve. The quadratic term
// carries Stark shifts that respond quadratically to the field envelope.
struct PulseSchedule {
  enum class Envelope { sin2, tabulated };

  double t_start = 0;
  double duration = 0;
  std::vector<double> c1, c2;  // rad/s per occupied site, basis order
  Envelope envelope = Envelope::sin2;
  std::vector<double> tab_t, tab_v;  // tabulated envelope, t relative to start

  bool empty() const { return duration <= 0.0 || c1.empty(); }
  double envelope_at(double t) const;      // 0 outside the window
  double envelope_integral() const;        // int e dt over the window
  double envelope_sq_integral() const;     // int e^2 dt
  // Accumulated per-site phase Phi_i = int eps_i dt; the equivalent
  // instantaneous mask in the sudden limit.
  PhaseMask accumulated_mask(std::shared_ptr<const DisorderRealization> real) const;

  static PulseSchedule none() { return {}; }
};

struct RunSample {
  double t = 0;
  double norm = 0;
  double energy = 0;  // <H> of the static Hamiltonian, rad/s
  std::array<double, 2> center = {0, 0};
  std::array<double, 2> width = {0, 0};
  double participation = 0;
  double p_target = 0;
  std::array<double, 2> k_center = {0, 0};
};

struct RunRecord {
  std::vector<RunSample> samples;
  std::vector<std::pair<double, ExcitonState>> snapshots;
  int steps_accepted = 0;
  int steps_rejected = 0;
  double min_step = 0;
  double norm_drift = 0;          // max |norm - 1|
  double sudden_fidelity = -1;    // overlap^2 with the instantaneous-mask
                                  // approximation at pulse end; -1 if unset
  std::string method;
};

struct EvolveOptions {
  double tol = 1e-9;              // allowed error per unit evolved time
  std::array<int, 2> target = {-1, -1};  // cell for p_target; {-1,-1} skips
  bool record_k = true;
  std::vector<double> snapshot_times;
  bool sudden_fidelity = false;
  Propagator::Method method = Propagator::Method::automatic;
};

// Evolves the state in place across the sample grid (ascending times; the
// first entry is the state's current time). Returns per-sample diagnostics.
RunRecord propagate_pulsed(const HamiltonianMatrix& h, const PulseSchedule& pulse,
                           ExcitonState& state, const std::vector<double>& t_grid,
                           const EvolveOptions& opts = {});

// Fixed-step variant of the pulsed kernel over [t0, t1]; diagnostic hook
// for convergence-order measurements.
ExcitonState propagate_pulsed_fixed(const HamiltonianMatrix& h,
                                    const PulseSchedule& pulse,
                                    const ExcitonState& state, double t0, double t1,
                                    int n_steps);

// Spectral propagation for defect-free periodic lattices: multiplies each
// k component by exp(-i E(kx, ky) t). The reference dynamics exact-focusing
// statements are made against.
ExcitonState propagate_bloch(const ExcitonState& state,
                             const std::function<double(double, double)>& energy,
                             double t);

}  // namespace exsim
