#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "exsim/coupling.hpp"
#include "exsim/evolve.hpp"
#include "exsim/lattice.hpp"

// Control protocols: phase masks (momentum kicks, quadratic lenses), their
// physical realizations as Stark-shift pulses from DC fields or focused
// laser beams, analytic focus predictions, and orientation steering.
//
// Sign bookkeeping, fixed once here: apply_phase_mask multiplies amplitudes
// by exp(-i Phi_n), and the k transform maps a real-space factor
// exp(+i delta a n) to a spectrum shift of +delta. A kick by delta therefore
// stores mask values Phi_n = -n a delta, and a focusing lens stores
// Phi_n = -Phi0 (n - n0)^2 so that free evolution with sign(alpha) =
// sign(Phi0) refocuses the packet at t* = 1/(4 alpha Phi0).

namespace exsim {

class ControlError : public std::runtime_error {
 public:
  explicit ControlError(const std::string& what) : std::runtime_error(what) {}
};

// Momentum kick by delta (rad/m per axis). Kicks beyond pi/a fold back
// into the Brillouin zone.
PhaseMask linear_kick_mask(std::shared_ptr<const DisorderRealization> real,
                           std::array<double, 2> delta);

// Quadratic lens of strength phi0 (rad per squared site offset) centered on
// the target cell; per-axis offsets summed in 2D. Focuses when phi0 and the
// coupling share a sign; the opposite sign defocuses (still a valid mask).
PhaseMask quadratic_lens_mask(std::shared_ptr<const DisorderRealization> real,
                              double phi0, std::array<double, 2> target);

struct FocusPrediction {
  double t_star = 0;     // s
  double sigma_k = 0;    // rad/m after the lens (gaussian packets)
  double sigma_xf = 0;   // focused real-space width, m (gaussian packets)
  double delta_k = 0;    // dimensionless k-zone spread 2 N phi0 (plane waves)
  bool sign_ok = true;   // false when t_star < 0 (defocusing combination)
};

// Gaussian packet of amplitude width sigma_x (m) through a lens phi0.
FocusPrediction predict_focus_gaussian(double sigma_x, double phi0, double alpha,
                                       double spacing);
// Fully delocalized state over n_sites through a lens phi0.
FocusPrediction predict_focus_planewave(int n_sites, double phi0, double alpha,
                                        double spacing);
// Optimal lens strengths for the two cases: a/(2 sigma_x) and 1/(2N).
double optimal_lens_gaussian(double sigma_x, double spacing);
double optimal_lens_planewave(int n_sites);

// Normalized focus-envelope probability at integer offset from the focus
// site for zone spread delta_k: (2/(pi delta_k)) sin^2(m delta_k/2)/m^2,
// which sums to exactly 1 over all integers m.
double planewave_focus_envelope(int offset, double delta_k);

// External fields and molecular constants, all SI (angular rad/s).
struct FieldConfig {
  double e_dc = 0;          // DC field magnitude, V/m
  double theta = 0;         // DC field polar angle from the array x axis
  double phi = 0;           // azimuth about the x axis
  double e_ac = 0;          // AC field envelope at the site, V/m

  double intensity = 0;     // beam center intensity I0, W/m^2
  double waist = 0;         // w0, m
  double wavelength = 0;    // m
  double z_offset = 0;      // packet center to beam focus distance, m

  double b_rot = 0;         // rotational constant, rad/s
  double mu = 0;            // permanent dipole, C m
  double alpha_par = 0;     // polarizability parallel, C^2 m^2 / J
  double alpha_perp = 0;    // perpendicular

  double v_eg = 0;          // two-level transition dipole, C m
  double delta_omega = 0;   // detuning, rad/s

  double rayleigh() const;  // z_R = pi w0^2 / lambda
};

enum class RotLevel { ground, excited };  // (J, M_J) = (0,0) and (1,0)

// Squared field envelope from intensity: E^2 = 2 I / (c eps0).
double efield_sq_from_intensity(double intensity);

// Dressed rotational level energy in combined weak DC + AC fields:
// B J(J+1) + (mu E_DC / hbar)^2 / (2B) G - alpha_perp E_AC^2/(4 hbar)
//          + (alpha_par - alpha_perp) E_AC^2/(4 hbar) F,
// with G(0,0) = -1/3, G(1,0) = 1/5, F(0,0) = -1/3, F(1,0) = -3/5.
double dc_stark_shift(const FieldConfig& fc, RotLevel level);
double stark_g_coeff(RotLevel level);
double stark_f_coeff(RotLevel level);
// Excitation gap E(1,0) - E(0,0); the on-site energy entering the
// Hamiltonian diagonal.
double transition_gap(const FieldConfig& fc);

// Light shift of an isolated two-level system: E_AC^2 V_eg^2 / (4 hbar^2
// delta_omega), rad/s. Zero detuning is rejected.
double ac_stark_two_level(const FieldConfig& fc);

// Beam intensity at radial distance r and axial distance z from the focus.
double gaussian_beam_intensity(const FieldConfig& fc, double r, double z);

// Analytic kick predictions for the two pulse realizations, exactly the
// closed forms the pulsed simulations are checked against:
//   DC gradient pulse:  delta = 4 A E* mu^2 T / (15 hbar^2 B a)
//   beam-flank pulse:   delta = -sqrt(3) T (alpha_par - alpha_perp) E0^2
//                               / (80 hbar z_R),  E0^2 = 2 I0 / (c eps0)
double pulse_to_delta_dc(const FieldConfig& fc, double gradient_a, double duration,
                         double spacing);
double pulse_to_delta_beam(const FieldConfig& fc, double duration);

// Physical pulse realizations as site-energy schedules.
// DC kick: E(n, t) = E* + A (n - n0) sin^2(pi t/T); the site energy follows
// the gap map exactly (quadratic in the field, hence c1 and c2 terms).
PulseSchedule make_dc_kick_schedule(std::shared_ptr<const DisorderRealization> real,
                                    const FieldConfig& fc, double gradient_a,
                                    double duration, double center);
// Beam kick: 1D array along the beam axis, site n at z = z_first + n a; the
// AC Stark modulation follows the axial intensity falloff.
PulseSchedule make_beam_kick_schedule(std::shared_ptr<const DisorderRealization> real,
                                      const FieldConfig& fc, double duration,
                                      double z_first);
// Beam lens: 2D array in the focal plane centered on the given cell; the
// radial intensity profile supplies a concave quadratic phase (focuses
// negative-coupling systems).
PulseSchedule make_beam_lens_schedule(std::shared_ptr<const DisorderRealization> real,
                                      const FieldConfig& fc, double duration,
                                      std::array<double, 2> center);

// Piecewise-constant field-orientation schedule for steering.
struct AngleEpoch {
  double theta = 0;
  double phi = 0;
  double duration = 0;
};

struct SteeringEpoch {
  HamiltonianMatrix hamiltonian;
  double duration = 0;
};

// One Hamiltonian per epoch with the dipole axis reoriented; angles are
// normalized into [0, pi] x [0, 2 pi).
std::vector<SteeringEpoch> steering_schedule(
    const CouplingModel& model, std::shared_ptr<const DisorderRealization> real,
    const std::vector<AngleEpoch>& epochs);

// Propagates through the epochs, sampling diagnostics at samples_per_epoch
// evenly spaced times per epoch.
RunRecord run_steering(const std::vector<SteeringEpoch>& epochs, ExcitonState& state,
                       int samples_per_epoch, const EvolveOptions& opts = {});

}  // namespace exsim
