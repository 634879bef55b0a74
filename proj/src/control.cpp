#include "exsim/control.hpp"

#include <cmath>

#include "exsim/units.hpp"

namespace exsim {

namespace {

double sq(double x) { return x * x; }

}  // namespace

PhaseMask linear_kick_mask(std::shared_ptr<const DisorderRealization> real,
                           std::array<double, 2> delta) {
  if (!real) throw ControlError("kick mask needs a realization");
  const double a = real->spec.spacing;
  const int dims = real->spec.dims;
  return mask_from_cells(real, [=](std::array<int, 2> c) {
    double phi = -delta[0] * a * c[0];
    if (dims == 2) phi -= delta[1] * a * c[1];
    return phi;
  });
}

PhaseMask quadratic_lens_mask(std::shared_ptr<const DisorderRealization> real,
                              double phi0, std::array<double, 2> target) {
  if (!real) throw ControlError("lens mask needs a realization");
  const int dims = real->spec.dims;
  return mask_from_cells(real, [=](std::array<int, 2> c) {
    double r2 = sq(c[0] - target[0]);
    if (dims == 2) r2 += sq(c[1] - target[1]);
    return -phi0 * r2;
  });
}

FocusPrediction predict_focus_gaussian(double sigma_x, double phi0, double alpha,
                                       double spacing) {
  if (alpha == 0.0 || phi0 == 0.0) {
    throw ControlError("focus prediction needs nonzero coupling and lens strength");
  }
  FocusPrediction p;
  p.t_star = 1.0 / (4.0 * alpha * phi0);
  p.sign_ok = p.t_star > 0.0;
  const double chirp = 4.0 * sq(phi0) * sq(sq(sigma_x)) / sq(sq(spacing));
  p.sigma_k = std::sqrt(1.0 + chirp) / sigma_x;
  p.sigma_xf = sigma_x / std::sqrt(1.0 + chirp);
  p.delta_k = spacing * p.sigma_k;
  return p;
}

FocusPrediction predict_focus_planewave(int n_sites, double phi0, double alpha,
                                        double spacing) {
  if (alpha == 0.0 || phi0 == 0.0) {
    throw ControlError("focus prediction needs nonzero coupling and lens strength");
  }
  FocusPrediction p;
  p.t_star = 1.0 / (4.0 * alpha * phi0);
  p.sign_ok = p.t_star > 0.0;
  p.delta_k = 2.0 * n_sites * phi0;
  p.sigma_k = p.delta_k / spacing;
  p.sigma_xf = p.delta_k != 0.0 ? spacing / p.delta_k : 0.0;
  return p;
}

double optimal_lens_gaussian(double sigma_x, double spacing) {
  return spacing / (2.0 * sigma_x);
}

double optimal_lens_planewave(int n_sites) { return 1.0 / (2.0 * n_sites); }

double planewave_focus_envelope(int offset, double delta_k) {
  const double pref = 2.0 / (units::pi * delta_k);
  if (offset == 0) return pref * sq(delta_k / 2.0);
  const double s = std::sin(offset * delta_k / 2.0);
  return pref * sq(s) / sq(static_cast<double>(offset));
}

double FieldConfig::rayleigh() const {
  if (!(waist > 0.0) || !(wavelength > 0.0)) {
    throw ControlError("beam needs positive waist and wavelength");
  }
  return units::pi * sq(waist) / wavelength;
}

double efield_sq_from_intensity(double intensity) {
  return 2.0 * intensity / (units::c_light * units::eps0);
}

double stark_g_coeff(RotLevel level) {
  return level == RotLevel::ground ? -1.0 / 3.0 : 1.0 / 5.0;
}

double stark_f_coeff(RotLevel level) {
  return level == RotLevel::ground ? -1.0 / 3.0 : -3.0 / 5.0;
}

double dc_stark_shift(const FieldConfig& fc, RotLevel level) {
  if (!(fc.b_rot > 0.0)) throw ControlError("rotational constant must be positive");
  const double j_term = level == RotLevel::excited ? 2.0 * fc.b_rot : 0.0;
  const double dc = sq(fc.mu * fc.e_dc / units::hbar) / (2.0 * fc.b_rot);
  const double ac2 = sq(fc.e_ac);
  const double common_ac = -fc.alpha_perp * ac2 / (4.0 * units::hbar);
  const double aniso_ac = (fc.alpha_par - fc.alpha_perp) * ac2 / (4.0 * units::hbar);
  return j_term + dc * stark_g_coeff(level) + common_ac +
         aniso_ac * stark_f_coeff(level);
}

double transition_gap(const FieldConfig& fc) {
  return dc_stark_shift(fc, RotLevel::excited) - dc_stark_shift(fc, RotLevel::ground);
}

double ac_stark_two_level(const FieldConfig& fc) {
  if (fc.delta_omega == 0.0) throw ControlError("two-level light shift needs nonzero detuning");
  return sq(fc.e_ac * fc.v_eg / units::hbar) / (4.0 * fc.delta_omega);
}

double gaussian_beam_intensity(const FieldConfig& fc, double r, double z) {
  const double zr = fc.rayleigh();
  const double spread = 1.0 + sq(z / zr);
  return fc.intensity / spread * std::exp(-2.0 * sq(r) / (sq(fc.waist) * spread));
}

double pulse_to_delta_dc(const FieldConfig& fc, double gradient_a, double duration,
                         double spacing) {
  if (!(fc.b_rot > 0.0) || !(spacing > 0.0)) {
    throw ControlError("DC kick prediction needs B > 0 and a > 0");
  }
  return 4.0 * gradient_a * fc.e_dc * sq(fc.mu) * duration /
         (15.0 * sq(units::hbar) * fc.b_rot * spacing);
}

double pulse_to_delta_beam(const FieldConfig& fc, double duration) {
  const double e0sq = efield_sq_from_intensity(fc.intensity);
  return -std::sqrt(3.0) * duration * (fc.alpha_par - fc.alpha_perp) * e0sq /
         (80.0 * units::hbar * fc.rayleigh());
}

namespace {

// Gap change when the DC field moves from e0 to e0 + de: exact quadratic
// expansion of the mu^2 E^2 / 2B level shifts.
double dc_gap_coeff(const FieldConfig& fc) {
  // d(gap)/d(E^2) = (8/15) mu^2 / (2 B hbar^2)
  return (8.0 / 15.0) * sq(fc.mu / units::hbar) / (2.0 * fc.b_rot);
}

// Gap change per unit intensity from the anisotropic AC Stark term.
double ac_gap_per_intensity(const FieldConfig& fc) {
  // gap shift = -(4/15) (alpha_par - alpha_perp) E_AC^2 / (4 hbar)
  return -(4.0 / 15.0) * (fc.alpha_par - fc.alpha_perp) *
         efield_sq_from_intensity(1.0) / (4.0 * units::hbar);
}

}  // namespace

PulseSchedule make_dc_kick_schedule(std::shared_ptr<const DisorderRealization> real,
                                    const FieldConfig& fc, double gradient_a,
                                    double duration, double center) {
  if (!real || real->spec.dims != 1) {
    throw ControlError("DC kick schedule is defined for 1D chains");
  }
  if (!(duration > 0.0)) throw ControlError("pulse duration must be positive");
  const double g = dc_gap_coeff(fc);
  PulseSchedule p;
  p.duration = duration;
  const auto cells = real->occupied_cells();
  p.c1.resize(cells.size());
  p.c2.resize(cells.size());
  for (size_t b = 0; b < cells.size(); ++b) {
    const double de = gradient_a * (real->spec.coords(cells[b])[0] - center);
    // E(t)^2 - E*^2 = 2 E* de s + de^2 s^2 with s the envelope value.
    p.c1[b] = g * 2.0 * fc.e_dc * de;
    p.c2[b] = g * sq(de);
  }
  return p;
}

PulseSchedule make_beam_kick_schedule(std::shared_ptr<const DisorderRealization> real,
                                      const FieldConfig& fc, double duration,
                                      double z_first) {
  if (!real || real->spec.dims != 1) {
    throw ControlError("beam kick schedule is defined for 1D chains along the beam");
  }
  if (!(duration > 0.0)) throw ControlError("pulse duration must be positive");
  const double per_i = ac_gap_per_intensity(fc);
  PulseSchedule p;
  p.duration = duration;
  const auto cells = real->occupied_cells();
  p.c1.resize(cells.size());
  for (size_t b = 0; b < cells.size(); ++b) {
    const double z = z_first + real->spec.coords(cells[b])[0] * real->spec.spacing;
    p.c1[b] = per_i * gaussian_beam_intensity(fc, 0.0, z);
  }
  return p;
}

PulseSchedule make_beam_lens_schedule(std::shared_ptr<const DisorderRealization> real,
                                      const FieldConfig& fc, double duration,
                                      std::array<double, 2> center) {
  if (!real || real->spec.dims != 2) {
    throw ControlError("beam lens schedule needs a 2D array in the focal plane");
  }
  if (!(duration > 0.0)) throw ControlError("pulse duration must be positive");
  const double per_i = ac_gap_per_intensity(fc);
  const double a = real->spec.spacing;
  PulseSchedule p;
  p.duration = duration;
  const auto cells = real->occupied_cells();
  p.c1.resize(cells.size());
  for (size_t b = 0; b < cells.size(); ++b) {
    const auto c = real->spec.coords(cells[b]);
    const double r = a * std::sqrt(sq(c[0] - center[0]) + sq(c[1] - center[1]));
    p.c1[b] = per_i * gaussian_beam_intensity(fc, r, 0.0);
  }
  return p;
}

std::vector<SteeringEpoch> steering_schedule(
    const CouplingModel& model, std::shared_ptr<const DisorderRealization> real,
    const std::vector<AngleEpoch>& epochs) {
  if (epochs.empty()) throw ControlError("steering schedule needs at least one epoch");
  std::vector<SteeringEpoch> out;
  out.reserve(epochs.size());
  for (const AngleEpoch& e : epochs) {
    if (!(e.duration > 0.0)) throw ControlError("epoch durations must be positive");
    CouplingModel m = model;
    // Normalize: theta into [0, pi] (mirror), phi into [0, 2 pi).
    double th = std::fmod(e.theta, units::two_pi);
    if (th < 0) th += units::two_pi;
    double ph = e.phi;
    if (th > units::pi) {
      th = units::two_pi - th;
      ph += units::pi;
    }
    ph = std::fmod(ph, units::two_pi);
    if (ph < 0) ph += units::two_pi;
    m.theta = th;
    m.phi = ph;
    out.push_back({build_hamiltonian(m, real), e.duration});
  }
  return out;
}

RunRecord run_steering(const std::vector<SteeringEpoch>& epochs, ExcitonState& state,
                       int samples_per_epoch, const EvolveOptions& opts) {
  if (samples_per_epoch < 1) throw ControlError("need at least one sample per epoch");
  RunRecord rec;
  double t = 0.0;
  for (const SteeringEpoch& ep : epochs) {
    std::vector<double> grid;
    grid.reserve(samples_per_epoch + 1);
    for (int i = 0; i <= samples_per_epoch; ++i) {
      grid.push_back(t + ep.duration * i / samples_per_epoch);
    }
    RunRecord part = propagate_pulsed(ep.hamiltonian, PulseSchedule::none(), state,
                                      grid, opts);
    const size_t skip = rec.samples.empty() ? 0 : 1;  // epoch joints coincide
    rec.samples.insert(rec.samples.end(), part.samples.begin() + skip,
                       part.samples.end());
    rec.norm_drift = std::max(rec.norm_drift, part.norm_drift);
    rec.method = part.method;
    t += ep.duration;
  }
  return rec;
}

}  // namespace exsim
