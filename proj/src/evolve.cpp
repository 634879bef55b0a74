#include "exsim/evolve.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "exsim/units.hpp"

namespace exsim {

namespace {

using cplx = std::complex<double>;
constexpr cplx I{0.0, 1.0};

bool same_realization(const std::shared_ptr<const DisorderRealization>& a,
                      const std::shared_ptr<const DisorderRealization>& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return a->spec.extent == b->spec.extent && a->occupied == b->occupied;
}

// J_0..J_K at x >= 0, one backward Miller recurrence for the whole row.
// Uniformly accurate for the large orders/arguments the Chebyshev expansion
// needs, where calling the library Bessel per order would be slower and
// less reliable in the transition region k ~ x.
std::vector<double> bessel_row(int K, double x) {
  std::vector<double> j(K + 1, 0.0);
  if (x == 0.0) {
    j[0] = 1.0;
    return j;
  }
  int start = K + static_cast<int>(std::sqrt(40.0 * (K + 1))) + 20;
  start = std::max(start, static_cast<int>(x + std::sqrt(40.0 * x)) + 20);
  if (start % 2) ++start;  // even start keeps the parity of the sum rule tidy

  double fp = 0.0;      // u_{m+1}
  double f = 1e-300;    // u_m
  double norm = 0.0;    // u_0 + 2 sum u_{2m}
  for (int m = start; m >= 1; --m) {
    double fm = (2.0 * m / x) * f - fp;
    fp = f;
    f = fm;
    const int ord = m - 1;
    if (ord <= K) j[ord] = f;
    if (ord % 2 == 0) norm += (ord == 0 ? 1.0 : 2.0) * f;
    if (std::abs(f) > 1e250) {
      fp *= 1e-250;
      f *= 1e-250;
      norm *= 1e-250;
      for (double& v : j) v *= 1e-250;
    }
  }
  for (double& v : j) v /= norm;
  return j;
}

int chebyshev_order(double x) {
  return static_cast<int>(x + 11.0 * std::cbrt(x + 1.0)) + 20;
}

// psi -> exp(-i (H + diag(extra)) dt) psi for dt >= 0 with the spectrum
// enclosed in [center - radius, center + radius].
void cheb_core(const HamiltonianMatrix& h, const double* extra,
               Eigen::VectorXcd& psi, double dt, double center, double radius) {
  const int n = h.n;
  if (radius <= 0.0) {
    psi *= std::exp(-I * center * dt);
    return;
  }
  const double x = radius * dt;
  int K = chebyshev_order(x);
  std::vector<double> j = bessel_row(K, x);
  while (K > 1 && std::abs(j[K]) < 1e-17) --K;

  const double inv_r = 1.0 / radius;
  auto scaled_apply = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
    for (int i = 0; i < n; ++i) {
      cplx acc = (h.diag[i] + (extra ? extra[i] : 0.0) - center) * in[i];
      for (int p = h.row_ptr[i]; p < h.row_ptr[i + 1]; ++p) {
        acc += h.val[p] * in[h.col[p]];
      }
      out[i] = acc * inv_r;
    }
  };

  Eigen::VectorXcd t0 = psi, t1(n), t2(n), acc(n);
  scaled_apply(t0, t1);
  // c_k = (2 - delta_k0) (-i)^k J_k(x)
  cplx ck = -I * (2.0 * j[1]);
  for (int i = 0; i < n; ++i) acc[i] = j[0] * t0[i] + ck * t1[i];
  cplx ik = -1.0;  // (-i)^2
  for (int k = 2; k <= K; ++k) {
    scaled_apply(t1, t2);
    for (int i = 0; i < n; ++i) t2[i] = 2.0 * t2[i] - t0[i];
    ck = ik * (2.0 * j[k]);
    for (int i = 0; i < n; ++i) acc[i] += ck * t2[i];
    ik *= -I;
    t0.swap(t1);
    t1.swap(t2);
  }
  const cplx phase = std::exp(-I * center * dt);
  for (int i = 0; i < n; ++i) psi[i] = phase * acc[i];
}

// Handles either sign of dt and chunks very long evolutions.
void cheb_apply_signed(const HamiltonianMatrix& h, const double* extra,
                       Eigen::VectorXcd& psi, double dt, double center,
                       double radius) {
  if (dt == 0.0) return;
  if (dt < 0.0) {
    // H is real symmetric, so U(-t) = conj(U(t)) elementwise.
    psi = psi.conjugate();
    cheb_apply_signed(h, extra, psi, -dt, center, radius);
    psi = psi.conjugate();
    return;
  }
  const double x_max = 5000.0;
  double remaining = dt;
  while (remaining > 0.0) {
    const double step = radius > 0.0 ? std::min(remaining, x_max / radius) : remaining;
    cheb_core(h, extra, psi, step, center, radius);
    remaining -= step;
  }
}

void bounds_with_extra(const HamiltonianMatrix& h, const std::vector<double>& extra,
                       double& center, double& radius) {
  h.spectral_bounds(center, radius);
  if (!extra.empty()) {
    const auto [lo, hi] = std::minmax_element(extra.begin(), extra.end());
    center += 0.5 * (*lo + *hi);
    radius += 0.5 * (*hi - *lo);
  }
  radius = radius * (1.0 + 1e-12) + 1e-30;
}

}  // namespace

ExcitonState apply_phase_mask(const ExcitonState& state, const PhaseMask& mask) {
  if (!same_realization(state.realization, mask.realization)) {
    throw WavepacketError("phase mask and state belong to different realizations");
  }
  if (static_cast<int>(mask.phi.size()) != state.size()) {
    throw WavepacketError("phase mask size does not match the state basis");
  }
  ExcitonState out = state;
  for (int i = 0; i < out.size(); ++i) out.amp[i] *= std::exp(-I * mask.phi[i]);
  return out;
}

PhaseMask combine_masks(const PhaseMask& a, const PhaseMask& b) {
  if (!same_realization(a.realization, b.realization) || a.phi.size() != b.phi.size()) {
    throw WavepacketError("cannot combine masks from different realizations");
  }
  PhaseMask out = a;
  for (size_t i = 0; i < out.phi.size(); ++i) out.phi[i] += b.phi[i];
  return out;
}

PhaseMask mask_from_cells(std::shared_ptr<const DisorderRealization> real,
                          const std::function<double(std::array<int, 2>)>& phi) {
  PhaseMask m;
  m.realization = real;
  const auto cells = real->occupied_cells();
  m.phi.resize(cells.size());
  for (size_t b = 0; b < cells.size(); ++b) m.phi[b] = phi(real->spec.coords(cells[b]));
  return m;
}

Propagator::Propagator(const HamiltonianMatrix& h, Method m) : m_h(&h), m_method(m) {
  if (m_method == Method::automatic) {
    m_method = h.n <= dense_cutoff ? Method::dense : Method::chebyshev;
  }
  if (m_method == Method::dense) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.dense());
    if (es.info() != Eigen::Success) {
      throw NumericalFailure("eigendecomposition of the Hamiltonian failed");
    }
    m_evals = es.eigenvalues();
    m_evecs = es.eigenvectors();
  } else {
    h.spectral_bounds(m_center, m_radius);
    m_radius = m_radius * (1.0 + 1e-12) + 1e-30;
  }
}

void Propagator::apply_inplace(Eigen::VectorXcd& psi, double dt) const {
  if (psi.size() != m_h->n) throw NumericalFailure("state size does not match H");
  if (m_method == Method::dense) {
    Eigen::VectorXcd coeff = m_evecs.transpose() * psi;
    for (int i = 0; i < coeff.size(); ++i) coeff[i] *= std::exp(-I * m_evals[i] * dt);
    psi = m_evecs * coeff;
  } else {
    cheb_apply_signed(*m_h, nullptr, psi, dt, m_center, m_radius);
  }
}

Eigen::VectorXcd Propagator::apply(const Eigen::VectorXcd& psi, double dt) const {
  Eigen::VectorXcd out = psi;
  apply_inplace(out, dt);
  return out;
}

ExcitonState Propagator::apply(const ExcitonState& state, double dt) const {
  ExcitonState out = state;
  apply_inplace(out.amp, dt);
  return out;
}

Eigen::VectorXcd Propagator::column(int basis_index, double dt) const {
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(m_h->n);
  e[basis_index] = 1.0;
  apply_inplace(e, dt);
  return e;
}

ExcitonState propagate_static(const HamiltonianMatrix& h, const ExcitonState& s,
                              double dt, Propagator::Method m) {
  return Propagator(h, m).apply(s, dt);
}

void chebyshev_apply(const HamiltonianMatrix& h, const std::vector<double>& extra_diag,
                     Eigen::VectorXcd& psi, double dt) {
  if (!extra_diag.empty() && static_cast<int>(extra_diag.size()) != h.n) {
    throw NumericalFailure("extra diagonal size does not match H");
  }
  double center, radius;
  bounds_with_extra(h, extra_diag, center, radius);
  cheb_apply_signed(h, extra_diag.empty() ? nullptr : extra_diag.data(), psi, dt,
                    center, radius);
}

double PulseSchedule::envelope_at(double t) const {
  const double u = t - t_start;
  if (u < 0.0 || u > duration || duration <= 0.0) return 0.0;
  if (envelope == Envelope::sin2) {
    const double s = std::sin(units::pi * u / duration);
    return s * s;
  }
  // Tabulated: linear interpolation, clamped ends.
  if (tab_t.size() < 2) return 0.0;
  auto it = std::upper_bound(tab_t.begin(), tab_t.end(), u);
  if (it == tab_t.begin()) return tab_v.front();
  if (it == tab_t.end()) return tab_v.back();
  const size_t hi = it - tab_t.begin();
  const double w = (u - tab_t[hi - 1]) / (tab_t[hi] - tab_t[hi - 1]);
  return tab_v[hi - 1] * (1.0 - w) + tab_v[hi] * w;
}

double PulseSchedule::envelope_integral() const {
  if (duration <= 0.0) return 0.0;
  if (envelope == Envelope::sin2) return 0.5 * duration;
  double s = 0.0;
  for (size_t i = 1; i < tab_t.size(); ++i) {
    s += 0.5 * (tab_v[i] + tab_v[i - 1]) * (tab_t[i] - tab_t[i - 1]);
  }
  return s;
}

double PulseSchedule::envelope_sq_integral() const {
  if (duration <= 0.0) return 0.0;
  if (envelope == Envelope::sin2) return 0.375 * duration;
  double s = 0.0;
  for (size_t i = 1; i < tab_t.size(); ++i) {
    const double v0 = tab_v[i - 1], v1 = tab_v[i];
    // Exact integral of the squared linear interpolant.
    s += (v0 * v0 + v0 * v1 + v1 * v1) / 3.0 * (tab_t[i] - tab_t[i - 1]);
  }
  return s;
}

PhaseMask PulseSchedule::accumulated_mask(
    std::shared_ptr<const DisorderRealization> real) const {
  PhaseMask m;
  m.realization = std::move(real);
  const double i1 = envelope_integral();
  const double i2 = envelope_sq_integral();
  m.phi.resize(c1.size());
  for (size_t i = 0; i < c1.size(); ++i) {
    m.phi[i] = c1[i] * i1 + (c2.empty() ? 0.0 : c2[i] * i2);
  }
  return m;
}

namespace {

struct PulseStepper {
  const HamiltonianMatrix& h;
  const PulseSchedule& pulse;
  double center_base, radius_base, c1_span, c2_span;
  std::vector<double> eps;

  PulseStepper(const HamiltonianMatrix& hh, const PulseSchedule& p) : h(hh), pulse(p) {
    h.spectral_bounds(center_base, radius_base);
    auto span = [](const std::vector<double>& v) {
      if (v.empty()) return 0.0;
      const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      return std::max(std::abs(*lo), std::abs(*hi));
    };
    c1_span = span(p.c1);
    c2_span = span(p.c2);
    eps.assign(h.n, 0.0);
  }

  // One frozen-midpoint substep psi -> exp(-i H(tm) dt) psi.
  void step(Eigen::VectorXcd& psi, double t, double dt) {
    const double e = pulse.envelope_at(t + 0.5 * dt);
    const bool quad = !pulse.c2.empty();
    for (int i = 0; i < h.n; ++i) {
      eps[i] = pulse.c1[i] * e + (quad ? pulse.c2[i] * e * e : 0.0);
    }
    // Envelope magnitudes are <= 1, so the site-energy excursion is bounded
    // by the coefficient spans; widen the enclosure accordingly.
    const double pad = c1_span + c2_span;
    cheb_apply_signed(h, eps.data(), psi, dt, center_base,
                      radius_base * (1.0 + 1e-12) + pad + 1e-30);
  }
};

RunSample make_sample(const HamiltonianMatrix& h, const ExcitonState& st, double t,
                      const EvolveOptions& opts) {
  RunSample s;
  s.t = t;
  s.norm = st.amp.norm();
  s.energy = s.norm > 0 ? h.expectation(st.amp) / (s.norm * s.norm) : 0.0;
  const PacketStats ps = packet_stats(st);
  s.center = ps.center;
  s.width = ps.width;
  s.participation = ps.participation;
  if (opts.target[0] >= 0) {
    s.p_target = target_probability(st, opts.target);
  }
  if (opts.record_k) {
    const KSpectrum ks = k_transform(st);
    s.k_center[0] = k_stats(ks, 0).center;
    if (st.realization->spec.dims == 2) s.k_center[1] = k_stats(ks, 1).center;
  }
  return s;
}

}  // namespace

RunRecord propagate_pulsed(const HamiltonianMatrix& h, const PulseSchedule& pulse,
                           ExcitonState& state, const std::vector<double>& t_grid,
                           const EvolveOptions& opts) {
  if (t_grid.empty()) throw NumericalFailure("empty sample grid");
  if (!std::is_sorted(t_grid.begin(), t_grid.end())) {
    throw NumericalFailure("sample grid must be ascending");
  }
  if (state.size() != h.n || !same_realization(state.realization, h.realization)) {
    throw WavepacketError("state does not match the Hamiltonian basis");
  }
  if (!pulse.empty() && static_cast<int>(pulse.c1.size()) != h.n) {
    throw NumericalFailure("pulse coefficient size does not match H");
  }

  const double t_first = t_grid.front(), t_last = t_grid.back();
  const double p0 = pulse.t_start, p1 = pulse.t_start + pulse.duration;
  const bool has_pulse = !pulse.empty() && p1 > t_first && p0 < t_last;

  // Event timeline: sample points, pulse edges, snapshot times.
  struct Event {
    double t;
    bool sample = false, snapshot = false, pulse_start = false, pulse_end = false;
  };
  std::vector<Event> ev;
  for (double t : t_grid) ev.push_back({t, true, false, false, false});
  if (has_pulse) {
    if (p0 >= t_first) ev.push_back({p0, false, false, true, false});
    if (p1 <= t_last) ev.push_back({p1, false, false, false, true});
  }
  for (double t : opts.snapshot_times) {
    if (t >= t_first && t <= t_last) ev.push_back({t, false, true, false, false});
  }
  std::sort(ev.begin(), ev.end(), [](const Event& a, const Event& b) { return a.t < b.t; });
  std::vector<Event> merged;
  for (const Event& e : ev) {
    if (!merged.empty() && merged.back().t == e.t) {
      merged.back().sample |= e.sample;
      merged.back().snapshot |= e.snapshot;
      merged.back().pulse_start |= e.pulse_start;
      merged.back().pulse_end |= e.pulse_end;
    } else {
      merged.push_back(e);
    }
  }

  Propagator free_prop(h, opts.method);
  PulseStepper stepper(h, pulse);
  RunRecord rec;
  rec.method = free_prop.chosen() == Propagator::Method::dense ? "dense" : "chebyshev";
  rec.min_step = pulse.duration;

  Eigen::VectorXcd psi_at_pulse_start;
  double t = t_first;
  double h_step = has_pulse ? pulse.duration / 64.0 : 0.0;
  const double h_floor = has_pulse ? pulse.duration * 1e-12 : 0.0;

  auto handle_event = [&](const Event& e) {
    if (e.pulse_start && opts.sudden_fidelity) psi_at_pulse_start = state.amp;
    if (e.pulse_end && opts.sudden_fidelity && psi_at_pulse_start.size() == h.n) {
      Eigen::VectorXcd ideal = psi_at_pulse_start;
      free_prop.apply_inplace(ideal, 0.5 * pulse.duration);
      const PhaseMask m = pulse.accumulated_mask(state.realization);
      for (int i = 0; i < h.n; ++i) ideal[i] *= std::exp(-I * m.phi[i]);
      free_prop.apply_inplace(ideal, 0.5 * pulse.duration);
      const double n2 = state.amp.squaredNorm() * ideal.squaredNorm();
      rec.sudden_fidelity = n2 > 0 ? std::norm(ideal.dot(state.amp)) / n2 : 0.0;
    }
    if (e.sample) {
      const RunSample s = make_sample(h, state, e.t, opts);
      rec.norm_drift = std::max(rec.norm_drift, std::abs(s.norm - 1.0));
      rec.samples.push_back(s);
    }
    if (e.snapshot) rec.snapshots.emplace_back(e.t, state);
  };

  handle_event(merged.front());
  Eigen::VectorXcd trial1(h.n), trial2(h.n);

  for (size_t iev = 1; iev < merged.size(); ++iev) {
    const double tb = merged[iev].t;
    // Pulse edges are events, so each interval is wholly inside or outside.
    const bool inside = has_pulse && t >= p0 && tb <= p1;
    if (!inside || tb <= t) {
      if (tb > t) free_prop.apply_inplace(state.amp, tb - t);
    } else {
      // Adaptive frozen-midpoint substeps with step-doubling control.
      while (t < tb) {
        if (tb - t <= h_floor) break;  // residue below time resolution
        double dt = std::min(h_step, tb - t);
        for (;;) {
          trial1 = state.amp;
          stepper.step(trial1, t, dt);
          trial2 = state.amp;
          stepper.step(trial2, t, 0.5 * dt);
          stepper.step(trial2, t + 0.5 * dt, 0.5 * dt);
          const double err = (trial1 - trial2).norm();
          const double budget = opts.tol * dt / pulse.duration;
          if (err <= budget || dt <= h_floor) {
            if (err > budget) {
              throw NumericalFailure(
                  "pulsed evolution cannot meet the tolerance: step " +
                  std::to_string(dt) + " s at t = " + std::to_string(t) +
                  " s still has error " + std::to_string(err));
            }
            state.amp = trial2;
            t += dt;
            ++rec.steps_accepted;
            rec.min_step = std::min(rec.min_step, dt);
            const double grow =
                err > 0.0 ? 0.9 * std::cbrt(budget / err) : 2.0;
            h_step = dt * std::clamp(grow, 0.3, 2.0);
            break;
          }
          ++rec.steps_rejected;
          dt *= std::clamp(0.9 * std::cbrt(budget / err), 0.1, 0.7);
        }
      }
    }
    t = tb;
    handle_event(merged[iev]);
  }
  return rec;
}

ExcitonState propagate_pulsed_fixed(const HamiltonianMatrix& h,
                                    const PulseSchedule& pulse,
                                    const ExcitonState& state, double t0, double t1,
                                    int n_steps) {
  if (n_steps < 1) throw NumericalFailure("need at least one step");
  ExcitonState out = state;
  PulseStepper stepper(h, pulse);
  const double dt = (t1 - t0) / n_steps;
  for (int i = 0; i < n_steps; ++i) stepper.step(out.amp, t0 + i * dt, dt);
  return out;
}

ExcitonState propagate_bloch(const ExcitonState& state,
                             const std::function<double(double, double)>& energy,
                             double t) {
  const LatticeSpec& spec = state.realization->spec;
  if (state.realization->occupied_count() != spec.cell_count()) {
    throw WavepacketError("spectral propagation needs a defect-free lattice");
  }
  KSpectrum ks = k_transform(state);
  const int nx = spec.extent[0];
  for (int flat = 0; flat < spec.cell_count(); ++flat) {
    const double kx = ks.k_value(0, flat % nx);
    const double ky = spec.dims == 2 ? ks.k_value(1, flat / nx) : 0.0;
    ks.g[flat] *= std::exp(-I * energy(kx, ky) * t);
  }
  const Eigen::VectorXcd full = k_inverse(ks);
  ExcitonState out = state;
  for (int i = 0; i < spec.cell_count(); ++i) out.amp[i] = full[i];
  return out;
}

}  // namespace exsim
