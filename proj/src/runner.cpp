#include "exsim/runner.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <vector>

#include "exsim/control.hpp"
#include "exsim/coupling.hpp"
#include "exsim/disorder_focus.hpp"
#include "exsim/evolve.hpp"
#include "exsim/lattice.hpp"
#include "exsim/output.hpp"
#include "exsim/presets.hpp"
#include "exsim/units.hpp"
#include "exsim/wavepacket.hpp"

namespace exsim {

namespace {

constexpr const char* kVersion = "exsim 1.0.0";

struct Ctx {
  const ConfigFile* cfg = nullptr;
  std::string kind;
  std::uint64_t seed = 1;
  int jobs = 1;
  double tol = 1e-9;
  LatticeSpec spec;
  CouplingModel model;
};

LatticeSpec parse_lattice(const ConfigFile& cfg) {
  const int dims = static_cast<int>(cfg.get_int("lattice", "dims"));
  const std::vector<long> ext = cfg.get_int_list("lattice", "extent");
  if (static_cast<int>(ext.size()) != dims)
    throw ConfigError("[lattice] extent: expected " + std::to_string(dims) +
                      " value(s) for dims = " + std::to_string(dims));
  std::array<int, 2> extent = {static_cast<int>(ext[0]),
                               dims == 2 ? static_cast<int>(ext[1]) : 1};
  const double spacing = cfg.get_length("lattice", "spacing");
  return build_lattice(dims, extent, spacing);
}

CouplingModel parse_coupling(const ConfigFile& cfg) {
  CouplingModel m;
  const std::string kind = cfg.get_string("coupling", "kind");
  if (kind == "nearest_neighbor") {
    m.kind = CouplingKind::nearest_neighbor;
  } else if (kind == "dipolar") {
    m.kind = CouplingKind::dipolar;
  } else {
    throw ConfigError("[coupling] kind: unknown value '" + kind +
                      "'; expected nearest_neighbor or dipolar");
  }
  m.alpha = cfg.get_frequency("coupling", "alpha");
  if (m.kind == CouplingKind::dipolar) {
    m.theta = cfg.get_angle_or("coupling", "theta", units::pi / 2);
    m.phi = cfg.get_angle_or("coupling", "phi", 0.0);
    m.truncation = cfg.get_plain_or("coupling", "truncation", 20.0);
  }
  m.site_energy = cfg.get_frequency_or("coupling", "site_energy", 0.0);
  const std::string b = cfg.get_string_or("coupling", "boundary", "open");
  if (b == "open") {
    m.boundary = Boundary::open;
  } else if (b == "periodic") {
    m.boundary = Boundary::periodic;
  } else {
    throw ConfigError("[coupling] boundary: unknown value '" + b +
                      "'; expected open or periodic");
  }
  return m;
}

std::array<int, 2> parse_cell(const ConfigFile& cfg, const std::string& sec,
                              const std::string& key, const LatticeSpec& spec) {
  const std::vector<long> v = cfg.get_int_list(sec, key);
  if (static_cast<int>(v.size()) != spec.dims)
    throw ConfigError("[" + sec + "] " + key + ": expected " +
                      std::to_string(spec.dims) + " coordinate(s)");
  std::array<int, 2> c = {static_cast<int>(v[0]),
                          spec.dims == 2 ? static_cast<int>(v[1]) : 0};
  if (!spec.contains(c))
    throw ConfigError("[" + sec + "] " + key + ": cell outside the lattice");
  return c;
}

std::array<double, 2> parse_point(const ConfigFile& cfg, const std::string& sec,
                                  const std::string& key, const LatticeSpec& spec) {
  const std::vector<double> v = cfg.get_plain_list(sec, key);
  if (static_cast<int>(v.size()) != spec.dims)
    throw ConfigError("[" + sec + "] " + key + ": expected " +
                      std::to_string(spec.dims) + " coordinate(s)");
  return {v[0], spec.dims == 2 ? v[1] : 0.0};
}

// Parsed [initial_state] plus the information focus predictions need.
struct InitialSpec {
  std::string kind;
  std::array<double, 2> center = {0, 0};  // cells
  std::array<double, 2> sigma = {0, 0};   // m, gaussian only
  std::array<double, 2> carrier = {0, 0}; // rad/m
  std::array<int, 2> target = {0, 0};     // bessel target
  double tau = 0;                          // bessel refocus delay

  StateFactory factory;
};

InitialSpec parse_initial(const ConfigFile& cfg, const LatticeSpec& spec,
                          const CouplingModel& model) {
  InitialSpec out;
  out.kind = cfg.get_string("initial_state", "kind");
  const double a = spec.spacing;
  if (out.kind == "gaussian") {
    out.center = parse_point(cfg, "initial_state", "center", spec);
    const double sigma = cfg.get_length_sites("initial_state", "sigma", a);
    out.sigma = {sigma, sigma};
    std::vector<double> carr(spec.dims, 0.0);
    if (cfg.has("initial_state", "carrier")) {
      carr = cfg.get_plain_list("initial_state", "carrier");
      if (static_cast<int>(carr.size()) != spec.dims)
        throw ConfigError("[initial_state] carrier: expected " +
                          std::to_string(spec.dims) + " value(s), rad per site");
    }
    out.carrier = {carr[0] / a, spec.dims == 2 ? carr[1] / a : 0.0};
    const auto center = out.center;
    const auto sig = out.sigma;
    const auto k0 = out.carrier;
    out.factory = [center, sig, k0](std::shared_ptr<const DisorderRealization> r) {
      return make_gaussian(std::move(r), center, sig, k0);
    };
  } else if (out.kind == "uniform" || out.kind == "eigenstate") {
    std::vector<double> carr(spec.dims, 0.0);
    if (out.kind == "eigenstate" && cfg.has("initial_state", "carrier"))
      carr = cfg.get_plain_list("initial_state", "carrier");
    if (static_cast<int>(carr.size()) != spec.dims)
      throw ConfigError("[initial_state] carrier: expected " +
                        std::to_string(spec.dims) + " value(s), rad per site");
    out.carrier = {carr[0] / a, spec.dims == 2 ? carr[1] / a : 0.0};
    const auto k0 = out.carrier;
    out.factory = [k0](std::shared_ptr<const DisorderRealization> r) {
      return make_eigenstate(std::move(r), k0);
    };
  } else if (out.kind == "single_site") {
    const auto cell = parse_cell(cfg, "initial_state", "center", spec);
    out.center = {static_cast<double>(cell[0]), static_cast<double>(cell[1])};
    out.factory = [cell](std::shared_ptr<const DisorderRealization> r) {
      return make_single_site(std::move(r), cell);
    };
  } else if (out.kind == "bessel_focus") {
    out.target = parse_cell(cfg, "initial_state", "target", spec);
    out.tau = cfg.get_time("initial_state", "tau");
    const auto tgt = out.target;
    const double tau = out.tau;
    const double alpha = model.alpha;
    out.factory = [tgt, tau, alpha](std::shared_ptr<const DisorderRealization> r) {
      return make_bessel_focus(std::move(r), tgt, tau, alpha);
    };
  } else {
    throw ConfigError("[initial_state] kind: unknown value '" + out.kind + "'");
  }
  return out;
}

std::vector<double> parse_time_grid(const ConfigFile& cfg) {
  const double t_end = cfg.get_time("time_grid", "t_end");
  const long samples = cfg.get_int("time_grid", "samples");
  if (t_end <= 0) throw ConfigError("[time_grid] t_end: must be positive");
  if (samples < 2) throw ConfigError("[time_grid] samples: need at least 2");
  std::vector<double> grid(static_cast<std::size_t>(samples));
  for (long i = 0; i < samples; ++i)
    grid[static_cast<std::size_t>(i)] =
        t_end * static_cast<double>(i) / static_cast<double>(samples - 1);
  return grid;
}

// Inserts t into an ascending grid unless an existing point is within eps.
void insert_time(std::vector<double>& grid, double t) {
  if (grid.empty()) {
    grid.push_back(t);
    return;
  }
  const double eps = 1e-12 * std::max(std::abs(grid.back()), std::abs(t)) + 1e-30;
  auto it = std::lower_bound(grid.begin(), grid.end(), t);
  if (it != grid.end() && std::abs(*it - t) <= eps) return;
  if (it != grid.begin() && std::abs(*(it - 1) - t) <= eps) return;
  grid.insert(it, t);
}

FieldConfig parse_field(const ConfigFile& cfg) {
  FieldConfig fc;
  if (!cfg.has_section("field")) return fc;
  if (cfg.has("field", "e_dc")) fc.e_dc = cfg.get_efield("field", "e_dc");
  fc.theta = cfg.get_angle_or("field", "theta", 0.0);
  fc.phi = cfg.get_angle_or("field", "phi", 0.0);
  if (cfg.has("field", "e_ac")) fc.e_ac = cfg.get_efield("field", "e_ac");
  if (cfg.has("field", "intensity")) fc.intensity = cfg.get_intensity("field", "intensity");
  if (cfg.has("field", "waist")) fc.waist = cfg.get_length("field", "waist");
  if (cfg.has("field", "wavelength")) fc.wavelength = cfg.get_length("field", "wavelength");
  if (cfg.has("field", "z_offset")) fc.z_offset = cfg.get_length("field", "z_offset");
  if (cfg.has("field", "b_rot")) fc.b_rot = cfg.get_frequency("field", "b_rot");
  if (cfg.has("field", "mu")) fc.mu = cfg.get_dipole("field", "mu");
  if (cfg.has("field", "alpha_par")) fc.alpha_par = cfg.get_polarizability("field", "alpha_par");
  if (cfg.has("field", "alpha_perp"))
    fc.alpha_perp = cfg.get_polarizability("field", "alpha_perp");
  if (cfg.has("field", "v_eg")) fc.v_eg = cfg.get_dipole("field", "v_eg");
  if (cfg.has("field", "delta_omega"))
    fc.delta_omega = cfg.get_frequency("field", "delta_omega");
  return fc;
}

int nearest_sample(const RunRecord& rec, double t) {
  int best = 0;
  double dist = std::abs(rec.samples[0].t - t);
  for (std::size_t i = 1; i < rec.samples.size(); ++i) {
    const double d = std::abs(rec.samples[i].t - t);
    if (d < dist) {
      dist = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

// Least-squares slope of y against t.
double fit_slope(const std::vector<double>& t, const std::vector<double>& y) {
  const std::size_t n = t.size();
  if (n < 2) return 0.0;
  double mt = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mt += t[i];
    my += y[i];
  }
  mt /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double num = 0, den = 0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (t[i] - mt) * (y[i] - my);
    den += (t[i] - mt) * (t[i] - mt);
  }
  return den > 0 ? num / den : 0.0;
}

double wrap_k(double dk, double spacing) {
  const double zone = units::two_pi / spacing;
  return dk - zone * std::round(dk / zone);
}

nlohmann::json sample_json(const RunSample& s) {
  return {{"t", s.t},
          {"norm", s.norm},
          {"center", {s.center[0], s.center[1]}},
          {"p_target", s.p_target}};
}

void write_snapshots(OutputWriter* w, const RunRecord& rec, const std::string& prefix,
                     nlohmann::json& listing) {
  if (!w) return;
  for (std::size_t i = 0; i < rec.snapshots.size(); ++i) {
    const std::string name = prefix + "_" + std::to_string(i) + ".txt";
    w->write_text(name, probability_grid_text(rec.snapshots[i].second));
    listing.push_back({{"t", rec.snapshots[i].first}, {"file", name}});
  }
}

// ---------------------------------------------------------------- dispersion

nlohmann::json run_dispersion(const Ctx& ctx, OutputWriter* w, bool dry) {
  const ConfigFile& cfg = *ctx.cfg;
  std::vector<double> thetas_deg = {90.0};
  if (cfg.has("dispersion", "thetas"))
    thetas_deg = cfg.get_plain_list("dispersion", "thetas");
  const long k_samples = cfg.get_int_or("dispersion", "k_samples", 401);
  if (k_samples < 3) throw ConfigError("[dispersion] k_samples: need at least 3");
  nlohmann::json summary = {{"kind", "dispersion"},
                            {"magic_angle_deg", std::acos(1.0 / std::sqrt(3.0)) * 180.0 / units::pi},
                            {"thetas_deg", thetas_deg}};
  if (dry) return summary;

  const double a = ctx.spec.spacing;
  nlohmann::json alphas = nlohmann::json::array();
  nlohmann::json files = nlohmann::json::array();
  for (std::size_t i = 0; i < thetas_deg.size(); ++i) {
    CouplingModel m = ctx.model;
    m.theta = thetas_deg[i] * units::pi / 180.0;
    alphas.push_back(coupling_element(m, 1, 0));
    std::ostringstream os;
    os << "ka,e_nn,e_lr\n";
    for (long j = 0; j < k_samples; ++j) {
      const double ka = -units::pi + units::two_pi * static_cast<double>(j) /
                                         static_cast<double>(k_samples - 1);
      const double k = ka / a;
      os << format_double(ka) << ',' << format_double(dispersion_nn(m, k, a)) << ','
         << format_double(dispersion_lr(m, k, a)) << '\n';
    }
    const std::string name = "dispersion_" + std::to_string(i) + ".csv";
    if (w) w->write_text(name, os.str());
    files.push_back({{"theta_deg", thetas_deg[i]}, {"file", name}});
  }
  summary["alpha_nn"] = alphas;  // rad/s nearest-neighbor coupling per angle
  summary["files"] = files;
  return summary;
}

// ---------------------------------------------------------------------- kick

nlohmann::json run_kick(const Ctx& ctx, OutputWriter* w, bool dry) {
  const ConfigFile& cfg = *ctx.cfg;
  const InitialSpec init = parse_initial(cfg, ctx.spec, ctx.model);
  std::vector<double> grid = parse_time_grid(cfg);
  std::vector<double> snaps;
  if (cfg.has("time_grid", "snapshots")) snaps = cfg.get_time_list("time_grid", "snapshots");

  const std::string proto = cfg.get_string("protocol", "kind");
  if (proto != "linear_kick")
    throw ConfigError("[protocol] kind: kick experiments need linear_kick");
  const std::string realize = cfg.get_string_or("protocol", "realize", "mask");

  std::vector<double> delta_sites;  // rad per site, per axis
  FieldConfig fc;
  std::string pulse_kind;
  double duration = 0, gradient = 0, z_first = 0, dc_center = 0;
  if (realize == "mask") {
    delta_sites = cfg.get_plain_list("protocol", "delta");
    if (static_cast<int>(delta_sites.size()) != ctx.spec.dims)
      throw ConfigError("[protocol] delta: expected " + std::to_string(ctx.spec.dims) +
                        " value(s), rad per site");
  } else if (realize == "pulse") {
    pulse_kind = cfg.get_string("protocol", "pulse");
    if (pulse_kind != "dc" && pulse_kind != "beam")
      throw ConfigError("[protocol] pulse: expected dc or beam");
    fc = parse_field(cfg);
    duration = cfg.get_time("pulse", "duration");
    if (grid.back() < duration)
      throw ConfigError("[time_grid] t_end: must cover the pulse duration");
    if (pulse_kind == "dc") {
      gradient = cfg.get_efield("pulse", "gradient");
      dc_center = cfg.get_plain_or("pulse", "center", init.center[0]);
    } else {
      if (ctx.spec.dims != 1)
        throw ConfigError("[protocol] pulse = beam: beam kicks need a 1D array");
      z_first = cfg.get_length("pulse", "z_first");
    }
  } else {
    throw ConfigError("[protocol] realize: expected mask or pulse");
  }
  if (dry) return {{"kind", "kick"}};

  auto real = std::make_shared<const DisorderRealization>(full_lattice(ctx.spec));
  const HamiltonianMatrix h = build_hamiltonian(ctx.model, real);
  ExcitonState state = init.factory(real);

  const KSpectrum ks0 = k_transform(state);
  const KStats kst0 = k_stats(ks0, 0);
  if (w) w->write_text("kspec_initial.csv", kspectrum_csv(ks0));

  EvolveOptions opts;
  opts.tol = ctx.tol;
  opts.record_k = true;

  nlohmann::json summary = {{"kind", "kick"}, {"realize", realize}};
  RunRecord rec;
  double measured_at = 0;  // time the shift is measured at
  ExcitonState measured_state = state;
  if (realize == "mask") {
    std::array<double, 2> dk = {delta_sites[0] / ctx.spec.spacing,
                                ctx.spec.dims == 2 ? delta_sites[1] / ctx.spec.spacing : 0.0};
    state = apply_phase_mask(state, linear_kick_mask(real, dk));
    measured_state = state;
    opts.snapshot_times = snaps;
    rec = propagate_pulsed(h, PulseSchedule::none(), state, grid, opts);
    summary["delta_analytic"] = dk[0];  // rad/m along the chain
  } else {
    PulseSchedule pulse;
    double analytic = 0;
    if (pulse_kind == "dc") {
      pulse = make_dc_kick_schedule(real, fc, gradient, duration, dc_center);
      analytic = pulse_to_delta_dc(fc, gradient, duration, ctx.spec.spacing);
    } else {
      pulse = make_beam_kick_schedule(real, fc, duration, z_first);
      analytic = pulse_to_delta_beam(fc, duration);
    }
    opts.snapshot_times = snaps;
    opts.snapshot_times.push_back(duration);  // measure right at pulse end
    opts.sudden_fidelity = true;
    rec = propagate_pulsed(h, pulse, state, grid, opts);
    for (const auto& [t, st] : rec.snapshots) {
      if (std::abs(t - duration) < 1e-12 * duration + 1e-30) measured_state = st;
    }
    measured_at = duration;
    summary["pulse"] = pulse_kind;
    summary["delta_analytic"] = analytic;
    summary["sudden_fidelity"] = rec.sudden_fidelity;
    // Equivalent instantaneous mask: rad-per-site slope across the array
    // center (diagnostic for how linear the accumulated phase really is).
    const PhaseMask acc = pulse.accumulated_mask(real);
    const int mid = ctx.spec.extent[0] / 2;
    summary["accumulated_phase_slope"] = acc.phi[static_cast<std::size_t>(mid + 1)] -
                                         acc.phi[static_cast<std::size_t>(mid)];
  }

  const KSpectrum ks1 = k_transform(measured_state);
  const KStats kst1 = k_stats(ks1, 0);
  if (w) w->write_text("kspec_kicked.csv", kspectrum_csv(ks1));
  const double shift = wrap_k(kst1.center - kst0.center, ctx.spec.spacing);
  summary["measured_at"] = measured_at;
  summary["k_shift_measured"] = shift;  // rad/m
  summary["k_shift_measured_per_site"] = shift * ctx.spec.spacing;
  const double analytic = summary["delta_analytic"].get<double>();
  if (analytic != 0)
    summary["deviation_fraction"] = std::abs(shift - analytic) / std::abs(analytic);
  summary["norm_drift"] = rec.norm_drift;
  summary["method"] = rec.method;
  summary["steps_accepted"] = rec.steps_accepted;
  summary["steps_rejected"] = rec.steps_rejected;
  summary["final"] = sample_json(rec.samples.back());
  if (w) {
    w->write_text("run.csv", run_record_csv(rec));
    nlohmann::json listing = nlohmann::json::array();
    write_snapshots(w, rec, "grid", listing);
    summary["snapshots"] = listing;
  }
  return summary;
}

// --------------------------------------------------------------------- focus

nlohmann::json run_focus(const Ctx& ctx, OutputWriter* w, bool dry) {
  const ConfigFile& cfg = *ctx.cfg;
  if ((ctx.kind == "focus1d") != (ctx.spec.dims == 1))
    throw ConfigError("[lattice] dims: " + ctx.kind + " needs a " +
                      (ctx.kind == "focus1d" ? std::string("1D") : std::string("2D")) +
                      " lattice");
  const InitialSpec init = parse_initial(cfg, ctx.spec, ctx.model);
  std::vector<double> grid = parse_time_grid(cfg);
  std::vector<double> snaps;
  if (cfg.has("time_grid", "snapshots")) snaps = cfg.get_time_list("time_grid", "snapshots");

  if (cfg.get_string("protocol", "kind") != "quadratic_lens")
    throw ConfigError("[protocol] kind: focus experiments need quadratic_lens");
  const double phi0 = cfg.get_plain("protocol", "phi0");
  const std::array<int, 2> target = parse_cell(cfg, "protocol", "target", ctx.spec);
  const double fraction = cfg.get_plain_or("disorder", "vacancy_fraction", 0.0);
  if (fraction < 0 || fraction >= 1)
    throw ConfigError("[disorder] vacancy_fraction: expected a value in [0, 1)");

  // Clean-lattice focus-time prediction from the matched analytic model.
  const double alpha_nn = coupling_element(ctx.model, 1, 0);
  FocusPrediction pred;
  if (init.kind == "gaussian") {
    pred = predict_focus_gaussian(init.sigma[0], phi0, alpha_nn, ctx.spec.spacing);
  } else {
    pred = predict_focus_planewave(ctx.spec.extent[0], phi0, alpha_nn, ctx.spec.spacing);
  }
  if (!pred.sign_ok)
    throw ConfigError("[protocol] phi0: sign defocuses this coupling (t* < 0)");
  if (dry) return {{"kind", ctx.kind}};

  // Realization; vacant targets are resampled deterministically.
  std::shared_ptr<const DisorderRealization> real;
  int attempts = 1;
  if (fraction == 0.0) {
    real = std::make_shared<const DisorderRealization>(full_lattice(ctx.spec));
  } else {
    for (; attempts <= 1000; ++attempts) {
      auto cand = std::make_shared<const DisorderRealization>(sample_disorder(
          ctx.spec, fraction, realization_seed(ctx.seed, 0, attempts - 1)));
      if (cand->is_occupied(ctx.spec.flat_index(target))) {
        real = std::move(cand);
        break;
      }
    }
    if (!real)
      throw ConfigError("[disorder] vacancy_fraction: target cell vacant in 1000 draws");
  }

  const HamiltonianMatrix h = build_hamiltonian(ctx.model, real);
  const ExcitonState initial = init.factory(real);
  const double p0 = target_probability(initial, target);

  insert_time(grid, pred.t_star);
  EvolveOptions opts;
  opts.tol = ctx.tol;
  opts.target = target;
  opts.record_k = ctx.spec.dims == 1;
  opts.snapshot_times = snaps;
  insert_time(opts.snapshot_times, 0.0);
  insert_time(opts.snapshot_times, pred.t_star);

  // Baseline: free evolution of the unmodified packet.
  ExcitonState plain = initial;
  RunRecord rec_plain = propagate_pulsed(h, PulseSchedule::none(), plain, grid, opts);

  // Lensed run.
  ExcitonState masked = apply_phase_mask(initial, quadratic_lens_mask(
      real, phi0, {static_cast<double>(target[0]), static_cast<double>(target[1])}));
  const KSpectrum ks_post = k_transform(masked);
  RunRecord rec_mask = propagate_pulsed(h, PulseSchedule::none(), masked, grid, opts);

  // Peak of the masked target probability over the sampled window.
  int peak = 0;
  for (std::size_t i = 1; i < rec_mask.samples.size(); ++i)
    if (rec_mask.samples[i].p_target > rec_mask.samples[peak].p_target)
      peak = static_cast<int>(i);
  const int at_star = nearest_sample(rec_mask, pred.t_star);

  nlohmann::json summary = {{"kind", ctx.kind},
                            {"phi0", phi0},
                            {"target", {target[0], target[1]}},
                            {"vacancy_fraction", fraction},
                            {"attempts", attempts},
                            {"seed", real->seed},
                            {"occupied", real->occupied_count()}};
  summary["predicted"] = {{"t_star", pred.t_star},
                          {"sigma_k", pred.sigma_k},
                          {"sigma_xf", pred.sigma_xf},
                          {"delta_k", pred.delta_k},
                          {"optimal_phi0_gaussian",
                           optimal_lens_gaussian(init.sigma[0], ctx.spec.spacing)},
                          {"optimal_phi0_planewave",
                           optimal_lens_planewave(ctx.spec.extent[0])}};
  summary["p_target_initial"] = p0;
  summary["p_target_star_masked"] = rec_mask.samples[at_star].p_target;
  summary["p_target_star_unmasked"] = rec_plain.samples[at_star].p_target;
  summary["t_peak"] = rec_mask.samples[peak].t;
  summary["p_target_peak"] = rec_mask.samples[peak].p_target;
  if (p0 > 0) {
    summary["eta_star"] = rec_mask.samples[at_star].p_target / p0;
    summary["eta_peak"] = rec_mask.samples[peak].p_target / p0;
  }
  if (rec_plain.samples[at_star].p_target > chi_denominator_floor)
    summary["chi_star"] =
        rec_mask.samples[at_star].p_target / rec_plain.samples[at_star].p_target;
  summary["k_sigma_post_mask"] = k_stats(ks_post, 0).sigma;
  summary["norm_drift"] = std::max(rec_mask.norm_drift, rec_plain.norm_drift);
  summary["method"] = rec_mask.method;

  // Focused core width (m) at the sampled focus snapshot.
  for (const auto& [t, st] : rec_mask.snapshots) {
    if (std::abs(t - pred.t_star) <= 1e-12 * pred.t_star + 1e-30)
      summary["core_width_star"] = core_width(st, target, 6);
  }

  if (w) {
    w->write_text("run_masked.csv", run_record_csv(rec_mask));
    w->write_text("run_unmasked.csv", run_record_csv(rec_plain));
    if (ctx.spec.dims == 1) w->write_text("kspec_post_mask.csv", kspectrum_csv(ks_post));
    if (fraction > 0) w->write_text("occupancy.txt", occupancy_to_text(*real));
    nlohmann::json lm = nlohmann::json::array(), lu = nlohmann::json::array();
    write_snapshots(w, rec_mask, "grid_masked", lm);
    write_snapshots(w, rec_plain, "grid_unmasked", lu);
    summary["snapshots_masked"] = lm;
    summary["snapshots_unmasked"] = lu;
  }
  return summary;
}

// --------------------------------------------------------------------- steer

nlohmann::json run_steer(const Ctx& ctx, OutputWriter* w, bool dry) {
  const ConfigFile& cfg = *ctx.cfg;
  const InitialSpec init = parse_initial(cfg, ctx.spec, ctx.model);
  const std::string spec_text = cfg.get_string("steer", "epochs");
  const long per_epoch = cfg.get_int_or("steer", "samples_per_epoch", 40);
  if (per_epoch < 2) throw ConfigError("[steer] samples_per_epoch: need at least 2");

  // "theta_deg phi_deg duration unit ; ..." per epoch.
  std::vector<AngleEpoch> epochs;
  std::stringstream ss(spec_text);
  std::string part;
  while (std::getline(ss, part, ';')) {
    std::istringstream ps(part);
    std::string th, ph, dv, du;
    if (!(ps >> th >> ph >> dv >> du))
      throw ConfigError("[steer] epochs: expected 'theta_deg phi_deg duration unit' "
                        "entries separated by ';'");
    std::string extra;
    if (ps >> extra)
      throw ConfigError("[steer] epochs: unexpected token '" + extra + "'");
    AngleEpoch e;
    try {
      e.theta = units::parse_angle(th + " deg");
      e.phi = units::parse_angle(ph + " deg");
      e.duration = units::parse_time(dv + " " + du);
    } catch (const units::UnitError& err) {
      throw ConfigError(std::string("[steer] epochs: ") + err.what());
    }
    if (e.duration <= 0) throw ConfigError("[steer] epochs: durations must be positive");
    epochs.push_back(e);
  }
  if (epochs.empty()) throw ConfigError("[steer] epochs: no epochs given");
  if (dry) return {{"kind", "steer"}};

  auto real = std::make_shared<const DisorderRealization>(full_lattice(ctx.spec));
  ExcitonState state = init.factory(real);
  const std::vector<SteeringEpoch> sched = steering_schedule(ctx.model, real, epochs);

  EvolveOptions opts;
  opts.tol = ctx.tol;
  opts.record_k = false;
  RunRecord rec = run_steering(sched, state, static_cast<int>(per_epoch), opts);

  // Mean center velocity per epoch from a least-squares fit over its samples.
  nlohmann::json vels = nlohmann::json::array();
  double t0 = 0;
  for (const AngleEpoch& e : epochs) {
    const double t1 = t0 + e.duration;
    std::vector<double> ts, xs, ys;
    for (const RunSample& s : rec.samples) {
      if (s.t >= t0 - 1e-30 && s.t <= t1 + 1e-12 * t1) {
        ts.push_back(s.t);
        xs.push_back(s.center[0] * ctx.spec.spacing);
        ys.push_back(s.center[1] * ctx.spec.spacing);
      }
    }
    vels.push_back({{"theta_deg", e.theta * 180.0 / units::pi},
                    {"phi_deg", e.phi * 180.0 / units::pi},
                    {"t_start", t0},
                    {"duration", e.duration},
                    {"v_x", fit_slope(ts, xs)},
                    {"v_y", fit_slope(ts, ys)}});
    t0 = t1;
  }

  nlohmann::json summary = {{"kind", "steer"},
                            {"epochs", vels},
                            {"norm_drift", rec.norm_drift},
                            {"method", rec.method},
                            {"final", sample_json(rec.samples.back())}};
  if (w) w->write_text("run.csv", run_record_csv(rec));
  return summary;
}

// ------------------------------------------------------------- vacancy scan

std::string combined_scan_csv(const std::vector<EnhancementReport>& reports) {
  std::string csv;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    std::string part = enhancement_csv(reports[i]);
    if (i == 0) {
      csv = std::move(part);
    } else {
      csv += part.substr(part.find('\n') + 1);  // drop the repeated header
    }
  }
  return csv;
}

nlohmann::json run_vacancy_scan(const Ctx& ctx, OutputWriter* w, bool dry) {
  const ConfigFile& cfg = *ctx.cfg;
  const InitialSpec init = parse_initial(cfg, ctx.spec, ctx.model);
  if (cfg.get_string("protocol", "kind") != "quadratic_lens")
    throw ConfigError("[protocol] kind: vacancy_scan needs quadratic_lens");
  const double phi0 = cfg.get_plain("protocol", "phi0");
  const std::array<int, 2> target = parse_cell(cfg, "protocol", "target", ctx.spec);

  std::vector<double> fractions;
  if (cfg.has("disorder", "fractions")) {
    fractions = cfg.get_plain_list("disorder", "fractions");
  } else {
    fractions = {cfg.get_plain("disorder", "vacancy_fraction")};
  }
  for (double f : fractions)
    if (f < 0 || f >= 1)
      throw ConfigError("[disorder] fractions: expected values in [0, 1)");
  const long n_real = cfg.get_int("disorder", "realizations");
  if (n_real < 1) throw ConfigError("[disorder] realizations: need at least 1");

  const double alpha_nn = coupling_element(ctx.model, 1, 0);
  FocusPrediction pred;
  if (init.kind == "gaussian") {
    pred = predict_focus_gaussian(init.sigma[0], phi0, alpha_nn, ctx.spec.spacing);
  } else {
    pred = predict_focus_planewave(ctx.spec.extent[0], phi0, alpha_nn, ctx.spec.spacing);
  }
  if (!pred.sign_ok)
    throw ConfigError("[protocol] phi0: sign defocuses this coupling (t* < 0)");
  const double t_star = cfg.get_time_or("disorder", "horizon", pred.t_star);
  if (dry) return {{"kind", "vacancy_scan"}};

  const std::array<double, 2> targetf = {static_cast<double>(target[0]),
                                         static_cast<double>(target[1])};
  MaskFactory make_mask = [phi0, targetf](std::shared_ptr<const DisorderRealization> r) {
    return quadratic_lens_mask(std::move(r), phi0, targetf);
  };

  std::vector<EnhancementReport> reports;
  nlohmann::json rows = nlohmann::json::array();
  for (double f : fractions) {
    EnhancementReport rep =
        enhancement_experiment(ctx.model, ctx.spec, f, static_cast<int>(n_real),
                               init.factory, make_mask, target, t_star, ctx.seed, ctx.jobs);
    rows.push_back(enhancement_json(rep));
    reports.push_back(std::move(rep));
  }

  nlohmann::json summary = {{"kind", "vacancy_scan"},
                            {"t_star", t_star},
                            {"phi0", phi0},
                            {"target", {target[0], target[1]}},
                            {"realizations", n_real},
                            {"fractions", rows}};
  if (w) w->write_text("scan.csv", combined_scan_csv(reports));
  return summary;
}

// -------------------------------------------------------------- block focus

nlohmann::json run_block_focus(const Ctx& ctx, OutputWriter* w, bool dry) {
  const ConfigFile& cfg = *ctx.cfg;
  if (cfg.get_string("protocol", "kind") != "block_phases")
    throw ConfigError("[protocol] kind: block_focus needs block_phases");
  const std::array<int, 2> target = parse_cell(cfg, "protocol", "target", ctx.spec);
  const std::vector<long> shape_l = cfg.get_int_list("blocks", "shape");
  if (static_cast<int>(shape_l.size()) != ctx.spec.dims)
    throw ConfigError("[blocks] shape: expected " + std::to_string(ctx.spec.dims) +
                      " value(s)");
  const std::array<int, 2> shape = {static_cast<int>(shape_l[0]),
                                    ctx.spec.dims == 2 ? static_cast<int>(shape_l[1]) : 1};
  const double horizon = cfg.get_time("blocks", "horizon");
  if (horizon <= 0) throw ConfigError("[blocks] horizon: must be positive");

  std::vector<double> fractions;
  if (cfg.has("disorder", "fractions")) {
    fractions = cfg.get_plain_list("disorder", "fractions");
  } else {
    fractions = {cfg.get_plain("disorder", "vacancy_fraction")};
  }
  for (double f : fractions)
    if (f < 0 || f >= 1)
      throw ConfigError("[disorder] fractions: expected values in [0, 1)");
  const long n_real = cfg.get_int_or("disorder", "realizations", 48);
  if (n_real < 1) throw ConfigError("[disorder] realizations: need at least 1");
  if (dry) return {{"kind", "block_focus"}};

  std::vector<EnhancementReport> reports;
  nlohmann::json rows = nlohmann::json::array();
  for (double f : fractions) {
    EnhancementReport rep =
        block_focus_experiment(ctx.model, ctx.spec, f, static_cast<int>(n_real), shape,
                               target, horizon, ctx.seed, ctx.jobs);
    rows.push_back(enhancement_json(rep));
    reports.push_back(std::move(rep));
  }

  nlohmann::json summary = {{"kind", "block_focus"},
                            {"horizon", horizon},
                            {"target", {target[0], target[1]}},
                            {"block_shape", {shape[0], shape[1]}},
                            {"block_count", reports.front().block_count},
                            {"realizations", n_real},
                            {"fractions", rows}};
  if (w) w->write_text("scan.csv", combined_scan_csv(reports));

  // Single-realization demo: reproduce the one realization, write grids and
  // the block table, and cross-check the algebraic probabilities against
  // direct propagation of the masked and unmasked states.
  if (fractions.size() == 1 && n_real == 1) {
    auto real = std::make_shared<const DisorderRealization>(
        sample_disorder(ctx.spec, fractions[0], reports[0].rows[0].seed));
    const BlockPartition partition = partition_blocks(ctx.spec, shape);
    const ExcitonState uniform = make_eigenstate(real, {0.0, 0.0});
    const BlockPhaseSolution sol =
        block_phases(ctx.model, real, partition, target, horizon, uniform);

    const HamiltonianMatrix h = build_hamiltonian(ctx.model, real);
    EvolveOptions opts;
    opts.tol = ctx.tol;
    opts.target = target;
    opts.record_k = false;
    std::vector<double> grid = {0.0, horizon};

    ExcitonState masked = apply_phase_mask(uniform, sol.mask());
    RunRecord rm = propagate_pulsed(h, PulseSchedule::none(), masked, grid, opts);
    ExcitonState plain = uniform;
    RunRecord rp = propagate_pulsed(h, PulseSchedule::none(), plain, grid, opts);

    const double direct_masked = target_probability(masked, target);
    const double direct_plain = target_probability(plain, target);
    summary["demo"] = {
        {"seed", real->seed},
        {"p_initial", reports[0].rows[0].p_initial},
        {"p_masked_algebraic", sol.aligned_probability()},
        {"p_masked_direct", direct_masked},
        {"p_unmasked_algebraic", sol.unaligned_probability()},
        {"p_unmasked_direct", direct_plain},
        {"eta", reports[0].rows[0].eta},
        {"chi", reports[0].rows[0].chi},
        {"norm_drift", std::max(rm.norm_drift, rp.norm_drift)},
    };

    if (w) {
      w->write_text("occupancy.txt", occupancy_to_text(*real));
      w->write_text("grid_initial.txt", probability_grid_text(uniform));
      w->write_text("grid_final_masked.txt", probability_grid_text(masked));
      w->write_text("grid_final_unmasked.txt", probability_grid_text(plain));

      // Per-cell mask phases, zero on vacancies.
      const PhaseMask mask = sol.mask();
      std::ostringstream mos;
      int b = 0;
      for (int y = 0; y < ctx.spec.extent[1]; ++y) {
        for (int x = 0; x < ctx.spec.extent[0]; ++x) {
          if (x) mos << ' ';
          if (real->is_occupied(ctx.spec.flat_index({x, y}))) {
            mos << format_double(mask.phi[static_cast<std::size_t>(b++)]);
          } else {
            mos << '0';
          }
        }
        mos << '\n';
      }
      w->write_text("mask.txt", mos.str());

      const int nbx = (ctx.spec.extent[0] + shape[0] - 1) / shape[0];
      std::ostringstream bos;
      bos << "block,bx,by,occupied,magnitude,phase\n";
      for (int g = 0; g < partition.block_count(); ++g) {
        int occ = 0;
        for (int cell : partition.blocks[static_cast<std::size_t>(g)])
          if (real->is_occupied(cell)) ++occ;
        bos << g << ',' << g % nbx << ',' << g / nbx << ',' << occ << ','
            << format_double(sol.magnitude[static_cast<std::size_t>(g)]) << ','
            << format_double(sol.phase[static_cast<std::size_t>(g)]) << '\n';
      }
      w->write_text("blocks.csv", bos.str());
    }
  }
  return summary;
}

nlohmann::json dispatch(const Ctx& ctx, OutputWriter* w, bool dry) {
  if (ctx.kind == "dispersion") return run_dispersion(ctx, w, dry);
  if (ctx.kind == "kick") return run_kick(ctx, w, dry);
  if (ctx.kind == "focus1d" || ctx.kind == "focus2d") return run_focus(ctx, w, dry);
  if (ctx.kind == "steer") return run_steer(ctx, w, dry);
  if (ctx.kind == "vacancy_scan") return run_vacancy_scan(ctx, w, dry);
  if (ctx.kind == "block_focus") return run_block_focus(ctx, w, dry);
  throw ConfigError("[experiment] kind: unknown value '" + ctx.kind + "'");
}

Ctx make_ctx(const ConfigFile& cfg, const RunnerOptions& opts) {
  Ctx ctx;
  ctx.cfg = &cfg;
  ctx.kind = cfg.get_string("experiment", "kind");
  ctx.seed = static_cast<std::uint64_t>(cfg.get_int_or("experiment", "seed", 1));
  if (opts.seed) ctx.seed = *opts.seed;
  ctx.jobs = static_cast<int>(cfg.get_int_or("ensemble", "jobs", 1));
  if (opts.jobs) ctx.jobs = *opts.jobs;
  if (ctx.jobs < 1) throw ConfigError("[ensemble] jobs: need at least 1");
  ctx.tol = opts.tolerance.value_or(1e-9);
  if (!(ctx.tol > 0)) throw ConfigError("tolerance must be positive");
  ctx.spec = parse_lattice(cfg);
  ctx.model = parse_coupling(cfg);
  return ctx;
}

void check_consumed(const ConfigFile& cfg) {
  const std::vector<std::string> leftover = cfg.unconsumed_keys();
  if (leftover.empty()) return;
  std::string msg = "unused config keys (typo or wrong experiment kind?):";
  for (const std::string& k : leftover) msg += " " + k;
  throw ConfigError(msg);
}

nlohmann::json run_impl(const ConfigFile& cfg, const RunnerOptions& opts, bool dry) {
  const Ctx ctx = make_ctx(cfg, opts);
  OutputWriter* w = nullptr;
  std::unique_ptr<OutputWriter> writer;
  if (!dry && !opts.out_dir.empty()) {
    writer = std::make_unique<OutputWriter>(opts.out_dir);
    w = writer.get();
  }
  nlohmann::json summary = dispatch(ctx, w, dry);
  check_consumed(cfg);
  summary["kind"] = ctx.kind;
  summary["seed"] = ctx.seed;
  if (w) {
    w->write_json("summary.json", summary);
    w->finalize({{"version", kVersion},
                 {"kind", ctx.kind},
                 {"seed", ctx.seed},
                 {"config", cfg.original_text()}});
  }
  return summary;
}

}  // namespace

nlohmann::json run_experiment(const ConfigFile& cfg, const RunnerOptions& opts) {
  return run_impl(cfg, opts, false);
}

nlohmann::json run_preset(const std::string& name, const RunnerOptions& opts) {
  const Preset* p = find_preset(name);
  if (!p) throw ConfigError("unknown preset '" + name + "'; see list-presets");
  return run_experiment(ConfigFile::parse(p->ini), opts);
}

void validate_config(const ConfigFile& cfg) {
  run_impl(cfg, RunnerOptions{}, true);
}

}  // namespace exsim
