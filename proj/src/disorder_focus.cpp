#include "exsim/disorder_focus.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <exception>
#include <mutex>
#include <thread>

namespace exsim {

namespace {

constexpr int max_resample_attempts = 1000;

std::shared_ptr<const DisorderRealization> sample_with_target(
    const LatticeSpec& spec, double fraction, std::uint64_t base_seed,
    int realization, std::array<int, 2> target, int& attempts_out,
    std::uint64_t& seed_out) {
  if (spec.dims == 1) target[1] = 0;
  if (!spec.contains(target)) throw DisorderError("target lies outside the lattice");
  const int flat = spec.flat_index(target);
  for (int attempt = 0; attempt < max_resample_attempts; ++attempt) {
    const std::uint64_t seed = realization_seed(base_seed, realization, attempt);
    auto real = std::make_shared<DisorderRealization>(
        sample_disorder(spec, fraction, seed));
    if (real->is_occupied(flat)) {
      attempts_out = attempt + 1;
      seed_out = seed;
      return real;
    }
  }
  throw DisorderError("could not draw a realization with the target occupied");
}

void finalize_report(EnhancementReport& rep) {
  std::vector<double> etas, chis;
  double sum_masked = 0, sum_plain = 0;
  etas.reserve(rep.rows.size());
  chis.reserve(rep.rows.size());
  for (const auto& r : rep.rows) {
    etas.push_back(r.eta);
    chis.push_back(r.chi);
    sum_masked += r.p_masked;
    sum_plain += r.p_plain;
  }
  const MeanCI e = mean_ci(etas), c = mean_ci(chis);
  rep.mean_eta = e.mean;
  rep.ci_eta = e.half_width;
  rep.mean_chi = c.mean;
  rep.ci_chi = c.half_width;
  rep.gain_ratio = sum_plain > 0 ? sum_masked / sum_plain : 0.0;
}

void fill_eta_chi(RealizationOutcome& out) {
  if (out.p_initial <= 0.0) {
    throw DisorderError("initial state has no probability at the target");
  }
  out.eta = out.p_masked / out.p_initial;
  out.chi_capped = out.p_plain < chi_denominator_floor;
  out.chi = std::min(out.p_masked / std::max(out.p_plain, chi_denominator_floor),
                     chi_cap);
}

}  // namespace

std::uint64_t realization_seed(std::uint64_t base_seed, int realization, int attempt) {
  // Stride larger than any attempt count keeps (realization, attempt) pairs
  // collision-free while staying human-predictable in output files.
  return base_seed + 1000003ull * static_cast<std::uint64_t>(realization) +
         static_cast<std::uint64_t>(attempt);
}

void run_indexed_jobs(int n, int jobs, const std::function<void(int)>& fn) {
  jobs = std::min(jobs, n);
  if (jobs <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex err_mutex;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

double student_t_975(int dof) {
  static constexpr double table[] = {
      12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
      2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
      2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
  if (dof < 1) throw DisorderError("Student-t needs at least 1 degree of freedom");
  if (dof <= 30) return table[dof - 1];
  // Beyond the table, interpolate in 1/dof toward the normal quantile.
  const double t30 = 2.042, z = 1.960;
  return z + (t30 - z) * (30.0 / dof);
}

MeanCI mean_ci(const std::vector<double>& xs) {
  MeanCI out;
  const int n = static_cast<int>(xs.size());
  if (n == 0) return out;
  double s = 0;
  for (double x : xs) s += x;
  out.mean = s / n;
  if (n < 2) return out;
  double ss = 0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  const double sd = std::sqrt(ss / (n - 1));
  out.half_width = student_t_975(n - 1) * sd / std::sqrt(static_cast<double>(n));
  return out;
}

EnhancementReport enhancement_experiment(
    const CouplingModel& model, const LatticeSpec& spec, double vacancy_fraction,
    int n_realizations, const StateFactory& make_state, const MaskFactory& make_mask,
    std::array<int, 2> target, double t_star, std::uint64_t base_seed, int jobs) {
  if (n_realizations < 1) throw DisorderError("need at least one realization");
  if (spec.dims == 1) target[1] = 0;

  EnhancementReport rep;
  rep.vacancy_fraction = vacancy_fraction;
  rep.horizon = t_star;
  rep.target = target;
  rep.rows.resize(n_realizations);

  run_indexed_jobs(n_realizations, jobs, [&](int r) {
    RealizationOutcome& out = rep.rows[r];
    auto real = sample_with_target(spec, vacancy_fraction, base_seed, r, target,
                                   out.attempts, out.seed);
    const ExcitonState psi0 = make_state(real);
    out.p_initial = target_probability(psi0, target);
    const PhaseMask mask = make_mask(real);
    const HamiltonianMatrix h = build_hamiltonian(model, real);
    const Propagator prop(h);
    out.p_plain = target_probability(prop.apply(psi0, t_star), target);
    out.p_masked =
        target_probability(prop.apply(apply_phase_mask(psi0, mask), t_star), target);
    fill_eta_chi(out);
  });

  finalize_report(rep);
  return rep;
}

PhaseMask BlockPhaseSolution::mask() const {
  PhaseMask m;
  m.realization = realization;
  const auto cells = realization->occupied_cells();
  m.phi.resize(cells.size());
  for (size_t b = 0; b < cells.size(); ++b) {
    m.phi[b] = phase[partition.cell_block[cells[b]]];
  }
  return m;
}

double BlockPhaseSolution::aligned_probability() const {
  double s = 0;
  for (double m : magnitude) s += m;
  return s * s;
}

double BlockPhaseSolution::unaligned_probability() const {
  std::complex<double> s = 0;
  for (size_t g = 0; g < magnitude.size(); ++g) {
    s += magnitude[g] * std::exp(std::complex<double>(0, phase[g]));
  }
  return std::norm(s);
}

BlockPhaseSolution block_phases(const CouplingModel& model,
                                std::shared_ptr<const DisorderRealization> real,
                                const BlockPartition& partition,
                                std::array<int, 2> target, double horizon,
                                const ExcitonState& initial) {
  if (!real) throw DisorderError("block phases need a realization");
  const LatticeSpec& spec = real->spec;
  if (spec.dims == 1) target[1] = 0;
  if (!spec.contains(target)) throw DisorderError("target lies outside the lattice");
  const int flat = spec.flat_index(target);
  if (!real->is_occupied(flat)) throw DisorderError("target cell is vacant");
  if (initial.size() != real->occupied_count()) {
    throw DisorderError("initial state does not match the realization");
  }

  const HamiltonianMatrix h = build_hamiltonian(model, real);
  const int o = h.cell_to_basis[flat];
  const Propagator prop(h);
  // u_j = U_{j,o}(T); the evolution matrix is symmetric, so this column is
  // also the row U_{o,j} that weights each site's contribution at o.
  const Eigen::VectorXcd u = prop.column(o, horizon);

  BlockPhaseSolution sol;
  sol.realization = real;
  sol.partition = partition;
  sol.target = target;
  sol.horizon = horizon;
  const int m = partition.block_count();
  sol.phase.assign(m, 0.0);
  sol.magnitude.assign(m, 0.0);

  std::vector<std::complex<double>> c(m, 0.0);
  const auto cells = real->occupied_cells();
  for (size_t b = 0; b < cells.size(); ++b) {
    c[partition.cell_block[cells[b]]] +=
        u[static_cast<int>(b)] * initial.amp[static_cast<int>(b)];
  }
  for (int g = 0; g < m; ++g) {
    sol.magnitude[g] = std::abs(c[g]);
    sol.phase[g] = sol.magnitude[g] > 0 ? std::arg(c[g]) : 0.0;
  }
  return sol;
}

EnhancementReport block_focus_experiment(const CouplingModel& model,
                                         const LatticeSpec& spec,
                                         double vacancy_fraction, int n_realizations,
                                         std::array<int, 2> block_shape,
                                         std::array<int, 2> target, double horizon,
                                         std::uint64_t base_seed, int jobs) {
  if (n_realizations < 1) throw DisorderError("need at least one realization");
  if (spec.dims == 1) target[1] = 0;
  const BlockPartition partition = partition_blocks(spec, block_shape);

  EnhancementReport rep;
  rep.vacancy_fraction = vacancy_fraction;
  rep.horizon = horizon;
  rep.target = target;
  rep.block_count = partition.block_count();
  rep.rows.resize(n_realizations);

  run_indexed_jobs(n_realizations, jobs, [&](int r) {
    RealizationOutcome& out = rep.rows[r];
    auto real = sample_with_target(spec, vacancy_fraction, base_seed, r, target,
                                   out.attempts, out.seed);
    const ExcitonState psi0 = make_eigenstate(real, {0.0, 0.0});
    const BlockPhaseSolution sol =
        block_phases(model, real, partition, target, horizon, psi0);
    out.p_initial = 1.0 / real->occupied_count();
    out.p_plain = sol.unaligned_probability();
    out.p_masked = sol.aligned_probability();
    fill_eta_chi(out);
  });

  finalize_report(rep);
  return rep;
}

}  // namespace exsim
