#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <memory>
#include <random>
#include <vector>

#include "exsim/coupling.hpp"
#include "exsim/evolve.hpp"
#include "exsim/lattice.hpp"
#include "exsim/units.hpp"
#include "exsim/wavepacket.hpp"

using namespace exsim;
using cplx = std::complex<double>;

namespace {

constexpr double kA = 4e-7;
constexpr double kAlpha = 2 * units::pi * 22.83e3;

std::shared_ptr<const DisorderRealization> chain(int n) {
  return std::make_shared<DisorderRealization>(full_lattice(build_lattice(1, {n, 1}, kA)));
}

// A small disordered dipolar instance with nondegenerate spectrum.
HamiltonianMatrix small_disordered(int* n_out = nullptr) {
  auto spec = build_lattice(2, {5, 4}, kA);
  auto real = std::make_shared<DisorderRealization>(sample_disorder(spec, 0.25, 21));
  CouplingModel m;
  m.kind = CouplingKind::dipolar;
  m.alpha = kAlpha;
  m.theta = 0.4;
  m.phi = 1.0;
  m.truncation = 3.0;
  m.site_energy = 5 * kAlpha;
  auto h = build_hamiltonian(m, real);
  if (n_out) *n_out = h.n;
  return h;
}

ExcitonState random_state(const HamiltonianMatrix& h, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  ExcitonState s;
  s.realization = h.realization;
  s.amp.resize(h.n);
  for (int i = 0; i < h.n; ++i) s.amp[i] = cplx(u(rng), u(rng));
  s.amp /= s.amp.norm();
  return s;
}

// Independent reference: full eigendecomposition, psi -> V e^{-i L t} V^T psi.
Eigen::VectorXcd eig_reference(const HamiltonianMatrix& h, const Eigen::VectorXcd& x,
                               double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.dense());
  Eigen::VectorXcd proj = es.eigenvectors().transpose().cast<cplx>() * x;
  for (int i = 0; i < h.n; ++i) {
    proj[i] *= std::polar(1.0, -es.eigenvalues()[i] * t);
  }
  return es.eigenvectors().cast<cplx>() * proj;
}

}  // namespace

TEST_CASE("dense and chebyshev kernels agree with the eigensolver reference") {
  auto h = small_disordered();
  auto st = random_state(h, 3);

  for (double t : {1e-6, 1e-4, 3e-3}) {  // alpha t from ~0.1 to ~400
    Eigen::VectorXcd want = eig_reference(h, st.amp, t);

    Propagator dense(h, Propagator::Method::dense);
    Propagator cheb(h, Propagator::Method::chebyshev);
    Eigen::VectorXcd got_d = dense.apply(st.amp, t);
    Eigen::VectorXcd got_c = cheb.apply(st.amp, t);

    CHECK((got_d - want).norm() < 1e-10);
    CHECK((got_c - want).norm() < 1e-10);
    CHECK(std::abs(got_d.norm() - 1.0) < 1e-12);
    CHECK(std::abs(got_c.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("propagation is unitary and reversible") {
  auto h = small_disordered();
  auto st = random_state(h, 5);
  Propagator p(h);
  CHECK(p.chosen() == Propagator::Method::dense);  // small instance

  const double t = 2.7e-4;
  Eigen::VectorXcd fwd = p.apply(st.amp, t);
  Eigen::VectorXcd back = p.apply(fwd, -t);
  CHECK((back - st.amp).norm() < 1e-11);

  // Energy is conserved along the way.
  CHECK(h.expectation(fwd) == doctest::Approx(h.expectation(st.amp)).epsilon(1e-10));
}

TEST_CASE("U columns are symmetric: U_{o,j} = U_{j,o}") {
  auto h = small_disordered();
  Propagator p(h);
  const double t = 1.3e-4;
  // The evolution matrix of a real symmetric H is complex symmetric, the
  // identity the block-phase protocol rests on. Check random column pairs.
  for (auto [i, j] : {std::pair{0, 1}, {2, 9}, {5, 13}, {3, 3}}) {
    Eigen::VectorXcd ci = p.column(i, t);
    Eigen::VectorXcd cj = p.column(j, t);
    CHECK(std::abs(ci[j] - cj[i]) < 1e-12);
  }
}

TEST_CASE("phase masks rotate amplitudes by exp(-i phi) and compose by addition") {
  auto real = chain(12);
  ExcitonState st = make_eigenstate(real, {0.0, 0.0});

  PhaseMask m1 = mask_from_cells(real, [](std::array<int, 2> c) { return 0.1 * c[0]; });
  PhaseMask m2 = mask_from_cells(real, [](std::array<int, 2> c) { return 0.05 * c[0] * c[0]; });

  ExcitonState a = apply_phase_mask(apply_phase_mask(st, m1), m2);
  ExcitonState b = apply_phase_mask(st, combine_masks(m1, m2));
  CHECK((a.amp - b.amp).norm() < 1e-14);
  CHECK(a.norm() == doctest::Approx(1.0).epsilon(1e-13));

  // Spot value: site 7 rotated by exp(-i (0.7 + 2.45)).
  const cplx want = st.amp[7] * std::polar(1.0, -(0.1 * 7 + 0.05 * 49));
  CHECK(std::abs(a.amp[7] - want) < 1e-14);
}

TEST_CASE("a grid-commensurate linear mask translates the k spectrum") {
  const int n = 32;
  auto real = chain(n);
  auto st = make_gaussian(real, {16.0, 0.0}, {3 * kA, 0.0}, {0.0, 0.0});
  auto before = k_transform(st);

  // Phi_n = -n a delta with delta = 5 grid steps; applied factor e^{+i n a delta}.
  const double delta = units::two_pi * 5 / (n * kA);
  PhaseMask kick = mask_from_cells(
      real, [&](std::array<int, 2> c) { return -c[0] * kA * delta; });
  auto after = k_transform(apply_phase_mask(st, kick));

  // |G| translates by exactly 5 raw slots; shapes match to machine precision.
  for (int v = 0; v < n; ++v) {
    CHECK(std::abs(after.g[(v + 5) % n]) ==
          doctest::Approx(std::abs(before.g[v])).epsilon(1e-12));
  }
}

TEST_CASE("pulse envelopes: window, integrals, accumulated mask") {
  PulseSchedule p;
  p.t_start = 1e-6;
  p.duration = 4e-6;
  p.c1 = {2e6, -1e6};
  p.c2 = {0.5e12, 0.0};

  CHECK(p.envelope_at(0.5e-6) == 0.0);
  CHECK(p.envelope_at(1e-6 + 2e-6) == doctest::Approx(1.0));
  CHECK(p.envelope_at(1e-6 + 1e-6) == doctest::Approx(0.5));
  CHECK(p.envelope_at(5.2e-6) == 0.0);
  CHECK(p.envelope_integral() == doctest::Approx(2e-6));       // T/2
  CHECK(p.envelope_sq_integral() == doctest::Approx(1.5e-6));  // 3T/8

  auto real = chain(2);
  PhaseMask m = p.accumulated_mask(real);
  CHECK(m.phi[0] == doctest::Approx(2e6 * 2e-6 + 0.5e12 * 1.5e-6));
  CHECK(m.phi[1] == doctest::Approx(-1e6 * 2e-6));

  PulseSchedule tab;
  tab.t_start = 0;
  tab.duration = 2.0;
  tab.envelope = PulseSchedule::Envelope::tabulated;
  tab.tab_t = {0.0, 1.0, 2.0};
  tab.tab_v = {0.0, 1.0, 1.0};
  CHECK(tab.envelope_at(0.5) == doctest::Approx(0.5));
  CHECK(tab.envelope_at(1.7) == doctest::Approx(1.0));
  CHECK(tab.envelope_integral() == doctest::Approx(1.5));
  // int of (t)^2 over [0,1] + 1 over [1,2] = 1/3 + 1.
  CHECK(tab.envelope_sq_integral() == doctest::Approx(4.0 / 3.0));

  CHECK(PulseSchedule::none().empty());
}

TEST_CASE("pulse-free propagation matches the static kernel on the grid") {
  auto h = small_disordered();
  auto st0 = random_state(h, 8);

  ExcitonState st = st0;
  std::vector<double> grid = {0.0, 5e-5, 1.5e-4, 4e-4};
  EvolveOptions opts;
  opts.snapshot_times = {1.5e-4};
  opts.target = h.realization->spec.coords(h.basis_to_cell[0]);
  RunRecord rec = propagate_pulsed(h, PulseSchedule::none(), st, grid, opts);

  REQUIRE(rec.samples.size() == 4);
  CHECK(rec.samples[0].t == 0.0);
  CHECK(rec.samples[3].t == 4e-4);
  CHECK(rec.norm_drift < 1e-9);
  CHECK(rec.method == "dense");

  Eigen::VectorXcd want = eig_reference(h, st0.amp, 4e-4);
  CHECK((st.amp - want).norm() < 1e-9);

  // Sample diagnostics carry norm/energy/k data.
  CHECK(rec.samples[2].norm == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(rec.samples[2].energy ==
        doctest::Approx(h.expectation(st0.amp)).epsilon(1e-8));
  CHECK(rec.samples[1].p_target >= 0.0);

  REQUIRE(rec.snapshots.size() == 1);
  CHECK(rec.snapshots[0].first == doctest::Approx(1.5e-4));
  Eigen::VectorXcd snap_want = eig_reference(h, st0.amp, 1.5e-4);
  CHECK((rec.snapshots[0].second.amp - snap_want).norm() < 1e-9);
}

TEST_CASE("uniform site modulation is a pure global phase: sudden fidelity 1") {
  auto h = small_disordered();
  auto st0 = random_state(h, 13);

  PulseSchedule p;
  p.t_start = 0.0;
  p.duration = 6e-5;
  p.c1.assign(h.n, 3e5);  // identical on every site

  ExcitonState pulsed = st0;
  EvolveOptions opts;
  opts.sudden_fidelity = true;
  std::vector<double> grid = {0.0, 6e-5};
  RunRecord rec = propagate_pulsed(h, p, pulsed, grid, opts);

  CHECK(rec.sudden_fidelity == doctest::Approx(1.0).epsilon(1e-8));

  // Up to a global phase the result is the free evolution.
  Eigen::VectorXcd freeev = eig_reference(h, st0.amp, 6e-5);
  const cplx ov = freeev.dot(pulsed.amp);
  CHECK(std::abs(ov) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("shorter pulses are closer to their instantaneous-mask limit") {
  auto h = small_disordered();

  auto run = [&](double duration) {
    auto st = random_state(h, 17);
    PulseSchedule p;
    p.duration = duration;
    p.c1.resize(h.n);
    // Site-dependent phases of order 1 rad regardless of duration.
    for (int i = 0; i < h.n; ++i) {
      p.c1[i] = 2.0 * (0.2 * i) / duration;  // Phi_i = c1 T/2 = 0.2 i
    }
    EvolveOptions opts;
    opts.sudden_fidelity = true;
    std::vector<double> grid = {0.0, duration};
    return propagate_pulsed(h, p, st, grid, opts).sudden_fidelity;
  };

  const double fast = run(1e-7);   // alpha T ~ 0.014: sudden regime
  const double slow = run(2e-4);   // alpha T ~ 29: far from sudden
  CHECK(fast > 0.99);
  CHECK(slow < fast);
}

TEST_CASE("fixed-step pulsed integrator converges at second order") {
  auto h = small_disordered();
  auto st0 = random_state(h, 23);

  PulseSchedule p;
  p.duration = 1.2e-4;
  p.c1.resize(h.n);
  p.c2.resize(h.n);
  for (int i = 0; i < h.n; ++i) {
    p.c1[i] = 1e5 * std::sin(0.8 * i);
    p.c2[i] = 0.0;
  }

  auto errvs = [&](int steps) {
    ExcitonState ref = propagate_pulsed_fixed(h, p, st0, 0.0, 1.2e-4, 8192);
    ExcitonState coarse = propagate_pulsed_fixed(h, p, st0, 0.0, 1.2e-4, steps);
    return (coarse.amp - ref.amp).norm();
  };

  const double e64 = errvs(64);
  const double e128 = errvs(128);
  const double e256 = errvs(256);
  // Midpoint-frozen exponential stepping: error ~ dt^2, ratio ~ 4 per halving.
  CHECK(e64 / e128 == doctest::Approx(4.0).epsilon(0.25));
  CHECK(e128 / e256 == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("bloch propagation matches real-space evolution on the clean ring") {
  const int n = 24;
  auto real = chain(n);
  CouplingModel m;
  m.kind = CouplingKind::nearest_neighbor;
  m.alpha = kAlpha;
  m.boundary = Boundary::periodic;
  auto h = build_hamiltonian(m, real);

  auto st = make_gaussian(real, {12.0, 0.0}, {2.5 * kA, 0.0}, {0.9 / kA, 0.0});
  const double t = 2e-4;

  ExcitonState via_bloch = propagate_bloch(
      st, [&](double kx, double) { return dispersion_nn(m, kx, kA); }, t);
  ExcitonState via_h = propagate_static(h, st, t);
  CHECK((via_bloch.amp - via_h.amp).norm() < 1e-10);

  // An eigenstate only accumulates the dispersion phase.
  auto ev = make_eigenstate(real, {units::two_pi * 7 / (n * kA), 0.0});
  ExcitonState ev_t = propagate_bloch(
      ev, [&](double kx, double) { return dispersion_nn(m, kx, kA); }, t);
  const cplx ratio = ev_t.amp[0] / ev.amp[0];
  const double want_phase = -dispersion_nn(m, units::two_pi * 7 / (n * kA), kA) * t;
  CHECK(std::abs(ratio - std::polar(1.0, want_phase)) < 1e-12);
}

TEST_CASE("propagate_bloch rejects vacancies") {
  auto spec = build_lattice(1, {8, 1}, kA);
  auto real = std::make_shared<DisorderRealization>(sample_disorder(spec, 0.25, 2));
  auto st = make_eigenstate(real, {0.0, 0.0});
  CHECK_THROWS_AS(
      propagate_bloch(st, [](double, double) { return 0.0; }, 1e-5),
      WavepacketError);
}
