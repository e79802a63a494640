#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "gorlicz/modular.hpp"
#include "gorlicz/operators.hpp"
#include "gorlicz/solvers.hpp"
#include "test_support.hpp"

using namespace gorlicz;
using gorlicz::testing::Rng;

namespace {

ScalarFieldd step_field(const Grid& g, double height, double at = 0.5) {
  const double length = g.spacing() * double(g.extent(0) - 1);
  return ScalarFieldd::generate(g, [&](Index k) { return g.coordinate(k, 0) >= at * length ? height : 0.0; });
}

// Brute-force minimum of the 1D TV + L2 energy over two-level fields (left, right)
// for f = H on the right half of n nodes; the jump costs |right - left| and each
// half carries h * n/2 of fidelity weight.
double two_level_oracle(Index n, double h, double H, double grid_step) {
  const double half = h * double(n / 2);
  double best = INFINITY;
  const long m = long(H / grid_step + 0.5);
  for (long i = 0; i <= m; ++i) {
    const double left = i * grid_step;
    for (long j = 0; j <= m; ++j) {
      const double right = j * grid_step;
      best = std::min(best, std::abs(right - left) + half * (left * left + (right - H) * (right - H)));
    }
  }
  return best;
}

double linf(const ScalarFieldd& a, const ScalarFieldd& b) { return (a.values() - b.values()).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("solvers") {
  TEST_CASE("energy examples") {
    const Grid g = Grid::interval(33);
    Rng rng(1);
    const auto f = testing::random_field(g, rng);
    const auto phi = PhiFunctiond::double_phase(testing::random_lipschitz(g, rng, 0.0, 2.0));
    const auto fp = EnergySpec::fidelity(phi, 1.5, f);
    CHECK(energy(fp, f) == doctest::Approx(modular(power_compose(phi, 1.5), gradient(f)).value()));
    const ScalarFieldd c(g, 0.7);
    CHECK(energy(EnergySpec::fidelity(phi, 1.5, c), c) == 0.0);
    CHECK(energy(EnergySpec::limit_double_phase(ScalarFieldd(g, 1.0), c), c) == 0.0);

    const Index N = 40;
    const Grid ep_grid = Grid::interval(N + 1);
    const auto affine = ScalarFieldd::generate(ep_grid, [&](Index k) { return double(k) / N; });
    CHECK(energy(EnergySpec::dirichlet(PhiFunctiond::power(1.0), 1.0, affine), affine) ==
          doctest::Approx(1.0).epsilon(1e-13));
  }

  TEST_CASE("limit variable exponent records Y and uses TV there") {
    const Grid g(6, 1.0);
    Vector<double> p(6);
    p << 1.0, 1.0 + 1e-13, 1.5, 2.0, 2.0, 1.0;
    Vector<double> u(6);
    u << 0.0, 2.0, 3.0, 5.0, 6.0, 8.0;
    const auto spec = EnergySpec::limit_variable_exponent(ScalarFieldd(g, p), ScalarFieldd(g, u));
    CHECK(spec.y_mask() == std::vector<bool>{true, true, false, false, false, true});
    // gradients 2, 1, 2, 1, 2, 0 -> 2 + 1 + 2^1.5 + 1 + 4 + 0
    CHECK(energy(spec, ScalarFieldd(g, u)) == doctest::Approx(2 + 1 + std::pow(2.0, 1.5) + 1 + 4));
  }

  TEST_CASE("spec validation") {
    const Grid g(8, 1.0);
    const ScalarFieldd f(g, 0.0);
    CHECK_THROWS_AS(EnergySpec::fidelity(PhiFunctiond::power(1.0), 0.5, f), DomainError);
    CHECK_THROWS_AS(EnergySpec::limit_double_phase(ScalarFieldd(g, -1.0), f), DomainError);
    CHECK_THROWS_AS(EnergySpec::limit_double_phase(ScalarFieldd(Grid(9, 1.0), 1.0), f), UsageError);
    CHECK_THROWS_AS(EnergySpec::fidelity(PhiFunctiond::double_phase(ScalarFieldd(Grid(9, 1.0), 1.0)), 2.0, f),
                    UsageError);
    CHECK_THROWS_AS(solve_smooth(EnergySpec::fidelity(PhiFunctiond::power(1.0), 1.0, f)), DomainError);
    CHECK_THROWS_AS(solve_smooth(EnergySpec::limit_double_phase(f, f)), UsageError);
    CHECK_THROWS_AS(solve_limit(EnergySpec::fidelity(PhiFunctiond::power(1.0), 2.0, f)), UsageError);
    SolverOpts opts;
    opts.tau = 1.0;
    opts.sigma = 1.0;
    CHECK_THROWS_AS(solve_limit(EnergySpec::limit_double_phase(f, f), opts), UsageError);
    CHECK_THROWS_AS(energy(EnergySpec::limit_double_phase(f, f), ScalarFieldd(Grid(9, 1.0), 0.0)), UsageError);
  }

  TEST_CASE("chain-rule gradient matches central differences") {
    Rng rng(42);
    const Grid g(8, 0.5);
    for (int trial = 0; trial < 10; ++trial) {
      const auto f = testing::random_field(g, rng);
      const auto u = testing::random_field(g, rng, -2.0, 2.0);
      const auto a = testing::random_lipschitz(g, rng, 0.0, 2.0);
      const std::vector<EnergySpec> specs = {
          EnergySpec::fidelity(PhiFunctiond::double_phase(a), 1.5, f),
          EnergySpec::fidelity(PhiFunctiond::power(2.0), 1.3, f),
          EnergySpec::dirichlet(PhiFunctiond::variable_exponent(testing::exponent_ramp(g)), 1.7, f),
          EnergySpec::limit_double_phase(a, f)};
      for (const auto& spec : specs) {
        const auto G = energy_gradient(spec, u, 1e-6);
        for (Index k = 0; k < g.size(); ++k) {
          const double step = 1e-6;
          ScalarFieldd up = u, um = u;
          up[k] += step;
          um[k] -= step;
          const double fd = spec.kind() == EnergyKind::Ep && g.on_boundary(k)
                                ? 0.0
                                : (energy(spec, up) - energy(spec, um)) / (2 * step);
          CHECK(std::abs(fd - G[k]) <= 1e-5 * std::max(1.0, G.values().cwiseAbs().maxCoeff()));
        }
      }
    }
  }

  TEST_CASE("Fp with constant data is solved exactly") {
    const Grid g(20, 15, 0.1);
    const ScalarFieldd f(g, 3.25);
    const auto phi = PhiFunctiond::double_phase(ScalarFieldd(g, 1.0));
    for (double p : {1.01, 1.5, 2.0}) {
      const auto r = solve_smooth(EnergySpec::fidelity(phi, p, f));
      CHECK(r.converged);
      CHECK(r.energy <= 1e-12);
      CHECK(linf(r.minimizer, f) == 0.0);
    }
    const auto r = solve_limit(EnergySpec::limit_double_phase(ScalarFieldd(g, 0.5), f));
    CHECK(r.converged);
    CHECK(r.energy <= 1e-12);
  }

  TEST_CASE("Ep with affine Dirichlet data returns the affine interpolant") {
    Rng rng(8);
    const Index N = 16;
    const Grid g = Grid::interval(N + 1);
    // boundary values 0.5 and 2; interior perturbed away from the line
    ScalarFieldd u0 = ScalarFieldd::generate(g, [&](Index k) { return 0.5 + 1.5 * double(k) / N; });
    const ScalarFieldd affine = u0;
    for (Index k = 1; k < N; ++k) u0[k] += testing::uniform(rng, -0.5, 0.5);
    SolverOpts opts;
    opts.tol = 1e-15;
    opts.max_iter = 200000;
    const auto spec = EnergySpec::dirichlet(PhiFunctiond::power(2.0), 1.5, u0);
    const auto r = solve_smooth(spec, opts);
    CHECK(r.converged);
    CHECK(linf(r.minimizer, affine) <= 1e-6);
    CHECK(r.energy <= energy(spec, u0));
    CHECK(r.minimizer[0] == u0[0]);
    CHECK(r.minimizer[N] == u0[N]);
  }

  TEST_CASE("smooth solver decreases the energy monotonically") {
    Rng rng(12);
    const Grid g(12, 10, 0.1);
    const auto f = testing::random_field(g, rng);
    const auto spec =
        EnergySpec::fidelity(PhiFunctiond::double_phase(testing::random_lipschitz(g, rng, 0.0, 2.0)), 1.5, f);
    SolverOpts opts;
    opts.max_iter = 500;
    const auto r = solve_smooth(spec, opts);
    const double roundoff = 4.0 * std::numeric_limits<double>::epsilon();
    for (std::size_t k = 1; k < r.trace.size(); ++k) CHECK(r.trace[k] <= r.trace[k - 1] * (1 + roundoff));
    CHECK(r.energy == doctest::Approx(energy(spec, r.minimizer)).epsilon(1e-12));
    CHECK(r.energy <= std::pow(l2_norm(f), 2));  // F_p(0) = ||f||^2
  }

  TEST_CASE("Fp step problem beats random candidates") {
    const Grid g = Grid::interval(64);
    const auto f = step_field(g, 1.0);
    const auto spec = EnergySpec::fidelity(PhiFunctiond::double_phase(ScalarFieldd(g, 0.0)), 1.5, f);
    SolverOpts opts;
    opts.max_iter = 50000;
    const auto r = solve_smooth(spec, opts);
    CHECK(r.energy <= energy(spec, f));
    Rng rng(99);
    for (int i = 0; i < 200; ++i) {
      // feasible candidates: perturbations of f and of the minimiser at several scales
      const double scale = std::pow(10.0, testing::uniform(rng, -4, 0));
      const auto base = i % 2 == 0 ? f : r.minimizer;
      const auto cand = base + testing::random_field(g, rng, -scale, scale);
      CHECK(r.energy <= energy(spec, cand));
    }
  }

  TEST_CASE("uniqueness: independent random starts agree") {
    for (std::uint64_t instance : {5, 6, 7}) {
      const Grid g = Grid::interval(24);
      Rng rng(instance);
      const auto f = testing::random_field(g, rng);
      const auto spec =
          EnergySpec::fidelity(PhiFunctiond::double_phase(testing::random_lipschitz(g, rng, 0.0, 1.0)), 2.0, f);
      SolverOpts opts;
      opts.gtol = 1e-12;
      opts.max_iter = 100000;
      opts.random_init = true;
      opts.seed = 1;
      const auto r1 = solve_smooth(spec, opts);
      opts.seed = 2;
      const auto r2 = solve_smooth(spec, opts);
      CHECK(r1.converged);
      CHECK(r2.converged);
      CHECK(l2_distance(r1.minimizer, r2.minimizer) <= 1e-6 * l2_norm(r1.minimizer));
    }
  }

  TEST_CASE("primal-dual agrees with the smooth solver on a smooth problem") {
    const Grid g = Grid::interval(32);
    Rng rng(6);
    const auto f = testing::random_field(g, rng);
    const auto spec = EnergySpec::fidelity(PhiFunctiond::power(2.0), 1.5, f);
    SolverOpts opts;
    opts.tol = 1e-16;
    opts.max_iter = 100000;
    const auto smooth = solve_smooth(spec, opts);
    opts.tol = 1e-10;
    opts.max_iter = 200000;
    const auto pd = solve_primal_dual(spec, opts);
    CHECK(pd.energy == doctest::Approx(smooth.energy).epsilon(1e-7));
    CHECK(l2_distance(pd.minimizer, smooth.minimizer) <= 1e-4 * l2_norm(f));
  }

  TEST_CASE("limit solve with constant data") {
    const Grid g(16, 16, 1.0 / 15);
    const ScalarFieldd f(g, -2.0);
    const auto r = solve_limit(EnergySpec::limit_variable_exponent(testing::exponent_ramp(g), f));
    CHECK(r.converged);
    CHECK(r.energy == 0.0);
    CHECK(linf(r.minimizer, f) == 0.0);
  }

  TEST_CASE("1D TV + L2 matches the two-level brute-force oracle") {
    const Index n = 64;
    const Grid g = Grid::interval(n);
    const double H = 3.0;
    const auto f = step_field(g, H);
    const double oracle = two_level_oracle(n, g.spacing(), H, 1e-3);
    SolverOpts opts;
    opts.tol = 1e-9;
    opts.max_iter = 400000;
    const auto r = solve_limit(EnergySpec::limit_double_phase(ScalarFieldd(g, 0.0), f), opts);
    CHECK(r.converged);
    CHECK(std::abs(r.energy - oracle) <= 1e-4 * oracle);
    CHECK(r.energy <= energy(EnergySpec::limit_double_phase(ScalarFieldd(g, 0.0), f), f));
  }

  TEST_CASE("large double-phase weight approaches the quadratic solution") {
    const Index n = 16;
    const Grid g = Grid::interval(n);
    Rng rng(4);
    const auto f = testing::random_field(g, rng, 0.0, 1.0);
    const double A = 50.0;
    const ScalarFieldd a(g, A);

    // dense oracle: (2I + 2 D^T A D) u = 2 f with D the forward-difference matrix
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    for (Index k = 0; k + 1 < n; ++k) {
      D(k, k) = -1.0 / g.spacing();
      D(k, k + 1) = 1.0 / g.spacing();
    }
    const Eigen::MatrixXd M = 2.0 * Eigen::MatrixXd::Identity(n, n) + 2.0 * A * D.transpose() * D;
    const Eigen::VectorXd u_lin = M.partialPivLu().solve(2.0 * f.values());
    // the TV subgradient s (|s| <= 1) shifts the solution by at most ||M^{-1} D^T||_inf
    const double tv_bound = (M.partialPivLu().solve(D.transpose())).cwiseAbs().rowwise().sum().maxCoeff();
    CHECK(tv_bound <= 0.05);

    SolverOpts opts;
    opts.tol = 1e-11;
    opts.max_iter = 400000;
    const auto r = solve_limit(EnergySpec::limit_double_phase(a, f), opts);
    CHECK(r.converged);
    CHECK((r.minimizer.values() - u_lin).cwiseAbs().maxCoeff() <= tv_bound + 1e-6);
  }

  TEST_CASE("primal-dual energy settles and beats simple candidates") {
    const Grid g(24, 20, 1.0 / 23);
    Rng rng(77);
    auto f = step_field(g, 4.0);
    f = f + testing::random_field(g, rng, -0.2, 0.2);
    const auto spec = EnergySpec::limit_double_phase(testing::random_lipschitz(g, rng, 0.0, 0.05), f);
    SolverOpts opts;
    opts.tol = 1e-7;
    opts.max_iter = 100000;
    const auto r = solve_limit(spec, opts);
    CHECK(r.converged);
    CHECK(r.energy <= energy(spec, f));
    CHECK(r.energy <= energy(spec, ScalarFieldd(g, f.values().mean())));
    REQUIRE(r.trace.size() >= 4);
    const auto n = r.trace.size();
    const double window = std::max({r.trace[n - 1], r.trace[n - 2], r.trace[n - 3]}) -
                          std::min({r.trace[n - 1], r.trace[n - 2], r.trace[n - 3]});
    CHECK(window <= 1e-5 * r.energy);
  }
}
