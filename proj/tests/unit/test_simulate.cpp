#include "lsqflow/error.hpp"
#include "lsqflow/simulate.hpp"
#include "lsqflow/spectral.hpp"
#include "support/examples.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace lsqflow;

namespace {

Eigen::VectorXd final_x(const Trajectory& t) { return t.samples.back().x; }

double max_node_deviation(const Trajectory& t, const Eigen::VectorXd& y) {
  const auto x = final_x(t);
  double worst = 0.0;
  for (int i = 0; i < t.n_nodes; ++i) worst = std::max(worst, (x.segment(i * t.dim, t.dim) - y).cwiseAbs().maxCoeff());
  return worst;
}

}  // namespace

TEST_SUITE("simulate") {
  TEST_CASE("ct_rhs equals M u + b and the per-node oracle") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
      const int n = 3 + trial % 6;
      const int m = 1 + trial % 3;
      const Eigen::MatrixXd h = oracle::gaussian(n, m, rng);
      const Eigen::VectorXd z = oracle::gaussian(n, 1, rng);
      const Graph g = oracle::random_connected_graph(n, rng);
      const auto flow = assemble(NetworkLinearEquation(h, z), g);
      FlowState s{0.0, oracle::gaussian(n * m, 1, rng), oracle::gaussian(n * m, 1, rng)};
      const auto [dx, dv] = ct_rhs(flow, s);

      Eigen::VectorXd u(2 * n * m), b = Eigen::VectorXd::Zero(2 * n * m);
      u << s.x, s.v;
      b.head(n * m) = flow.z_h;
      const Eigen::VectorXd mu = flow.system * u + b;
      CHECK((dx - mu.head(n * m)).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK((dv - mu.tail(n * m)).cwiseAbs().maxCoeff() <= 1e-12);

      Eigen::VectorXd ox, ov;
      oracle::node_rhs(h, z, g, 0.0, s.x, s.v, ox, ov);
      CHECK((dx - ox).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK((dv - ov).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }

  TEST_CASE("Example 1 initial vector field") {
    const auto flow = assemble(examples::problem1(), examples::path1());
    const auto [dx, dv] = ct_rhs(flow, {0.0, examples::x0_ex1(), Eigen::VectorXd::Zero(8)});
    Eigen::VectorXd expected(8);
    expected << 0, -0.5, 16.2, 0, -11.2, 0, 0.1, 0;
    CHECK((dx - expected).cwiseAbs().maxCoeff() <= 1e-12);
    Eigen::VectorXd direct = flow.z_h - flow.h_tilde * examples::x0_ex1();
    CHECK((dx - direct).cwiseAbs().maxCoeff() <= 1e-12);
  }

  TEST_CASE("consensus with v = 0 has no dual drift, equilibrium is stationary") {
    const auto flow = assemble(examples::problem1(), examples::path1());
    Eigen::VectorXd cons(8);
    cons << 0.3, -2, 0.3, -2, 0.3, -2, 0.3, -2;
    CHECK(ct_rhs(flow, {0.0, cons, Eigen::VectorXd::Zero(8)}).second.cwiseAbs().maxCoeff() == 0.0);

    const Eigen::VectorXd vs = equilibrium_dual(flow);
    const auto [dx, dv] = ct_rhs(flow, {0.0, flow.x_star(), vs});
    CHECK(dx.cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(dv.cwiseAbs().maxCoeff() <= 1e-12);

    const auto traj = simulate_ct(flow, flow.x_star(), vs, {0.005, 20.0, 10});
    for (const auto& s : traj.samples) CHECK(s.error <= 1e-10);
  }

  TEST_CASE("RK4 matches the reference integrator") {
    const auto p = examples::problem1();
    const auto g = examples::path1();
    const auto flow = assemble(p, g);
    Eigen::VectorXd x = examples::x0_ex1();
    Eigen::VectorXd v = Eigen::VectorXd::Zero(8);
    const auto traj = simulate_ct(flow, x, v, {0.005, 10.0, 2000});
    oracle::rk4_reference(p.matrix(), p.observations(), g, 0.0, x, v, 0.005, 2000);
    CHECK((traj.samples.back().x - x).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((traj.samples.back().v - v).cwiseAbs().maxCoeff() <= 1e-10);
  }

  TEST_CASE("Euler iteration matches the reference") {
    const auto p = examples::problem1();
    const auto g = examples::path1();
    const auto flow = assemble(p, g);
    Eigen::VectorXd x = examples::x0_ex1();
    Eigen::VectorXd v = Eigen::VectorXd::Zero(8);
    const auto traj = simulate_dt(flow, x, v, {0.03, 3000, 3000});
    oracle::euler_reference(p.matrix(), p.observations(), g, x, v, 0.03, 3000);
    CHECK(traj.samples.back().t == 3000.0);
    CHECK((traj.samples.back().x - x).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((traj.samples.back().v - v).cwiseAbs().maxCoeff() <= 1e-10);
  }

  TEST_CASE("discrete iterate is the power iteration of I + eps M on the shifted state") {
    const auto flow = assemble(examples::problem1(), examples::path1());
    const double eps = 0.03;
    const Eigen::VectorXd vs = equilibrium_dual(flow);
    const Eigen::VectorXd v0 = Eigen::VectorXd::Zero(8);
    const auto traj = simulate_dt(flow, examples::x0_ex1(), v0, {eps, 1000, 1});
    const int nm = 8;
    const Eigen::MatrixXd step = Eigen::MatrixXd::Identity(2 * nm, 2 * nm) + eps * flow.system;
    Eigen::VectorXd w(2 * nm), star(2 * nm);
    star << flow.x_star(), vs;
    w << examples::x0_ex1() - flow.x_star(), v0 - vs;
    REQUIRE(traj.samples.size() == 1001);
    for (std::size_t k = 1; k < traj.samples.size(); ++k) {
      w = step * w;
      Eigen::VectorXd u(2 * nm);
      u << traj.samples[k].x, traj.samples[k].v;
      CHECK((u - (w + star)).cwiseAbs().maxCoeff() <= 1e-9 * static_cast<double>(k));
    }
  }

  TEST_CASE("Lyapunov function is non-increasing along random runs") {
    std::mt19937_64 rng(2024);
    for (int run = 0; run < 20; ++run) {
      CAPTURE(run);
      const int n = 3 + run % 6;
      const int m = 1 + run % 3;
      Eigen::MatrixXd h = oracle::gaussian(n, m, rng);
      const Eigen::VectorXd z = oracle::gaussian(n, 1, rng);
      const Graph g = oracle::random_connected_graph(n, rng);
      const auto flow = assemble(NetworkLinearEquation(h, z), g);
      const Eigen::VectorXd vs = equilibrium_dual(flow);
      const auto traj = simulate_ct(flow, oracle::gaussian(n * m, 1, rng), oracle::gaussian(n * m, 1, rng),
                                    {0.01, 20.0, 1});
      double prev = lyapunov(flow, vs, traj.samples.front().x, traj.samples.front().v);
      for (std::size_t j = 1; j < traj.samples.size(); ++j) {
        const double cur = lyapunov(flow, vs, traj.samples[j].x, traj.samples[j].v);
        CHECK(cur <= prev + 1e-8 * (1.0 + prev));
        prev = cur;
      }
    }
  }

  TEST_CASE("oscillator-only flow conserves ||x||^2 + ||v||^2") {
    for (const auto& g : {examples::star4(), examples::path1(), make_family(GraphFamily::Ring, 6)}) {
      const auto flow = assemble_oscillator(g, 2);
      std::mt19937_64 rng(5);
      const Eigen::VectorXd x0 = oracle::gaussian(flow.block_size(), 1, rng);
      const Eigen::VectorXd v0 = oracle::gaussian(flow.block_size(), 1, rng);
      const double e0 = x0.squaredNorm() + v0.squaredNorm();
      const auto traj = simulate_ct(flow, x0, v0, {0.005, 100.0, 100});
      for (const auto& s : traj.samples) CHECK(std::abs(s.x.squaredNorm() + s.v.squaredNorm() - e0) <= 1e-6);
    }
  }

  TEST_CASE("discrete iterates approach the continuous flow at first order") {
    const auto flow = assemble(examples::problem1(), examples::path1());
    const Eigen::VectorXd v0 = Eigen::VectorXd::Zero(8);
    const double t = 1.0;
    const auto ref = simulate_ct(flow, examples::x0_ex1(), v0, {1e-4, t, 10000});
    Eigen::VectorXd uref(16);
    uref << ref.samples.back().x, ref.samples.back().v;
    std::vector<double> errs;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
      const auto k = static_cast<std::int64_t>(std::llround(t / eps));
      const auto d = simulate_dt(flow, examples::x0_ex1(), v0, {eps, k, static_cast<int>(k)});
      Eigen::VectorXd u(16);
      u << d.samples.back().x, d.samples.back().v;
      errs.push_back((u - uref).cwiseAbs().maxCoeff());
    }
    for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
      const double order = std::log10(errs[i] / errs[i + 1]);
      CAPTURE(order);
      CHECK(order >= 1.0);
    }
  }

  TEST_CASE("Wang-Elia flow") {
    const auto flow = assemble(examples::problem1(), examples::path1());
    const Eigen::VectorXd v0 = Eigen::VectorXd::Zero(8);
    const CtConfig cfg{0.005, 20.0, 7};

    SUBCASE("alpha = 0 is bit-identical to the plain flow") {
      const auto a = simulate_ct(flow, examples::x0_ex1(), v0, cfg);
      const auto b = simulate_wang_elia(flow, 0.0, examples::x0_ex1(), v0, cfg);
      REQUIRE(a.samples.size() == b.samples.size());
      for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].t == b.samples[i].t);
        CHECK(a.samples[i].x == b.samples[i].x);
        CHECK(a.samples[i].v == b.samples[i].v);
      }
    }
    SUBCASE("alpha = 1 matches the reference and converges on path and star") {
      const auto p = examples::problem1();
      Eigen::VectorXd x = examples::x0_ex1(), v = v0;
      const auto traj = simulate_wang_elia(flow, 1.0, x, v, {0.005, 10.0, 2000});
      oracle::rk4_reference(p.matrix(), p.observations(), examples::path1(), 1.0, x, v, 0.005, 2000);
      CHECK((traj.samples.back().x - x).cwiseAbs().maxCoeff() <= 1e-10);

      const auto y = solve_least_squares(p).y_star;
      CHECK(max_node_deviation(simulate_wang_elia(flow, 1.0, examples::x0_ex1(), v0), y) < 1e-2);
      const auto star = assemble(p, examples::star4());
      CHECK(max_node_deviation(simulate_wang_elia(star, 1.0, examples::x0_ex2(), v0), y) < 1e-2);
    }
    SUBCASE("negative alpha is rejected") {
      CHECK_THROWS_AS(simulate_wang_elia(flow, -1.0, examples::x0_ex1(), v0, cfg), Error);
    }
  }

  TEST_CASE("trajectory invariants: increasing time and recomputable error") {
    const auto p = examples::problem1();
    const auto flow = assemble(p, examples::path1());
    const auto y = solve_least_squares(p).y_star;
    const auto traj = simulate_ct(flow, examples::x0_ex1(), Eigen::VectorXd::Zero(8), {0.005, 7.003, 13});
    CHECK(traj.samples.back().t == doctest::Approx(7.003).epsilon(1e-12));
    const auto e = error_trajectory(traj, y);
    REQUIRE(e.size() == traj.samples.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (i > 0) CHECK(traj.samples[i].t > traj.samples[i - 1].t);
      Eigen::VectorXd d = traj.samples[i].x - flow.x_star();
      CHECK(std::abs(e[i].second - d.squaredNorm()) <= 1e-12);
      CHECK(std::abs(traj.samples[i].error - e[i].second) <= 1e-12);
      CHECK(std::abs(traj.samples[i].cost - cost(flow, traj.samples[i].x)) <= 1e-12);
    }
  }

  TEST_CASE("argument validation") {
    const auto flow = assemble(examples::problem1(), examples::path1());
    const Eigen::VectorXd x0 = examples::x0_ex1(), v0 = Eigen::VectorXd::Zero(8);
    auto kind_of = [](auto&& f) {
      try {
        f();
      } catch (const Error& e) {
        return e.kind();
      }
      return ErrorKind::InternalInconsistency;
    };
    CHECK(kind_of([&] { simulate_ct(flow, x0, v0, {0.0, 1.0, 1}); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([&] { simulate_ct(flow, x0, v0, {0.01, -1.0, 1}); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([&] { simulate_ct(flow, x0, v0, {0.01, 1.0, 0}); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([&] { simulate_ct(flow, x0.head(6), v0, {0.01, 1.0, 1}); }) == ErrorKind::DimensionMismatch);
    CHECK(kind_of([&] { simulate_dt(flow, x0, v0, {0.0, 10, 1}); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([&] { simulate_dt(flow, x0, v0, {0.01, 0, 1}); }) == ErrorKind::InvalidArgument);
    Eigen::VectorXd bad = x0;
    bad(3) = std::nan("");
    CHECK(kind_of([&] { simulate_ct(flow, bad, v0, {0.01, 1.0, 1}); }) == ErrorKind::InvalidArgument);
  }

  TEST_CASE("discrete dichotomy around eps*") {
    const auto p = examples::problem1();
    const auto flow = assemble(p, examples::path1());
    const Eigen::VectorXd v0 = Eigen::VectorXd::Zero(8);
    const auto y = solve_least_squares(p).y_star;

    const auto ok = simulate_dt(flow, examples::x0_ex1(), v0, {0.03, 40000, 1000});
    CHECK_FALSE(ok.diverged());
    CHECK(error_trajectory(ok, y).back().second < 1e-2);

    const auto bad = simulate_dt(flow, examples::x0_ex1(), v0, {0.04, 40000, 1000});
    REQUIRE(bad.diverged());
    CHECK(bad.samples.back().t == static_cast<double>(bad.divergence->step));
    Eigen::VectorXd u(16);
    u << bad.samples.back().x, bad.samples.back().v;
    CHECK(u.cwiseAbs().maxCoeff() > kDivergenceLimit);
  }

  TEST_CASE("Example 2 oscillation detector and Example 4 divergence pattern") {
    const auto p = examples::problem1();
    const auto star = assemble(p, examples::star4());
    const Eigen::VectorXd v0 = Eigen::VectorXd::Zero(8);
    const auto ct = simulate_ct(star, examples::x0_ex2(), v0, {0.005, 200.0, 10});
    CHECK_FALSE(ct.diverged());
    CHECK_FALSE(oscillates(ct, component_index(0, 1, 2)));
    for (int node = 1; node < 4; ++node) CHECK(oscillates(ct, component_index(node, 1, 2)));
    for (int node = 0; node < 4; ++node) CHECK(final_x(ct)(component_index(node, 0, 2)) == doctest::Approx(-1.0 / 7).epsilon(1e-2));

    const auto dt = simulate_dt(star, examples::x0_ex2(), v0, {0.01, 1000000, 1000});
    REQUIRE(dt.diverged());
    CHECK(diverged_components(dt) == std::vector<int>{3, 5, 7});
  }
}
