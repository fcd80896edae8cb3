#include "lsqflow/error.hpp"
#include "lsqflow/switching.hpp"
#include "support/examples.hpp"

#include <doctest.h>

#include <cmath>

using namespace lsqflow;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InternalInconsistency;
}

Eigen::VectorXd ones(int n) { return Eigen::VectorXd::Ones(n); }

}  // namespace

TEST_SUITE("switching") {
  TEST_CASE("signal validation and active index") {
    const SwitchingSignal s(2.0, {examples::g1(), examples::g2()});
    CHECK(s.active_index(0.0) == 0);
    CHECK(s.active_index(1.999) == 0);
    CHECK(s.active_index(2.0) == 1);
    CHECK(s.active_index(4.0) == 0);
    CHECK(s.active_index(7.5) == 1);
    CHECK(kind_of([] { SwitchingSignal(0.0, {examples::g1()}); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { SwitchingSignal(1.0, {}); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { SwitchingSignal(1.0, {examples::g1(), examples::star4()}); }) == ErrorKind::DimensionMismatch);
  }

  TEST_CASE("step alignment is enforced") {
    const auto p = examples::problem5();
    const SwitchingSignal s(1.0, {examples::g1(), examples::g2()});
    CHECK(kind_of([&] { simulate_switching(p, s, examples::x0_ex5(), ones(10), {0.3, 3.0, 1}); }) ==
          ErrorKind::StepAlignment);
    CHECK(kind_of([&] { simulate_switching(p, s, examples::x0_ex5(), ones(10), {0.01, 2.5, 1}); }) ==
          ErrorKind::StepAlignment);
    CHECK_NOTHROW(simulate_switching(p, s, examples::x0_ex5(), ones(10), {0.01, 2.0, 1}));
  }

  TEST_CASE("identical graphs reproduce the fixed-graph run bit for bit") {
    const auto p = examples::problem5();
    const SwitchingSignal s(0.5, {examples::g1(), examples::g1()});
    const CtConfig cfg{0.005, 10.0, 3};
    const auto sw = simulate_switching(p, s, examples::x0_ex5(), ones(10), cfg);
    const auto fixed = simulate_ct(assemble(p, examples::g1()), examples::x0_ex5(), ones(10), cfg);
    REQUIRE(sw.samples.size() == fixed.samples.size());
    for (std::size_t i = 0; i < sw.samples.size(); ++i) {
      CHECK(sw.samples[i].t == fixed.samples[i].t);
      CHECK(sw.samples[i].x == fixed.samples[i].x);
      CHECK(sw.samples[i].v == fixed.samples[i].v);
    }
  }

  TEST_CASE("state is continuous across switch instants") {
    const auto p = examples::problem5();
    const double h = 0.01;
    const SwitchingSignal s(0.5, {examples::g1(), examples::g2()});
    const auto traj = simulate_switching(p, s, examples::x0_ex5(), ones(10), {h, 2.0, 1});
    // Each step moves the state by O(h); a jump at a switch would show as an outlier.
    double worst_regular = 0.0, worst_switch = 0.0;
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
      Eigen::VectorXd a(20), b(20);
      a << traj.samples[i - 1].x, traj.samples[i - 1].v;
      b << traj.samples[i].x, traj.samples[i].v;
      const double jump = (b - a).cwiseAbs().maxCoeff();
      const bool at_switch = s.active_index(traj.samples[i - 1].t + 0.5 * h) != s.active_index(traj.samples[i].t + 0.5 * h);
      (at_switch ? worst_switch : worst_regular) = std::max(at_switch ? worst_switch : worst_regular, jump);
    }
    CHECK(worst_switch > 0.0);
    CHECK(worst_switch <= 3.0 * worst_regular);
    CHECK(worst_regular <= 100.0 * h);
  }

  TEST_CASE("limit set of Example 1 on the path") {
    const auto p = examples::problem1();
    const auto k = limit_set(p, examples::path1());
    CHECK(k.span_basis.cols() == 2);
    CHECK((k.span_basis.transpose() * k.span_basis - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-10);
    const auto flow = assemble(p, examples::path1());
    CHECK(k.contains(equilibrium_dual(flow)));
    CHECK(k.contains(k.base_point + k.span_basis * Eigen::Vector2d(3.0, -7.0)));
    Eigen::VectorXd off = Eigen::VectorXd::Zero(8);
    off(0) = 1.0;
    off(2) = -1.0;
    CHECK_FALSE(k.contains(k.base_point + off));
    CHECK(kind_of([&] { limit_set(p, examples::star4()); }) == ErrorKind::ConditionViolated);
  }

  TEST_CASE("affine intersection on constructed cases") {
    LimitSet a{Eigen::Vector3d(0, 0, 0), Eigen::MatrixXd(Eigen::Vector3d(1, 0, 0))};
    LimitSet b{Eigen::Vector3d(5, 0, 0.75), Eigen::MatrixXd(Eigen::Vector3d(1, 0, 0))};
    const auto r = limit_sets_intersect(a, b);
    CHECK_FALSE(r.intersect);
    CHECK(r.distance == doctest::Approx(0.75).epsilon(1e-12));

    const auto self = limit_sets_intersect(a, a);
    CHECK(self.intersect);
    CHECK(self.distance == doctest::Approx(0.0));

    LimitSet c{Eigen::Vector3d(2, 1, 0), Eigen::MatrixXd(Eigen::Vector3d(0, 1, 0))};
    CHECK(limit_sets_intersect(a, c).intersect);

    LimitSet d{Eigen::Vector2d(0, 0), Eigen::MatrixXd(Eigen::Vector2d(1, 0))};
    CHECK(kind_of([&] { limit_sets_intersect(a, d); }) == ErrorKind::DimensionMismatch);
  }

  TEST_CASE("Example 5 limit sets are disjoint planes") {
    const auto p = examples::problem5();
    const auto k1 = limit_set(p, examples::g1());
    const auto k2 = limit_set(p, examples::g2());
    CHECK(k1.span_basis.cols() == 2);
    CHECK(k2.span_basis.cols() == 2);
    const auto r = limit_sets_intersect(k1, k2);
    CHECK_FALSE(r.intersect);
    CHECK(r.distance > 1e-3);
  }

  TEST_CASE("tail sup of a stationary run is zero") {
    const auto p = examples::problem5();
    const auto flow = assemble(p, examples::g1());
    const auto traj = simulate_ct(flow, flow.x_star(), equilibrium_dual(flow), {0.01, 5.0, 1});
    CHECK(tail_sup_error(traj) <= 1e-20);
    CHECK(kind_of([&] { tail_sup_error(traj, 1.5); }) == ErrorKind::InvalidArgument);
  }

  TEST_CASE("period estimator recovers a known period") {
    std::vector<std::pair<double, double>> s;
    for (int i = 0; i < 4000; ++i) {
      const double t = 0.05 * i;
      s.emplace_back(t, std::sin(2 * M_PI * t / 7.5) + 0.3 * std::cos(4 * M_PI * t / 7.5));
    }
    CHECK(estimate_period(s, 12.0) == doctest::Approx(7.5).epsilon(0.05 / 7.5));
    std::vector<std::pair<double, double>> flat(10, {0.0, 1.0});
    for (int i = 0; i < 10; ++i) flat[i].first = i;
    CHECK(kind_of([&] { estimate_period(flat, 3.0); }) == ErrorKind::InvalidArgument);
  }

  TEST_CASE("Example 5: the error oscillates with period 2T") {
    const auto p = examples::problem5();
    const auto y = solve_least_squares(p).y_star;
    for (double period : {10.0, 1.0}) {
      CAPTURE(period);
      const SwitchingSignal s(period, {examples::g1(), examples::g2()});
      const auto traj = simulate_switching(p, s, examples::x0_ex5(), ones(10), {0.005, 24 * period, 2});
      const auto e = error_trajectory(traj, y);
      const double sample_dt = e[1].first - e[0].first;
      CHECK(std::abs(estimate_period(e, 3 * period) - 2 * period) <= sample_dt);
      CHECK(tail_sup_error(traj) > 1e-3);
    }
  }

  TEST_CASE("support fingerprints of the switching pair") {
    CHECK(matches_support_fingerprint(examples::g1(), {{0, 1, 2, 3, 4}, {0, 1}}));
    CHECK(matches_support_fingerprint(examples::g2(), {{0, 1, 2, 3, 4}, {0, 2}}));
    CHECK_FALSE(matches_support_fingerprint(examples::g2(), {{0, 1, 2, 3, 4}, {0, 1}}));
    CHECK_FALSE(matches_support_fingerprint(make_family(GraphFamily::Path, 5), {{0, 1, 2, 3, 4}, {0, 1}}));
  }

  TEST_CASE("Example 6: condition fails on both graphs, faster switching shrinks the tail") {
    const auto p = examples::problem6();
    CHECK_FALSE(check_condition(p, examples::g1(), CheckMethod::Both).holds);
    CHECK_FALSE(check_condition(p, examples::g2(), CheckMethod::Both).holds);

    const CtConfig cfg{0.005, 200.0, 5};
    std::vector<double> sups;
    for (double period : {0.5, 0.25, 0.1}) {
      const SwitchingSignal s(period, {examples::g1(), examples::g2()});
      sups.push_back(tail_sup_error(simulate_switching(p, s, examples::x0_ex6(), ones(15), cfg)));
    }
    CHECK(sups[0] > sups[1]);
    CHECK(sups[1] > sups[2]);
    for (const auto& g : {examples::g1(), examples::g2()}) {
      const double fixed = tail_sup_error(simulate_ct(assemble(p, g), examples::x0_ex6(), ones(15), cfg));
      CHECK(sups[2] < fixed);
    }
  }
}
