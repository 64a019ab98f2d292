#include "fivegcs/baselines.hpp"
#include "fivegcs/harness.hpp"
#include "fivegcs/synthetic.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace fivegcs;
using testing::quadratic_reference;
using testing::rel_err;

namespace {

RunControl rounds(std::size_t n) {
  RunControl c;
  c.eps = 1e-300;
  c.max_rounds = n;
  c.wall_time = false;
  return c;
}

Problem identical_clients(std::size_t clients) {
  SeededRng rng(3);
  const Matrix r = testing::random_rotation(3, rng);
  Vector e(3);
  e << 4.0, 1.0, 0.2;
  const Matrix q = r * e.asDiagonal() * r.transpose();
  auto loss = std::make_shared<QuadraticLoss>(0.5 * (q + q.transpose()), testing::random_vector(3, rng));
  return Problem(std::vector<std::shared_ptr<const Loss>>(clients, loss), 0.1);
}

}  // namespace

TEST_CASE("baseline names and defaults") {
  CHECK(parse_baseline("scaffold") == BaselineMethod::scaffold);
  CHECK(to_string(BaselineMethod::proxskip) == "proxskip");
  CHECK_THROWS_AS(parse_baseline("fedavg"), ConfigError);
  const Problem p = testing::uniform_quadratic(4, 3, 99.0, 1.0);
  const auto gd = default_baseline(p, BaselineMethod::gd, 2);
  CHECK(gd.stepsize == doctest::Approx(0.01));
  CHECK(gd.cohort == 4);
  const auto lg = default_baseline(p, BaselineMethod::localgd, 2);
  const auto k = static_cast<std::size_t>(std::ceil(std::sqrt(p.kappa())));
  CHECK(lg.local_steps == k);
  CHECK(lg.stepsize == doctest::Approx(1.0 / (6.0 * p.L() * static_cast<double>(k))));
  const auto ps = default_baseline(p, BaselineMethod::proxskip, 2);
  CHECK(ps.probability == doctest::Approx(0.1));
  CHECK(ps.stepsize == doctest::Approx(0.01));
  CHECK_THROWS_AS(default_baseline(p, BaselineMethod::scaffold, 5), ConfigError);
}

TEST_CASE("GD matches the hand-written iteration") {
  const Problem p = testing::uniform_quadratic(3, 3, 9.0, 1.0);
  const auto ref = quadratic_reference(p);
  const auto r = run_gd(p, ref, 0.1, rounds(5));
  Vector x = Vector::Zero(3);
  for (int t = 0; t < 5; ++t) x -= 0.1 * p.grad_f(x);
  CHECK(rel_err(r.x_final, x) < 1e-15);
  CHECK(r.trace.size() == 6);
  CHECK(r.trace.back().uploads == 15);
  CHECK(r.trace[0].psi == r.trace[0].dist_sq);
}

TEST_CASE("LocalGD with K = 1 and full participation is GD") {
  const Problem p = testing::uniform_quadratic(3, 3, 9.0, 1.0);
  const auto ref = quadratic_reference(p);
  BaselineConfig c{BaselineMethod::localgd, 0.05, 1, 3, 1.0};
  const auto a = run_localgd(p, ref, c, rounds(20), 0);
  const auto b = run_gd(p, ref, 0.05, rounds(20));
  CHECK(rel_err(a.x_final, b.x_final) < 1e-13);
}

TEST_CASE("LocalGD drifts on heterogeneous clients; Scaffold does not") {
  std::vector<std::vector<double>> spectra{{4.0, 0.1}, {0.1, 4.0}};
  const Problem p = testing::quadratic_problem(spectra, 0.2);
  const auto ref = quadratic_reference(p);
  BaselineConfig c{BaselineMethod::localgd, 0.05, 20, 2, 1.0};
  const auto lg = run_localgd(p, ref, c, rounds(400), 0);
  c.method = BaselineMethod::scaffold;
  const auto sc = run_scaffold(p, ref, c, rounds(400), 0);
  const double d0 = lg.trace.front().dist_sq;
  CHECK(lg.trace.back().dist_sq > 1e-6 * d0);
  CHECK(std::abs(lg.trace.back().dist_sq - lg.trace[300].dist_sq) < 1e-9 * d0);
  CHECK(sc.trace.back().dist_sq < 1e-20 * d0);
}

TEST_CASE("Scaffold on identical clients follows LocalGD") {
  const Problem p = identical_clients(4);
  const auto ref = quadratic_reference(p);
  BaselineConfig c{BaselineMethod::localgd, 0.02, 5, 4, 1.0};
  const auto lg = run_localgd(p, ref, c, rounds(30), 1);
  c.method = BaselineMethod::scaffold;
  const auto sc = run_scaffold(p, ref, c, rounds(30), 1);
  for (std::size_t t = 0; t < lg.trace.size(); ++t) {
    CHECK(sc.trace[t].dist_sq == doctest::Approx(lg.trace[t].dist_sq).epsilon(1e-10));
  }
  CHECK(sc.trace.back().uploads == 2 * lg.trace.back().uploads);
}

TEST_CASE("ProxSkip with p = 1 and full participation is GD") {
  const Problem p = testing::uniform_quadratic(3, 3, 9.0, 1.0);
  const auto ref = quadratic_reference(p);
  BaselineConfig c{BaselineMethod::proxskip, 0.1, 1, 3, 1.0};
  const auto a = run_proxskip(p, ref, c, rounds(25), 0);
  const auto b = run_gd(p, ref, 0.1, rounds(25));
  CHECK(rel_err(a.x_final, b.x_final) < 1e-12);
}

TEST_CASE("ProxSkip with full participation beats GD on an ill-conditioned problem") {
  const Problem p = make_synthetic_problem(parse_synthetic("logistic:d=10,n=20,kappa=10000"), 4);
  const auto ref = compute_reference(p);
  RunControl c = rounds(100000);
  c.eps = 1e-6;
  const auto r = run_proxskip(p, ref, default_baseline(p, BaselineMethod::proxskip, 4), c, 2);
  REQUIRE(r.rounds_to_eps);
  const auto g = run_gd(p, ref, 1.0 / p.L(), c);
  REQUIRE(g.rounds_to_eps);
  CHECK(*r.rounds_to_eps < *g.rounds_to_eps);
}

TEST_CASE("baselines: serial and OpenMP runs agree bitwise") {
  SyntheticSpec spec;
  spec.kind = SyntheticKind::logistic;
  spec.dimension = 5;
  spec.points = 10;
  spec.kappa = 50;
  const Problem p = make_logistic_problem(spec, 6);
  ReferenceSolution ref{Vector::Zero(5), {}, 0.0};
  for (auto m : {BaselineMethod::localgd, BaselineMethod::scaffold}) {
    const auto c = default_baseline(p, m, 3);
    const auto a = run_baseline(p, ref, c, rounds(15), 4, Execution::serial);
    const auto b = run_baseline(p, ref, c, rounds(15), 4, Execution::parallel);
    CHECK(a.x_final == b.x_final);
  }
}

TEST_CASE("baseline config errors") {
  const Problem p = testing::uniform_quadratic(3, 3, 9.0, 1.0);
  const auto ref = quadratic_reference(p);
  CHECK_THROWS_AS(run_gd(p, ref, 0.0, rounds(1)), ConfigError);
  CHECK_THROWS_AS(run_localgd(p, ref, BaselineConfig{BaselineMethod::localgd, 0.1, 0, 2, 1.0}, rounds(1), 0),
                  ConfigError);
  CHECK_THROWS_AS(run_proxskip(p, ref, BaselineConfig{BaselineMethod::proxskip, 0.1, 1, 2, 0.0}, rounds(1), 0),
                  ConfigError);
}
