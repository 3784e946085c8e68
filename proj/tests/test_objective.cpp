#include <doctest.h>

#include <cmath>
#include <vector>

#include "qanm/objective.hpp"
#include "qanm/rng.hpp"

using qanm::build_scenario_objectives;
using qanm::global_constants;
using qanm::global_optimum;
using qanm::momentum_coefficients;
using qanm::QuadraticObjective;
using qanm::Scenario;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

Eigen::MatrixXd shared_matrix() {
  Eigen::VectorXd diag(5);
  diag << 1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2, 1.0;
  return diag.asDiagonal();
}

// Central finite differences, the independent gradient oracle.
Eigen::VectorXd fd_gradient(const QuadraticObjective& obj, const Eigen::VectorXd& x,
                            double h = 1e-5) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Eigen::VectorXd hi = x;
    Eigen::VectorXd lo = x;
    hi[j] += h;
    lo[j] -= h;
    g[j] = (obj.evaluate(hi) - obj.evaluate(lo)) / (2.0 * h);
  }
  return g;
}

QuadraticObjective random_objective(qanm::Rng& rng, int dim) {
  Eigen::MatrixXd m(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) m(r, c) = rng.uniform(-1.0, 1.0);
  }
  Eigen::MatrixXd p = m.transpose() * m + 0.3 * Eigen::MatrixXd::Identity(dim, dim);
  Eigen::VectorXd anchor(dim);
  for (int j = 0; j < dim; ++j) anchor[j] = rng.uniform(-5.0, 5.0);
  return QuadraticObjective(rng.uniform(0.5, 4.0), p, anchor);
}

}  // namespace

TEST_CASE("evaluation examples") {
  QuadraticObjective a(2.0, Eigen::MatrixXd::Identity(2, 2), vec({0.0, 0.0}));
  CHECK(a.evaluate(vec({0.0, 0.0})) == 0.0);
  CHECK(a.evaluate(vec({3.0, 4.0})) == doctest::Approx(25.0).epsilon(1e-15));

  QuadraticObjective b(1.0, shared_matrix(), Eigen::VectorXd::Zero(5));
  CHECK(b.evaluate(vec({4.0, 0.0, 0.0, 0.0, 0.0})) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("gradient examples and finite-difference oracle") {
  QuadraticObjective a(1.0, 2.0 * Eigen::MatrixXd::Identity(1, 1), vec({1.0}));
  CHECK(a.gradient(vec({1.0}))[0] == 0.0);
  CHECK(a.gradient(vec({3.0}))[0] == doctest::Approx(4.0).epsilon(1e-15));
  CHECK_THROWS_AS(a.gradient(vec({1.0, 2.0})), std::invalid_argument);

  qanm::Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 1 + static_cast<int>(rng.uniform_int(0, 4));
    const QuadraticObjective obj = random_objective(rng, dim);
    Eigen::VectorXd x(dim);
    for (int j = 0; j < dim; ++j) x[j] = rng.uniform(-5.0, 5.0);
    const Eigen::VectorXd g = obj.gradient(x);
    const Eigen::VectorXd fd = fd_gradient(obj, x);
    CHECK((g - fd).norm() <= 1e-6 * std::max(1.0, g.norm()));
  }
}

TEST_CASE("derived curvature constants") {
  QuadraticObjective identity(1.0, Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(3));
  CHECK(identity.condition_number() == 1.0);
  CHECK(identity.momentum_coefficient() == 0.0);

  QuadraticObjective shared(1.0, shared_matrix(), Eigen::VectorXd::Zero(5));
  CHECK(shared.strong_convexity() == doctest::Approx(1.0 / 16).epsilon(1e-15));
  CHECK(shared.smoothness() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(shared.condition_number() == doctest::Approx(16.0).epsilon(1e-15));
  CHECK(shared.momentum_coefficient() == doctest::Approx(0.6).epsilon(1e-15));

  // kappa = 9 gives beta = (3-1)/(3+1) = 0.5.
  QuadraticObjective nine(1.0, vec({1.0, 9.0}).asDiagonal(), Eigen::VectorXd::Zero(2));
  CHECK(nine.momentum_coefficient() == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("invalid matrices are rejected") {
  CHECK_THROWS_AS(QuadraticObjective(1.0, vec({1.0, -1.0}).asDiagonal(),
                                     Eigen::VectorXd::Zero(2)),
                  std::invalid_argument);
  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.5, -0.5, 1.0;
  CHECK_THROWS_AS(QuadraticObjective(1.0, asym, Eigen::VectorXd::Zero(2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(QuadraticObjective(0.0, Eigen::MatrixXd::Identity(2, 2),
                                     Eigen::VectorXd::Zero(2)),
                  std::invalid_argument);
}

TEST_CASE("strong convexity and smoothness inequalities hold on random pairs") {
  qanm::Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const QuadraticObjective obj = random_objective(rng, 4);
    Eigen::VectorXd xa(4);
    Eigen::VectorXd xb(4);
    for (int j = 0; j < 4; ++j) {
      xa[j] = rng.uniform(-5.0, 5.0);
      xb[j] = rng.uniform(-5.0, 5.0);
    }
    const double lower = obj.evaluate(xa) + obj.gradient(xa).dot(xb - xa) +
                         0.5 * obj.strong_convexity() * (xb - xa).squaredNorm();
    CHECK(obj.evaluate(xb) >= lower - 1e-9 * std::abs(lower));
    CHECK((obj.gradient(xa) - obj.gradient(xb)).norm() <=
          obj.smoothness() * (xa - xb).norm() * (1.0 + 1e-12));
  }
}

TEST_CASE("global optimum oracle") {
  // Two identical nodes anchored at a and b minimize at the midpoint.
  QuadraticObjective a(2.0, shared_matrix(), vec({1.0, 2.0, 3.0, 4.0, 5.0}));
  QuadraticObjective b(2.0, shared_matrix(), vec({5.0, 4.0, 3.0, 2.0, 1.0}));
  const Eigen::VectorXd mid = global_optimum({a, b});
  CHECK((mid - vec({3.0, 3.0, 3.0, 3.0, 3.0})).norm() <= 1e-12);

  // A single node minimizes at its anchor.
  const Eigen::VectorXd solo = global_optimum({a});
  CHECK((solo - a.anchor()).norm() <= 1e-12);

  // Full-scale ensemble: the summed gradient vanishes at the solution.
  const auto objectives = build_scenario_objectives(Scenario::kPersonalized, 20, 5, 99);
  const Eigen::VectorXd x_star = global_optimum(objectives);
  Eigen::VectorXd gradient_sum = Eigen::VectorXd::Zero(5);
  double scale = 0.0;
  for (const auto& obj : objectives) {
    gradient_sum += obj.gradient(x_star);
    scale += (obj.omega() * (obj.p_matrix() * obj.anchor())).norm();
  }
  CHECK(gradient_sum.norm() <= 1e-10 * scale);
}

TEST_CASE("shared scenario construction") {
  const auto objectives = build_scenario_objectives(Scenario::kShared, 20, 5, 4);
  REQUIRE(objectives.size() == 20);
  for (const auto& obj : objectives) {
    CHECK(obj.p_matrix() == shared_matrix());
    CHECK(obj.momentum_coefficient() == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(obj.omega() >= 1.0);
    CHECK(obj.omega() <= 5.0);
    for (Eigen::Index j = 0; j < 5; ++j) {
      CHECK(obj.anchor()[j] >= 1.0);
      CHECK(obj.anchor()[j] <= 5.0);
    }
  }
  const auto betas = momentum_coefficients(objectives, std::nullopt);
  const auto constants = global_constants(objectives, betas);
  CHECK(constants.beta_tilde == 0.0);

  const auto single = build_scenario_objectives(Scenario::kShared, 1, 5, 9);
  REQUIRE(single.size() == 1);
  CHECK(single.front().condition_number() == doctest::Approx(16.0).epsilon(1e-15));
}

TEST_CASE("personalized scenario construction") {
  const auto objectives = build_scenario_objectives(Scenario::kPersonalized, 20, 5, 4);
  REQUIRE(objectives.size() == 20);
  for (const auto& obj : objectives) {
    // Positive definiteness was checked at construction; spot-check symmetry
    // and that the perturbation actually changed the matrix.
    CHECK((obj.p_matrix() - obj.p_matrix().transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  }
  const auto betas = momentum_coefficients(objectives, std::nullopt);
  const auto constants = global_constants(objectives, betas);
  CHECK(constants.beta_tilde > 0.0);
}

TEST_CASE("scenario construction is deterministic") {
  const auto a = build_scenario_objectives(Scenario::kPersonalized, 6, 5, 31);
  const auto b = build_scenario_objectives(Scenario::kPersonalized, 6, 5, 31);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].omega() == b[i].omega());
    CHECK(a[i].anchor() == b[i].anchor());
    CHECK(a[i].p_matrix() == b[i].p_matrix());
  }
}

TEST_CASE("momentum override") {
  const auto objectives = build_scenario_objectives(Scenario::kShared, 3, 5, 1);
  const auto forced = momentum_coefficients(objectives, 0.0);
  for (double beta : forced) CHECK(beta == 0.0);
  const auto constants = global_constants(objectives, forced);
  CHECK(constants.beta_hat == 0.0);
  CHECK(constants.beta_tilde == 0.0);
}
