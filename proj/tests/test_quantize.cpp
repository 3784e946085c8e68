#include <doctest.h>

#include <vector>

#include "qanm/errors.hpp"
#include "qanm/quantize.hpp"
#include "qanm/rng.hpp"

using qanm::from_lattice;
using qanm::QuantizationLevel;
using qanm::quantize;
using qanm::to_lattice;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("level validation") {
  CHECK_THROWS_AS(QuantizationLevel(0.0), std::invalid_argument);
  CHECK_THROWS_AS(QuantizationLevel(-0.5), std::invalid_argument);
  CHECK_NOTHROW(QuantizationLevel(1e-6));
}

TEST_CASE("floor is toward minus infinity") {
  const QuantizationLevel half(0.5);
  CHECK(quantize(vec({1.3}), half)[0] == 1.0);
  CHECK(quantize(vec({-0.3}), half)[0] == -0.5);
  CHECK(to_lattice(vec({1.3}), half) == std::vector<std::int64_t>{2});
  CHECK(to_lattice(vec({-0.3}), half) == std::vector<std::int64_t>{-1});
}

TEST_CASE("lattice points are fixed points") {
  const QuantizationLevel half(0.5);
  const Eigen::VectorXd x = vec({2.0, 0.0});
  CHECK(quantize(x, half) == x);
}

TEST_CASE("lattice integer examples") {
  CHECK(to_lattice(vec({0.0, 0.0, 0.0}), QuantizationLevel(0.25)) ==
        std::vector<std::int64_t>{0, 0, 0});
  CHECK(to_lattice(vec({5.0}), QuantizationLevel(0.001)) ==
        std::vector<std::int64_t>{5000});
}

TEST_CASE("overflow and non-finite inputs are loud") {
  CHECK_THROWS_AS(to_lattice(vec({1e300}), QuantizationLevel(1e-6)), qanm::OverflowError);
  CHECK_THROWS_AS(to_lattice(vec({std::numeric_limits<double>::quiet_NaN()}),
                             QuantizationLevel(1.0)),
                  qanm::NumericError);
}

TEST_CASE("idempotence, error bound and monotonicity on random vectors") {
  qanm::Rng rng(2024);
  const double deltas[] = {1.0, 0.5, 1e-3, 1e-6, 0.07};
  for (double delta_value : deltas) {
    const QuantizationLevel delta(delta_value);
    for (int trial = 0; trial < 200; ++trial) {
      Eigen::VectorXd x(4);
      Eigen::VectorXd y(4);
      for (int j = 0; j < 4; ++j) {
        x[j] = rng.uniform(-50.0, 50.0);
        y[j] = x[j] + rng.uniform(0.0, 5.0);  // y >= x component-wise
      }
      const Eigen::VectorXd qx = quantize(x, delta);
      const Eigen::VectorXd qy = quantize(y, delta);

      // Exact idempotence on the quantized output.
      CHECK(quantize(qx, delta) == qx);
      // Quantizer output equals the scaled lattice integers exactly.
      CHECK(from_lattice(to_lattice(x, delta), delta) == qx);

      for (int j = 0; j < 4; ++j) {
        const double err = x[j] - qx[j];
        CHECK(err >= 0.0);
        CHECK(err < delta_value);
        CHECK(qx[j] <= qy[j]);  // monotone per component
      }
    }
  }
}
