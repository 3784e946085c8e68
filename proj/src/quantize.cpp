#include "qanm/quantize.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qanm/errors.hpp"

namespace qanm {

QuantizationLevel::QuantizationLevel(double delta) : delta_(delta) {
  if (!std::isfinite(delta) || delta <= 0.0) {
    throw std::invalid_argument("quantization level must be finite and > 0, got " +
                                std::to_string(delta));
  }
}

std::int64_t lattice_floor(double x, double delta) {
  if (!std::isfinite(x)) {
    throw NumericError("cannot quantize non-finite value");
  }
  const double q = std::floor(x / delta);
  if (std::abs(q) >= static_cast<double>(kMaxLatticeIndex)) {
    throw OverflowError("lattice index for " + std::to_string(x) + " at level " +
                        std::to_string(delta) + " exceeds the exact integer range");
  }
  std::int64_t m = static_cast<std::int64_t>(q);
  // The division may round either way; nudge until the floor property holds
  // in double arithmetic.
  while (static_cast<double>(m + 1) * delta <= x) ++m;
  while (static_cast<double>(m) * delta > x) --m;
  return m;
}

Eigen::VectorXd quantize(const Eigen::VectorXd& x, QuantizationLevel delta) {
  Eigen::VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    out[i] = static_cast<double>(lattice_floor(x[i], delta.value())) * delta.value();
  }
  return out;
}

std::vector<std::int64_t> to_lattice(const Eigen::VectorXd& x,
                                     QuantizationLevel delta) {
  std::vector<std::int64_t> out(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    out[static_cast<std::size_t>(i)] = lattice_floor(x[i], delta.value());
  }
  return out;
}

Eigen::VectorXd from_lattice(const std::vector<std::int64_t>& m,
                             QuantizationLevel delta) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = static_cast<double>(m[i]) * delta.value();
  }
  return out;
}

}  // namespace qanm
