#ifndef QANM_QUANTIZE_HPP_
#define QANM_QUANTIZE_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace qanm {

// Uniform asymmetric mid-tread quantization step. The value is validated once
// at construction; all lattice helpers take it by value.
class QuantizationLevel {
 public:
  explicit QuantizationLevel(double delta);

  double value() const { return delta_; }

 private:
  double delta_;
};

// Largest lattice index magnitude for which index*delta stays an exact
// double-precision integer product. Conversions beyond this throw instead of
// silently losing lattice exactness.
inline constexpr std::int64_t kMaxLatticeIndex = 1LL << 53;

// floor(x / delta) corrected so that the result m always satisfies
// m*delta <= x < (m+1)*delta in double arithmetic. This makes quantization
// idempotent on lattice points regardless of rounding in the division.
std::int64_t lattice_floor(double x, double delta);

// Component-wise delta * floor(x_i / delta); floor is toward -infinity.
Eigen::VectorXd quantize(const Eigen::VectorXd& x, QuantizationLevel delta);

// Component-wise floor(x_i / delta) as integers, so that
// quantize(x, delta) == delta * to_lattice(x, delta) exactly.
std::vector<std::int64_t> to_lattice(const Eigen::VectorXd& x,
                                     QuantizationLevel delta);

Eigen::VectorXd from_lattice(const std::vector<std::int64_t>& m,
                             QuantizationLevel delta);

}  // namespace qanm

#endif  // QANM_QUANTIZE_HPP_
