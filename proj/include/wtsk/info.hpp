#ifndef WTSK_INFO_HPP
#define WTSK_INFO_HPP

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace wtsk {

// All information quantities are in bits (log base 2). Conventions:
//   0 * log 0 = 0;  p * log(p/0) = +infinity for p > 0.
// Probabilities at or below support_eps are treated as exact zeros when
// forming supports, so downstream 0*log0 handling is stable.
inline constexpr double support_eps = 1e-12;

using ProbVector = std::vector<double>;

// Small dense nonnegative tensor over a product alphabet, row-major layout.
// The trailing axis varies fastest. Marginalization always accumulates in a
// single row-major scan, so summation order is fixed and results are
// bit-reproducible across runs.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape);
  Tensor(std::vector<int> shape, std::vector<double> data);

  int rank() const { return static_cast<int>(shape_.size()); }
  const std::vector<int>& shape() const { return shape_; }
  int dim(int axis) const { return shape_[static_cast<std::size_t>(axis)]; }
  std::size_t size() const { return data_.size(); }

  double& operator[](std::size_t flat) { return data_[flat]; }
  double operator[](std::size_t flat) const { return data_[flat]; }
  double& at(std::initializer_list<int> idx) { return data_[flat_index(idx)]; }
  double at(std::initializer_list<int> idx) const { return data_[flat_index(idx)]; }
  std::size_t flat_index(std::initializer_list<int> idx) const;

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  double sum() const;

  // Marginal over the axes in `keep` (given in increasing original order);
  // the result's axes follow that order.
  Tensor marginal(const std::vector<int>& keep) const;

  // Throws validation_error unless entries are nonnegative (within -1e-12)
  // and the total mass is 1 within tol.
  void validate_distribution(double tol = 1e-9) const;

 private:
  std::vector<int> shape_;
  std::vector<std::size_t> strides_;
  std::vector<double> data_;
  void init_strides();
};

// Axis groups for measures on a joint tensor. Order inside a group is
// irrelevant (entropies only depend on the marginal's mass function).
using AxisSet = std::vector<int>;

double entropy(const ProbVector& p);
double entropy(const Tensor& joint);                       // H(all axes)
double entropy(const Tensor& joint, const AxisSet& a);     // H(A)

// H(A|B) = H(A,B) - H(B). The two-argument-free overload reads axis 0 as A
// and the remaining axes as B.
double conditional_entropy(const Tensor& joint);
double conditional_entropy(const Tensor& joint, const AxisSet& a, const AxisSet& b);

// I(A;B) = H(A) + H(B) - H(A,B), clamped to 0 at -1e-9 rounding noise.
double mutual_information(const Tensor& joint);            // axis 0 vs rest
double mutual_information(const Tensor& joint, const AxisSet& a, const AxisSet& b);

// I(A;B|C) = H(A,C) + H(B,C) - H(A,B,C) - H(C), clamped like above.
double conditional_mutual_information(const Tensor& joint);  // axis0;axis1|rest
double conditional_mutual_information(const Tensor& joint, const AxisSet& a,
                                      const AxisSet& b, const AxisSet& c);

// D(p||q) in bits; +infinity when p puts mass where q has none.
double kl_divergence(const ProbVector& p, const ProbVector& q);

double total_variation(const ProbVector& p, const ProbVector& q);

// h(p) = -p log2 p - (1-p) log2 (1-p) on [0,1].
double binary_entropy(double p);

// Inverse of h on [0, 1/2]: returns p with h(p) = target, by bisection.
double binary_entropy_inverse(double target);

}  // namespace wtsk

#endif
