#include "wtsk/info.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wtsk/errors.hpp"

namespace wtsk {

namespace {

constexpr double kMiClamp = -1e-9;

double plog2p(double p) {
  if (p <= support_eps) return 0.0;
  return p * std::log2(p);
}

double clamp_measure(double v) {
  if (v < 0.0 && v >= kMiClamp) return 0.0;
  return v;
}

}  // namespace

Tensor::Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
  init_strides();
}

Tensor::Tensor(std::vector<int> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  std::size_t n = 1;
  for (int d : shape_) n *= static_cast<std::size_t>(d);
  if (n != data_.size())
    throw validation_error("tensor data length does not match shape");
  std::vector<double> keep = std::move(data_);
  init_strides();
  data_ = std::move(keep);
}

void Tensor::init_strides() {
  for (int d : shape_) {
    if (d <= 0) throw validation_error("tensor axis size must be positive");
  }
  strides_.assign(shape_.size(), 1);
  for (int i = static_cast<int>(shape_.size()) - 2; i >= 0; --i) {
    strides_[static_cast<std::size_t>(i)] =
        strides_[static_cast<std::size_t>(i) + 1] *
        static_cast<std::size_t>(shape_[static_cast<std::size_t>(i) + 1]);
  }
  std::size_t n = 1;
  for (int d : shape_) n *= static_cast<std::size_t>(d);
  data_.assign(n, 0.0);
}

std::size_t Tensor::flat_index(std::initializer_list<int> idx) const {
  if (idx.size() != shape_.size())
    throw validation_error("tensor index rank mismatch");
  std::size_t flat = 0;
  std::size_t axis = 0;
  for (int i : idx) {
    if (i < 0 || i >= shape_[axis])
      throw validation_error("tensor index out of range");
    flat += static_cast<std::size_t>(i) * strides_[axis];
    ++axis;
  }
  return flat;
}

double Tensor::sum() const {
  double s = 0.0;
  for (double v : data_) s += v;
  return s;
}

Tensor Tensor::marginal(const std::vector<int>& keep) const {
  const int r = rank();
  std::vector<int> out_shape;
  out_shape.reserve(keep.size());
  int prev = -1;
  for (int a : keep) {
    if (a < 0 || a >= r) throw validation_error("marginal axis out of range");
    if (a <= prev) throw validation_error("marginal axes must be strictly increasing");
    prev = a;
    out_shape.push_back(shape_[static_cast<std::size_t>(a)]);
  }
  if (out_shape.empty()) out_shape.push_back(1);
  Tensor out(out_shape);

  // Row-major scan of the full tensor; trailing indices vary fastest, so the
  // sum over dropped axes happens in a fixed deterministic order.
  std::vector<int> idx(static_cast<std::size_t>(r), 0);
  std::vector<std::size_t> out_stride_of_axis(static_cast<std::size_t>(r), 0);
  {
    std::size_t os = 1;
    for (int k = static_cast<int>(keep.size()) - 1; k >= 0; --k) {
      out_stride_of_axis[static_cast<std::size_t>(keep[static_cast<std::size_t>(k)])] = os;
      os *= static_cast<std::size_t>(out_shape[static_cast<std::size_t>(k)]);
    }
  }
  std::size_t out_flat = 0;
  for (std::size_t flat = 0; flat < data_.size(); ++flat) {
    out.data_[out_flat] += data_[flat];
    // Increment the multi-index and maintain the output offset.
    for (int a = r - 1; a >= 0; --a) {
      std::size_t ua = static_cast<std::size_t>(a);
      if (++idx[ua] < shape_[ua]) {
        out_flat += out_stride_of_axis[ua];
        break;
      }
      idx[ua] = 0;
      out_flat -= out_stride_of_axis[ua] * static_cast<std::size_t>(shape_[ua] - 1);
    }
  }
  return out;
}

void Tensor::validate_distribution(double tol) const {
  for (double v : data_) {
    if (v < -1e-12 || !std::isfinite(v))
      throw validation_error("distribution has a negative or non-finite entry");
  }
  double s = sum();
  if (std::abs(s - 1.0) > tol)
    throw validation_error("distribution mass is not 1");
}

double entropy(const ProbVector& p) {
  double h = 0.0;
  for (double v : p) h -= plog2p(v);
  return std::max(h, 0.0);
}

double entropy(const Tensor& joint) {
  double h = 0.0;
  for (double v : joint.data()) h -= plog2p(v);
  return std::max(h, 0.0);
}

double entropy(const Tensor& joint, const AxisSet& a) {
  AxisSet axes = a;
  std::sort(axes.begin(), axes.end());
  return entropy(joint.marginal(axes));
}

namespace {

AxisSet union_sorted(const AxisSet& a, const AxisSet& b) {
  AxisSet u = a;
  u.insert(u.end(), b.begin(), b.end());
  std::sort(u.begin(), u.end());
  for (std::size_t i = 1; i < u.size(); ++i) {
    if (u[i] == u[i - 1])
      throw validation_error("axis groups must be disjoint");
  }
  return u;
}

AxisSet rest_axes(const Tensor& joint, const AxisSet& used) {
  AxisSet rest;
  for (int a = 0; a < joint.rank(); ++a) {
    if (std::find(used.begin(), used.end(), a) == used.end()) rest.push_back(a);
  }
  return rest;
}

}  // namespace

double conditional_entropy(const Tensor& joint) {
  return conditional_entropy(joint, {0}, rest_axes(joint, {0}));
}

double conditional_entropy(const Tensor& joint, const AxisSet& a, const AxisSet& b) {
  double h = entropy(joint, union_sorted(a, b)) - entropy(joint, b);
  return std::max(h, 0.0);
}

double mutual_information(const Tensor& joint) {
  return mutual_information(joint, {0}, rest_axes(joint, {0}));
}

double mutual_information(const Tensor& joint, const AxisSet& a, const AxisSet& b) {
  double v = entropy(joint, a) + entropy(joint, b) - entropy(joint, union_sorted(a, b));
  return clamp_measure(v);
}

double conditional_mutual_information(const Tensor& joint) {
  return conditional_mutual_information(joint, {0}, {1}, rest_axes(joint, {0, 1}));
}

double conditional_mutual_information(const Tensor& joint, const AxisSet& a,
                                      const AxisSet& b, const AxisSet& c) {
  if (c.empty()) return mutual_information(joint, a, b);
  double v = entropy(joint, union_sorted(a, c)) + entropy(joint, union_sorted(b, c)) -
             entropy(joint, union_sorted(union_sorted(a, b), c)) - entropy(joint, c);
  return clamp_measure(v);
}

double kl_divergence(const ProbVector& p, const ProbVector& q) {
  if (p.size() != q.size())
    throw validation_error("kl_divergence requires equal lengths");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= support_eps) continue;
    if (q[i] <= support_eps) return std::numeric_limits<double>::infinity();
    d += p[i] * std::log2(p[i] / q[i]);
  }
  return std::max(d, 0.0);
}

double total_variation(const ProbVector& p, const ProbVector& q) {
  if (p.size() != q.size())
    throw validation_error("total_variation requires equal lengths");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

double binary_entropy(double p) {
  if (p < 0.0 || p > 1.0) throw validation_error("binary_entropy argument outside [0,1]");
  return -plog2p(p) - plog2p(1.0 - p);
}

double binary_entropy_inverse(double target) {
  if (target < 0.0 || target > 1.0)
    throw validation_error("binary_entropy_inverse target outside [0,1]");
  double lo = 0.0, hi = 0.5;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (binary_entropy(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace wtsk
