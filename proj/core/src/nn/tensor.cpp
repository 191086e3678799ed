#include "textpose/nn/tensor.hpp"

#include <sstream>

#include "textpose/errors.hpp"

namespace textpose::nn {

std::int64_t shape_numel(const Shape& s) {
  std::int64_t n = 1;
  for (int d : s) n *= d;
  return n;
}

std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << ']';
  return os.str();
}

Tensor::Tensor(Shape shape) : shape_(std::move(shape)) {
  for (int d : shape_)
    if (d <= 0) throw ShapeError("tensor dimension must be positive, got " + shape_str(shape_));
  data_ = Eigen::ArrayXd::Zero(shape_numel(shape_));
}

Tensor::Tensor(Shape shape, double fill) : Tensor(std::move(shape)) { data_.setConstant(fill); }

Tensor::Tensor(Shape shape, std::vector<double> values) : Tensor(std::move(shape)) {
  if (static_cast<std::int64_t>(values.size()) != numel())
    throw ShapeError("tensor init size mismatch for " + shape_str(shape_));
  for (std::int64_t i = 0; i < numel(); ++i) data_[i] = values[static_cast<std::size_t>(i)];
}

Tensor Tensor::scalar(double v) {
  Tensor t(Shape{1});
  t[0] = v;
  return t;
}

double& Tensor::at(int n, int c, int h, int w) {
  const auto& s = shape_;
  return data_[((static_cast<std::int64_t>(n) * s[1] + c) * s[2] + h) * s[3] + w];
}

double Tensor::at(int n, int c, int h, int w) const {
  const auto& s = shape_;
  return data_[((static_cast<std::int64_t>(n) * s[1] + c) * s[2] + h) * s[3] + w];
}

Eigen::Map<Tensor::MatrixRM> Tensor::matrix(std::int64_t rows, std::int64_t cols) {
  if (rows * cols != numel()) throw ShapeError("matrix view size mismatch");
  return {data_.data(), rows, cols};
}

Eigen::Map<const Tensor::MatrixRM> Tensor::matrix(std::int64_t rows, std::int64_t cols) const {
  if (rows * cols != numel()) throw ShapeError("matrix view size mismatch");
  return {data_.data(), rows, cols};
}

double Tensor::value() const {
  if (numel() != 1) throw ShapeError("value() on non-scalar tensor " + shape_str(shape_));
  return data_[0];
}

void require_shape(const Tensor& t, const Shape& s, const char* what) {
  if (t.shape() != s)
    throw ShapeError(std::string(what) + ": expected " + shape_str(s) + ", got " + shape_str(t.shape()));
}

void require_rank(const Tensor& t, int rank, const char* what) {
  if (t.rank() != rank)
    throw ShapeError(std::string(what) + ": expected rank " + std::to_string(rank) + ", got " +
                     shape_str(t.shape()));
}

}  // namespace textpose::nn
