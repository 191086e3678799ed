#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace textpose::nn {

using Shape = std::vector<int>;

std::int64_t shape_numel(const Shape& s);
std::string shape_str(const Shape& s);

// Dense row-major tensor of doubles. Rank is the shape length; 4-d tensors
// are laid out NCHW. All math in this library runs in double precision.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape);
  Tensor(Shape shape, double fill);
  Tensor(Shape shape, std::vector<double> values);

  static Tensor scalar(double v);

  const Shape& shape() const { return shape_; }
  int dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }
  int rank() const { return static_cast<int>(shape_.size()); }
  std::int64_t numel() const { return data_.size(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  double& operator[](std::int64_t i) { return data_[i]; }
  double operator[](std::int64_t i) const { return data_[i]; }

  // NCHW addressing for rank-4 tensors.
  double& at(int n, int c, int h, int w);
  double at(int n, int c, int h, int w) const;

  // Flat views. Eigen maps alias the tensor storage; no copies.
  Eigen::Map<Eigen::ArrayXd> array() { return {data_.data(), data_.size()}; }
  Eigen::Map<const Eigen::ArrayXd> array() const { return {data_.data(), data_.size()}; }

  using MatrixRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  // rows x cols view over the flat data; rows*cols must equal numel.
  Eigen::Map<MatrixRM> matrix(std::int64_t rows, std::int64_t cols);
  Eigen::Map<const MatrixRM> matrix(std::int64_t rows, std::int64_t cols) const;

  double value() const;  // single-element tensors only

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

 private:
  Shape shape_;
  Eigen::ArrayXd data_;
};

void require_shape(const Tensor& t, const Shape& s, const char* what);
void require_rank(const Tensor& t, int rank, const char* what);

}  // namespace textpose::nn
