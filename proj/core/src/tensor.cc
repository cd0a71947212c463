#include "wiretap/tensor.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

namespace wiretap {
namespace {

std::size_t Product(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

void CheckShape(const std::vector<std::size_t>& shape) {
  for (std::size_t d : shape) {
    if (d == 0) throw std::invalid_argument("tensor dimensions must be positive");
  }
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)) {
  CheckShape(shape_);
  values_.assign(shape_.empty() ? 0 : Product(shape_), fill);
}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  CheckShape(shape_);
  if ((shape_.empty() ? 0 : Product(shape_)) != values_.size()) {
    throw std::invalid_argument("tensor shape " + ShapeString() +
                                " does not match " +
                                std::to_string(values_.size()) + " values");
  }
}

Tensor Tensor::FromMatrix(const RowMatrix& m) {
  Tensor t = Matrix(static_cast<std::size_t>(m.rows()),
                    static_cast<std::size_t>(m.cols()));
  t.mat() = m;
  return t;
}

std::size_t Tensor::cols() const {
  if (shape_.empty()) return 0;
  if (shape_.size() == 1) return shape_[0] == 0 ? 0 : 1;
  return values_.size() / shape_[0];
}

MatrixMap Tensor::mat() {
  return MatrixMap(values_.data(), static_cast<Eigen::Index>(rows()),
                   static_cast<Eigen::Index>(cols()));
}

ConstMatrixMap Tensor::mat() const {
  return ConstMatrixMap(values_.data(), static_cast<Eigen::Index>(rows()),
                        static_cast<Eigen::Index>(cols()));
}

void Tensor::Fill(double v) { std::fill(values_.begin(), values_.end(), v); }

bool Tensor::AllFinite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

std::string Tensor::ShapeString() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) os << 'x';
    os << shape_[i];
  }
  os << ']';
  return os.str();
}

Tensor Tensor::SliceRows(std::size_t begin, std::size_t count) const {
  if (begin + count > rows() || count == 0) {
    throw std::out_of_range("row slice out of range");
  }
  std::vector<std::size_t> shape = shape_;
  shape[0] = count;
  const std::size_t c = cols();
  std::vector<double> v(values_.begin() + static_cast<std::ptrdiff_t>(begin * c),
                        values_.begin() +
                            static_cast<std::ptrdiff_t>((begin + count) * c));
  return Tensor(std::move(shape), std::move(v));
}

Tensor Tensor::GatherRows(std::span<const std::size_t> indices) const {
  if (indices.empty()) throw std::invalid_argument("empty row gather");
  std::vector<std::size_t> shape = shape_;
  shape[0] = indices.size();
  const std::size_t c = cols();
  std::vector<double> v;
  v.reserve(indices.size() * c);
  for (std::size_t idx : indices) {
    if (idx >= rows()) throw std::out_of_range("row gather index out of range");
    auto r = row(idx);
    v.insert(v.end(), r.begin(), r.end());
  }
  return Tensor(std::move(shape), std::move(v));
}

}  // namespace wiretap
