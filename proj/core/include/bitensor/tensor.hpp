#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace bitensor {

/// Dense row-major array of rank 1 to 4 with runtime extents.
template <class T>
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::initializer_list<std::size_t> dims, const T& fill = T{}) : Tensor(std::vector<std::size_t>(dims), fill) {}
  Tensor(std::vector<std::size_t> dims, const T& fill = T{}) : dims_(std::move(dims)) {
    if (dims_.empty() || dims_.size() > 4) throw std::invalid_argument("Tensor: rank must be 1..4");
    data_.assign(std::accumulate(dims_.begin(), dims_.end(), std::size_t{1}, std::multiplies<>()), fill);
  }

  template <class... I>
  T& operator()(I... idx) {
    return data_[offset(static_cast<std::size_t>(idx)...)];
  }
  template <class... I>
  const T& operator()(I... idx) const {
    return data_[offset(static_cast<std::size_t>(idx)...)];
  }

  [[nodiscard]] const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  [[nodiscard]] std::size_t dim(std::size_t axis) const { return dims_.at(axis); }
  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
  [[nodiscard]] std::vector<T>& data() noexcept { return data_; }
  [[nodiscard]] const std::vector<T>& data() const noexcept { return data_; }

 private:
  template <class... I>
  [[nodiscard]] std::size_t offset(I... idx) const {
    const std::array<std::size_t, sizeof...(I)> ix{idx...};
    std::size_t off = 0;
    for (std::size_t k = 0; k < ix.size(); ++k) off = off * dims_[k] + ix[k];
    return off;
  }

  std::vector<std::size_t> dims_;
  std::vector<T> data_;
};

using RealTensor = Tensor<double>;

}  // namespace bitensor
