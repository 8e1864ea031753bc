#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ttkry {

using Index = std::int64_t;

/// Mode sizes n_1..n_d of a d-dimensional tensor.
struct Shape {
    std::vector<Index> mode_sizes;

    Shape() = default;
    Shape(std::initializer_list<Index> sizes) : mode_sizes(sizes) {}
    explicit Shape(std::vector<Index> sizes) : mode_sizes(std::move(sizes)) {}

    Index dim() const { return static_cast<Index>(mode_sizes.size()); }
    Index operator[](Index k) const { return mode_sizes[static_cast<std::size_t>(k)]; }

    /// Product of all mode sizes.
    Index num_elements() const;

    bool operator==(const Shape& other) const { return mode_sizes == other.mode_sizes; }
    bool operator!=(const Shape& other) const { return !(*this == other); }

    std::string to_string() const;
};

/// Throws std::invalid_argument unless d >= 1 and every mode size >= 1.
void check_shape(const Shape& s);

/// Flat multi-index array. Linearization is fixed once for the whole
/// library: the first index runs fastest (column-major over modes), i.e.
/// linear = i_1 + n_1*(i_2 + n_2*(i_3 + ...)). Every dense oracle
/// comparison relies on this convention.
struct DenseTensor {
    Shape shape;
    std::vector<double> values;

    DenseTensor() = default;
    explicit DenseTensor(Shape s);
    DenseTensor(Shape s, std::vector<double> vals);

    Index size() const { return static_cast<Index>(values.size()); }

    double& operator[](Index linear) { return values[static_cast<std::size_t>(linear)]; }
    double operator[](Index linear) const { return values[static_cast<std::size_t>(linear)]; }

    double at(std::span<const Index> idx) const;
    double& at(std::span<const Index> idx);

    double frobenius_norm() const;
};

/// linear = i_1 + n_1*(i_2 + n_2*(...)), first index fastest.
Index linear_index(const Shape& shape, std::span<const Index> idx);

/// Inverse of linear_index.
std::vector<Index> unflatten_index(const Shape& shape, Index linear);

}  // namespace ttkry
