#include "ttkry/dense_tensor.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ttkry {

Index Shape::num_elements() const {
    Index n = 1;
    for (Index m : mode_sizes) n *= m;
    return n;
}

std::string Shape::to_string() const {
    std::ostringstream os;
    os << "(";
    for (std::size_t k = 0; k < mode_sizes.size(); ++k) {
        if (k > 0) os << ",";
        os << mode_sizes[k];
    }
    os << ")";
    return os.str();
}

void check_shape(const Shape& s) {
    if (s.dim() < 1) throw std::invalid_argument("shape: dimension must be >= 1");
    for (Index k = 0; k < s.dim(); ++k) {
        if (s[k] < 1)
            throw std::invalid_argument("shape: mode size must be >= 1 at mode " +
                                        std::to_string(k));
    }
}

DenseTensor::DenseTensor(Shape s) : shape(std::move(s)) {
    check_shape(shape);
    values.assign(static_cast<std::size_t>(shape.num_elements()), 0.0);
}

DenseTensor::DenseTensor(Shape s, std::vector<double> vals)
    : shape(std::move(s)), values(std::move(vals)) {
    check_shape(shape);
    if (static_cast<Index>(values.size()) != shape.num_elements())
        throw std::invalid_argument("DenseTensor: value count does not match shape " +
                                    shape.to_string());
}

Index linear_index(const Shape& shape, std::span<const Index> idx) {
    if (static_cast<Index>(idx.size()) != shape.dim())
        throw std::invalid_argument("multi-index length does not match dimension");
    Index linear = 0;
    Index stride = 1;
    for (Index k = 0; k < shape.dim(); ++k) {
        const Index i = idx[static_cast<std::size_t>(k)];
        if (i < 0 || i >= shape[k])
            throw std::out_of_range("index out of range at mode " + std::to_string(k));
        linear += i * stride;
        stride *= shape[k];
    }
    return linear;
}

std::vector<Index> unflatten_index(const Shape& shape, Index linear) {
    std::vector<Index> idx(static_cast<std::size_t>(shape.dim()));
    for (Index k = 0; k < shape.dim(); ++k) {
        idx[static_cast<std::size_t>(k)] = linear % shape[k];
        linear /= shape[k];
    }
    return idx;
}

double DenseTensor::at(std::span<const Index> idx) const {
    return values[static_cast<std::size_t>(linear_index(shape, idx))];
}

double& DenseTensor::at(std::span<const Index> idx) {
    return values[static_cast<std::size_t>(linear_index(shape, idx))];
}

double DenseTensor::frobenius_norm() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return std::sqrt(s);
}

}  // namespace ttkry
