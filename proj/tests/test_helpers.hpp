#pragma once

#include <random>
#include <vector>

#include "ttkry/dense_tensor.hpp"
#include "ttkry/tt_tensor.hpp"

namespace ttkry::testing {

inline DenseTensor random_dense(const Shape& shape, std::mt19937_64& rng) {
    DenseTensor x(shape);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (auto& v : x.values) v = dist(rng);
    return x;
}

inline double rel_err(const DenseTensor& got, const DenseTensor& want) {
    double diff2 = 0.0, ref2 = 0.0;
    for (Index i = 0; i < want.size(); ++i) {
        const double d = got[i] - want[i];
        diff2 += d * d;
        ref2 += want[i] * want[i];
    }
    return ref2 > 0 ? std::sqrt(diff2 / ref2) : std::sqrt(diff2);
}

inline double max_abs_diff(const DenseTensor& a, const DenseTensor& b) {
    double m = 0.0;
    for (Index i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace ttkry::testing
