#pragma once

#include "ttkry/tt_tensor.hpp"

namespace ttkry {

/// Exact sum; interior ranks add, boundary ranks stay 1.
TTTensor add(const TTTensor& a, const TTTensor& b);

/// c * a with the scale folded into the first core; ranks unchanged.
TTTensor scale(const TTTensor& a, double c);

/// a - b, exact (add with the second term negated).
TTTensor sub(const TTTensor& a, const TTTensor& b);

/// Frobenius inner product, contracted core by core without densification.
double dot(const TTTensor& a, const TTTensor& b);

/// Frobenius norm sqrt(dot(a,a)), clamped at zero against roundoff.
double norm(const TTTensor& a);

/// Elementwise product; interior ranks multiply.
TTTensor hadamard(const TTTensor& a, const TTTensor& b);

/// Operator application y = A x; interior ranks multiply.
TTTensor matvec(const TTMatrix& a, const TTTensor& x);

}  // namespace ttkry
