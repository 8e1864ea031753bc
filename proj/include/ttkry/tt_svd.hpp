#pragma once

#include "ttkry/dense_tensor.hpp"
#include "ttkry/tt_tensor.hpp"

namespace ttkry {

/// TT decomposition of a dense tensor by a sweep of truncated SVDs over the
/// sequential unfoldings. Guarantees a relative Frobenius error <= eps when
/// rmax does not bind; each unfolding is truncated at eps/sqrt(d-1) times
/// the input norm. eps = 0 gives a lossless decomposition.
TTTensor tt_svd(const DenseTensor& x, double eps,
                Index rmax = std::numeric_limits<Index>::max());

/// Same with an individual rank cap per interior bond (d-1 entries).
TTTensor tt_svd(const DenseTensor& x, double eps, std::span<const Index> rmax_per_bond);

/// Splits every mode of size base^p into p modes of size `base`, digits of
/// each mode kept contiguous and ordered least-significant first. Exact: the
/// reconstruction is a pure reshape of the input. Throws when a mode size is
/// not a power of base.
TTTensor quantize(const TTTensor& t, Index base);

/// Same, restricted to the selected modes.
TTTensor quantize_modes(const TTTensor& t, Index base, const std::vector<bool>& select);

/// Digit counts per original mode, as produced by quantize (all modes).
std::vector<Index> quantize_grouping(const Shape& shape, Index base);

/// Inverse of quantize on its image: merges consecutive groups of digit
/// modes back into full modes. grouping lists the digit count per resulting
/// mode and must partition the dimension list; every merged mode must have
/// size equal to `base`.
TTTensor dequantize(const TTTensor& t, const std::vector<Index>& grouping, Index base);

/// Splits one square operator mode of size base^p x base^p into p operator
/// modes of size base x base, pairing row digit and column digit per level
/// (row digit index fastest). Exact.
TTMatrix quantize_matrix_mode(const TTMatrix& a, Index mode, Index base);

}  // namespace ttkry
