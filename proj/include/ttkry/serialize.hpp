#pragma once

#include <iosfwd>
#include <string>

#include "ttkry/tt_tensor.hpp"

namespace ttkry {

/// Versioned binary format shared by tensors and operators: an 8-byte magic,
/// a version word, the kind tag, dimension, mode sizes (row and column sizes
/// for operators), the rank chain, then all core entries as little-endian
/// 64-bit floats in core order.
void save_tt(std::ostream& os, const TTTensor& t);
void save_tt(const std::string& path, const TTTensor& t);
TTTensor load_tt(std::istream& is);
TTTensor load_tt_file(const std::string& path);

void save_tt_matrix(std::ostream& os, const TTMatrix& a);
void save_tt_matrix(const std::string& path, const TTMatrix& a);
TTMatrix load_tt_matrix(std::istream& is);
TTMatrix load_tt_matrix_file(const std::string& path);

}  // namespace ttkry
