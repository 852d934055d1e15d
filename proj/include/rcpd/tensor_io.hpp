#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <iosfwd>

#include "rcpd/tensor.hpp"

namespace rcpd {

// RCPD1 binary tensor format, little-endian throughout:
//   bytes 0..3   magic "RCPD"
//   byte  4      version 0x01
//   bytes 5..8   uint32 order d (d >= 2)
//   then         d x uint64 dimensions
//   then         prod(n_j) x IEEE-754 float64 values, row-major with the
//                last index varying fastest
void write_tensor(std::ostream& os, const DenseTensor& t);
void write_tensor_file(const std::filesystem::path& path, const DenseTensor& t);

/// Throws parse_error (with byte offset) on malformed content, io_error on
/// filesystem problems.
DenseTensor read_tensor(std::istream& is);
DenseTensor read_tensor_file(const std::filesystem::path& path);

/// Matrices travel as order-2 tensors; vectors as R x 1.
void write_matrix_file(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_file(const std::filesystem::path& path);

} // namespace rcpd
