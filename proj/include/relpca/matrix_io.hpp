#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relpca/types.hpp"

namespace relpca {

// Binary matrix format: 4-byte magic "RKM1", little-endian u32 rows, u32
// cols, then row-major 64-bit floats.  read(write(M)) is bitwise exact.
std::vector<std::uint8_t> serialize_matrix(const MatrixXd& m);
MatrixXd parse_matrix(const std::vector<std::uint8_t>& bytes);

void write_matrix(const std::string& path, const MatrixXd& m);
MatrixXd read_matrix(const std::string& path);

}  // namespace relpca
