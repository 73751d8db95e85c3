#pragma once

#include <string>

#include "proxnewton/transforms.hpp"

namespace proxnewton {

/// Plain binary matrix format: rows and cols as 8-byte little-endian
/// unsigned integers, followed by row-major 8-byte IEEE-754 doubles.
void write_dense_matrix(const std::string& path, const Matrix& a);
Matrix read_dense_matrix(const std::string& path);

/// Vectors use the same container as an n x 1 matrix.
void write_vector(const std::string& path, const Vector& v);
Vector read_vector(const std::string& path);

/// Binary PGM (P5, maxval 255). Pixels are doubles in [0,1], clamped and
/// rounded on write. read_pgm checks the side when expect_side > 0.
void write_pgm(const std::string& path, const Vector& img, Eigen::Index side);
Vector read_pgm(const std::string& path, Eigen::Index expect_side = 0);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace proxnewton
