#include "proxnewton/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace proxnewton {

namespace {

void put_u64_le(std::ostream& os, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t get_u64_le(std::istream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  if (!is) throw std::runtime_error("binary matrix: truncated header");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode) {
  std::ofstream os(path, mode);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  return os;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode) {
  std::ifstream is(path, mode);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  return is;
}

}  // namespace

void write_dense_matrix(const std::string& path, const Matrix& a) {
  auto os = open_out(path, std::ios::binary);
  put_u64_le(os, static_cast<std::uint64_t>(a.rows()));
  put_u64_le(os, static_cast<std::uint64_t>(a.cols()));
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      const double v = a(r, c);
      static_assert(sizeof(double) == 8);
      std::uint64_t bits;
      std::memcpy(&bits, &v, 8);
      put_u64_le(os, bits);
    }
  if (!os) throw std::runtime_error("write failed: " + path);
}

Matrix read_dense_matrix(const std::string& path) {
  auto is = open_in(path, std::ios::binary);
  const auto rows = static_cast<Eigen::Index>(get_u64_le(is));
  const auto cols = static_cast<Eigen::Index>(get_u64_le(is));
  if (rows < 0 || cols < 0 || rows * cols > (Eigen::Index{1} << 32))
    throw std::runtime_error("binary matrix: implausible dimensions");
  Matrix a(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      const std::uint64_t bits = get_u64_le(is);
      double v;
      std::memcpy(&v, &bits, 8);
      a(r, c) = v;
    }
  return a;
}

void write_vector(const std::string& path, const Vector& v) {
  write_dense_matrix(path, v);
}

Vector read_vector(const std::string& path) {
  Matrix a = read_dense_matrix(path);
  if (a.cols() != 1)
    throw std::runtime_error("binary vector: expected a single column");
  return a.col(0);
}

void write_pgm(const std::string& path, const Vector& img, Eigen::Index side) {
  if (img.size() != side * side)
    throw std::invalid_argument("write_pgm: image is not side*side");
  auto os = open_out(path, std::ios::binary);
  os << "P5\n" << side << " " << side << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(side));
  for (Eigen::Index r = 0; r < side; ++r) {
    for (Eigen::Index c = 0; c < side; ++c) {
      const double v = std::min(1.0, std::max(0.0, img[r * side + c]));
      row[static_cast<std::size_t>(c)] =
          static_cast<unsigned char>(std::lround(v * 255.0));
    }
    os.write(reinterpret_cast<const char*>(row.data()), side);
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

namespace {

// Next whitespace-delimited token, skipping '#' comment lines.
std::string pgm_token(std::istream& is) {
  std::string tok;
  int ch;
  while ((ch = is.get()) != EOF) {
    if (ch == '#') {
      while ((ch = is.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (!std::isspace(ch)) {
      tok.push_back(static_cast<char>(ch));
      while ((ch = is.get()) != EOF && !std::isspace(ch))
        tok.push_back(static_cast<char>(ch));
      return tok;
    }
  }
  throw std::runtime_error("pgm: truncated header");
}

}  // namespace

Vector read_pgm(const std::string& path, Eigen::Index expect_side) {
  auto is = open_in(path, std::ios::binary);
  if (pgm_token(is) != "P5") throw std::runtime_error("pgm: not a P5 file");
  const long w = std::stol(pgm_token(is));
  const long h = std::stol(pgm_token(is));
  const long maxval = std::stol(pgm_token(is));
  if (w != h) throw std::runtime_error("pgm: image must be square");
  if (maxval <= 0 || maxval > 255)
    throw std::runtime_error("pgm: unsupported maxval");
  if (expect_side > 0 && w != expect_side)
    throw std::runtime_error("pgm: expected side " +
                             std::to_string(expect_side) + ", got " +
                             std::to_string(w));
  const auto side = static_cast<Eigen::Index>(w);
  std::vector<unsigned char> raw(static_cast<std::size_t>(side * side));
  is.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size()));
  if (!is) throw std::runtime_error("pgm: truncated pixel data");
  Vector img(side * side);
  for (Eigen::Index i = 0; i < side * side; ++i)
    img[i] = static_cast<double>(raw[static_cast<std::size_t>(i)]) /
             static_cast<double>(maxval);
  return img;
}

void write_text_file(const std::string& path, const std::string& content) {
  auto os = open_out(path, std::ios::out);
  os << content;
  if (!os) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  auto is = open_in(path, std::ios::in);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace proxnewton
