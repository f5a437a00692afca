#pragma once

// Little-endian binary helpers for the model container formats.

#include <Eigen/Core>
#include <bit>
#include <cstdint>
#include <fstream>
#include <string>

#include "gmmil/common.hpp"

namespace gmmil::binio {

static_assert(std::endian::native == std::endian::little,
              "serialization assumes a little-endian host");

inline void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), 4);
}

inline std::uint32_t read_u32(std::istream& in, const std::string& what) {
  std::uint32_t v;
  if (!in.read(reinterpret_cast<char*>(&v), 4))
    throw FormatError(what + ": truncated");
  return v;
}

inline void write_f64(std::ostream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), 8);
}

inline double read_f64(std::istream& in, const std::string& what) {
  double v;
  if (!in.read(reinterpret_cast<char*>(&v), 8))
    throw FormatError(what + ": truncated");
  return v;
}

inline void write_magic(std::ostream& out, const std::string& magic) {
  out.write(magic.data(), std::streamsize(magic.size()));
}

inline void check_magic(std::istream& in, const std::string& magic,
                        const std::string& what) {
  std::string buf(magic.size(), '\0');
  if (!in.read(buf.data(), std::streamsize(buf.size())) || buf != magic)
    throw FormatError(what + ": bad magic, expected " + magic);
}

// shape header (u32 ndims + u32 dims) followed by the values column-major
inline void write_tensor(std::ostream& out, const Eigen::MatrixXd& m) {
  write_u32(out, 2);
  write_u32(out, std::uint32_t(m.rows()));
  write_u32(out, std::uint32_t(m.cols()));
  out.write(reinterpret_cast<const char*>(m.data()),
            std::streamsize(m.size() * 8));
}

inline void write_tensor(std::ostream& out, const Eigen::VectorXd& v) {
  write_u32(out, 1);
  write_u32(out, std::uint32_t(v.size()));
  out.write(reinterpret_cast<const char*>(v.data()),
            std::streamsize(v.size() * 8));
}

inline Eigen::MatrixXd read_matrix(std::istream& in, const std::string& what) {
  if (read_u32(in, what) != 2) throw FormatError(what + ": expected matrix");
  const auto rows = read_u32(in, what);
  const auto cols = read_u32(in, what);
  Eigen::MatrixXd m(rows, cols);
  if (!in.read(reinterpret_cast<char*>(m.data()),
               std::streamsize(m.size() * 8)))
    throw FormatError(what + ": truncated tensor");
  return m;
}

inline Eigen::VectorXd read_vector(std::istream& in, const std::string& what) {
  if (read_u32(in, what) != 1) throw FormatError(what + ": expected vector");
  const auto n = read_u32(in, what);
  Eigen::VectorXd v(n);
  if (!in.read(reinterpret_cast<char*>(v.data()),
               std::streamsize(v.size() * 8)))
    throw FormatError(what + ": truncated tensor");
  return v;
}

}  // namespace gmmil::binio
