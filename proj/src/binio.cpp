#include "dgl/binio.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace dgl {

namespace {

constexpr char kMagic[4] = {'D', 'G', 'L', '1'};
constexpr std::uint32_t kDtypeF64 = 0;
constexpr std::uint32_t kLayoutDense = 0;
constexpr std::uint32_t kLayoutCsr = 1;
constexpr std::uint32_t kLayoutVector = 2;

template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void put_span(std::ofstream& out, const T* data, std::size_t count) {
  out.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(count * sizeof(T)));
}

template <typename T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

template <typename T>
void get_span(std::ifstream& in, T* data, std::size_t count) {
  in.read(reinterpret_cast<char*>(data),
          static_cast<std::streamsize>(count * sizeof(T)));
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  return out;
}

std::ifstream open_in(const std::string& path, std::uint32_t expect_layout) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw Error(ErrorCode::ParseError, path + ": bad magic");
  auto dtype = get<std::uint32_t>(in);
  auto layout = get<std::uint32_t>(in);
  if (dtype != kDtypeF64)
    throw Error(ErrorCode::ParseError, path + ": unsupported dtype");
  if (layout != expect_layout)
    throw Error(ErrorCode::ParseError, path + ": unexpected layout");
  return in;
}

void write_header(std::ofstream& out, std::uint32_t layout, std::uint64_t rows,
                  std::uint64_t cols) {
  out.write(kMagic, 4);
  put(out, kDtypeF64);
  put(out, layout);
  put(out, rows);
  put(out, cols);
}

}  // namespace

void write_dense(const std::string& path, const DenseMatrix& m) {
  auto out = open_out(path);
  write_header(out, kLayoutDense, m.rows(), m.cols());
  put_span(out, m.data(), static_cast<std::size_t>(m.size()));
}

DenseMatrix read_dense(const std::string& path) {
  auto in = open_in(path, kLayoutDense);
  auto rows = get<std::uint64_t>(in);
  auto cols = get<std::uint64_t>(in);
  DenseMatrix m(rows, cols);
  get_span(in, m.data(), static_cast<std::size_t>(m.size()));
  if (!in) throw Error(ErrorCode::ParseError, path + ": truncated payload");
  return m;
}

void write_sparse(const std::string& path, const SparseMatrix& m) {
  auto out = open_out(path);
  write_header(out, kLayoutCsr, m.rows, m.cols);
  put(out, static_cast<std::uint64_t>(m.nnz()));
  put_span(out, m.indptr.data(), m.indptr.size());
  put_span(out, m.indices.data(), m.indices.size());
  put_span(out, m.values.data(), m.values.size());
}

SparseMatrix read_sparse(const std::string& path) {
  auto in = open_in(path, kLayoutCsr);
  auto rows = get<std::uint64_t>(in);
  auto cols = get<std::uint64_t>(in);
  auto nnz = get<std::uint64_t>(in);
  SparseMatrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  m.indptr.resize(rows + 1);
  m.indices.resize(nnz);
  m.values.resize(nnz);
  get_span(in, m.indptr.data(), m.indptr.size());
  get_span(in, m.indices.data(), m.indices.size());
  get_span(in, m.values.data(), m.values.size());
  if (!in) throw Error(ErrorCode::ParseError, path + ": truncated payload");
  m.check_valid();
  return m;
}

void write_vector(const std::string& path, const Vector& v) {
  auto out = open_out(path);
  write_header(out, kLayoutVector, v.size(), 1);
  put_span(out, v.data(), static_cast<std::size_t>(v.size()));
}

Vector read_vector(const std::string& path) {
  auto in = open_in(path, kLayoutVector);
  auto rows = get<std::uint64_t>(in);
  auto cols = get<std::uint64_t>(in);
  if (cols != 1) throw Error(ErrorCode::ParseError, path + ": not a vector");
  Vector v(rows);
  get_span(in, v.data(), static_cast<std::size_t>(v.size()));
  if (!in) throw Error(ErrorCode::ParseError, path + ": truncated payload");
  return v;
}

}  // namespace dgl
