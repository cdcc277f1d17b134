#pragma once

// Data-parallel inner loops of the solver.
//
// Every kernel exists twice: `serial` is the reference implementation kept for
// testing, `parallel` distributes independent output entries over OpenMP
// threads. Each output entry is produced by exactly one thread with the same
// summation order as the serial loop, so the two variants are bit-identical for
// any thread count.

#include <array>
#include <cstddef>
#include <span>

namespace bck {

enum class Exec { serial, parallel };

/// Extents of a rank-1 or rank-2 tensor stored with axis 0 fastest.
struct Extents {
  std::size_t n0 = 1;
  std::size_t n1 = 1;
  std::size_t size() const { return n0 * n1; }
  std::size_t operator[](int axis) const { return axis == 0 ? n0 : n1; }
};

/// Row-major dense matrix view.
struct MatrixView {
  const double* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

namespace kernels {

namespace serial {

/// out = mat applied along `axis` of `in`; in.extent[axis] == mat.cols, the
/// output has mat.rows along that axis.
void contract_axis(MatrixView mat, std::span<const double> in, Extents in_ext, int axis,
                   std::span<double> out);

/// out[i] = a[i] * b[i]
void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out);

/// out[i] += alpha * a[i] * b[i]
void multiply_add(double alpha, std::span<const double> a, std::span<const double> b,
                  std::span<double> out);

/// out[m] = blocks[m] * in[m] for row-major 3x3 blocks.
void apply_blocks(std::span<const std::array<double, 9>> blocks,
                  std::span<const std::array<double, 3>> in, std::span<std::array<double, 3>> out);

/// out[m] += blocks[m] * in[m]
void apply_blocks_add(std::span<const std::array<double, 9>> blocks,
                      std::span<const std::array<double, 3>> in,
                      std::span<std::array<double, 3>> out);

double max_abs(std::span<const double> a);

}  // namespace serial

namespace parallel {

void contract_axis(MatrixView mat, std::span<const double> in, Extents in_ext, int axis,
                   std::span<double> out);
void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out);
void multiply_add(double alpha, std::span<const double> a, std::span<const double> b,
                  std::span<double> out);
void apply_blocks(std::span<const std::array<double, 9>> blocks,
                  std::span<const std::array<double, 3>> in, std::span<std::array<double, 3>> out);
void apply_blocks_add(std::span<const std::array<double, 9>> blocks,
                      std::span<const std::array<double, 3>> in,
                      std::span<std::array<double, 3>> out);
double max_abs(std::span<const double> a);

}  // namespace parallel

// Dispatch on an execution policy.

void contract_axis(Exec exec, MatrixView mat, std::span<const double> in, Extents in_ext,
                   int axis, std::span<double> out);
void multiply(Exec exec, std::span<const double> a, std::span<const double> b,
              std::span<double> out);
void multiply_add(Exec exec, double alpha, std::span<const double> a,
                  std::span<const double> b, std::span<double> out);
void apply_blocks(Exec exec, std::span<const std::array<double, 9>> blocks,
                  std::span<const std::array<double, 3>> in, std::span<std::array<double, 3>> out);
void apply_blocks_add(Exec exec, std::span<const std::array<double, 9>> blocks,
                      std::span<const std::array<double, 3>> in,
                      std::span<std::array<double, 3>> out);
double max_abs(Exec exec, std::span<const double> a);

}  // namespace kernels
}  // namespace bck
