#include "bck/kernels.hpp"

#include <cassert>
#include <cmath>

namespace bck::kernels {

namespace {

// Small-problem cutoff below which the parallel variants run the serial loop;
// thread start-up dominates for the 1D mode counts used in the tests.
constexpr std::size_t kParallelMinWork = 4096;

inline void apply_block(const std::array<double, 9>& m, const std::array<double, 3>& x,
                        std::array<double, 3>& y) {
  y[0] = m[0] * x[0] + m[1] * x[1] + m[2] * x[2];
  y[1] = m[3] * x[0] + m[4] * x[1] + m[5] * x[2];
  y[2] = m[6] * x[0] + m[7] * x[1] + m[8] * x[2];
}

inline void apply_block_add(const std::array<double, 9>& m, const std::array<double, 3>& x,
                            std::array<double, 3>& y) {
  y[0] += m[0] * x[0] + m[1] * x[1] + m[2] * x[2];
  y[1] += m[3] * x[0] + m[4] * x[1] + m[5] * x[2];
  y[2] += m[6] * x[0] + m[7] * x[1] + m[8] * x[2];
}

}  // namespace

namespace serial {

void contract_axis(MatrixView mat, std::span<const double> in, Extents ext, int axis,
                   std::span<double> out) {
  assert(ext[axis] == mat.cols);
  const std::size_t n0 = ext.n0;
  const std::size_t n1 = ext.n1;
  if (axis == 0) {
    const std::size_t r0 = mat.rows;
    assert(out.size() == r0 * n1);
    for (std::size_t i1 = 0; i1 < n1; ++i1) {
      const double* col = in.data() + n0 * i1;
      for (std::size_t r = 0; r < r0; ++r) {
        const double* row = mat.data + r * mat.cols;
        double s = 0.0;
        for (std::size_t c = 0; c < n0; ++c) s += row[c] * col[c];
        out[r + r0 * i1] = s;
      }
    }
  } else {
    assert(out.size() == n0 * mat.rows);
    for (std::size_t r = 0; r < mat.rows; ++r) {
      const double* row = mat.data + r * mat.cols;
      double* dst = out.data() + n0 * r;
      for (std::size_t i0 = 0; i0 < n0; ++i0) dst[i0] = 0.0;
      for (std::size_t c = 0; c < n1; ++c) {
        const double m = row[c];
        const double* src = in.data() + n0 * c;
        for (std::size_t i0 = 0; i0 < n0; ++i0) dst[i0] += m * src[i0];
      }
    }
  }
}

void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
}

void multiply_add(double alpha, std::span<const double> a, std::span<const double> b,
                  std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += alpha * a[i] * b[i];
}

void apply_blocks(std::span<const std::array<double, 9>> blocks,
                  std::span<const std::array<double, 3>> in, std::span<std::array<double, 3>> out) {
  for (std::size_t m = 0; m < out.size(); ++m) apply_block(blocks[m], in[m], out[m]);
}

void apply_blocks_add(std::span<const std::array<double, 9>> blocks,
                      std::span<const std::array<double, 3>> in,
                      std::span<std::array<double, 3>> out) {
  for (std::size_t m = 0; m < out.size(); ++m) apply_block_add(blocks[m], in[m], out[m]);
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace serial

namespace parallel {

void contract_axis(MatrixView mat, std::span<const double> in, Extents ext, int axis,
                   std::span<double> out) {
  if (out.size() * mat.cols < kParallelMinWork) {
    serial::contract_axis(mat, in, ext, axis, out);
    return;
  }
  assert(ext[axis] == mat.cols);
  const std::size_t n0 = ext.n0;
  const std::size_t n1 = ext.n1;
  if (axis == 0) {
    const std::size_t r0 = mat.rows;
    const std::ptrdiff_t total = static_cast<std::ptrdiff_t>(r0 * n1);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t idx = 0; idx < total; ++idx) {
      const std::size_t i1 = static_cast<std::size_t>(idx) / r0;
      const std::size_t r = static_cast<std::size_t>(idx) % r0;
      const double* col = in.data() + n0 * i1;
      const double* row = mat.data + r * mat.cols;
      double s = 0.0;
      for (std::size_t c = 0; c < n0; ++c) s += row[c] * col[c];
      out[r + r0 * i1] = s;
    }
  } else {
    const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(mat.rows);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t rr = 0; rr < rows; ++rr) {
      const std::size_t r = static_cast<std::size_t>(rr);
      const double* row = mat.data + r * mat.cols;
      double* dst = out.data() + n0 * r;
      for (std::size_t i0 = 0; i0 < n0; ++i0) dst[i0] = 0.0;
      for (std::size_t c = 0; c < n1; ++c) {
        const double m = row[c];
        const double* src = in.data() + n0 * c;
        for (std::size_t i0 = 0; i0 < n0; ++i0) dst[i0] += m * src[i0];
      }
    }
  }
}

void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static) if (out.size() >= kParallelMinWork)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void multiply_add(double alpha, std::span<const double> a, std::span<const double> b,
                  std::span<double> out) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static) if (out.size() >= kParallelMinWork)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] += alpha * a[i] * b[i];
}

void apply_blocks(std::span<const std::array<double, 9>> blocks,
                  std::span<const std::array<double, 3>> in, std::span<std::array<double, 3>> out) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static) if (out.size() * 9 >= kParallelMinWork)
  for (std::ptrdiff_t m = 0; m < n; ++m) apply_block(blocks[m], in[m], out[m]);
}

void apply_blocks_add(std::span<const std::array<double, 9>> blocks,
                      std::span<const std::array<double, 3>> in,
                      std::span<std::array<double, 3>> out) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static) if (out.size() * 9 >= kParallelMinWork)
  for (std::ptrdiff_t m = 0; m < n; ++m) apply_block_add(blocks[m], in[m], out[m]);
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(a.size());
  // max is order-independent, so the reduction stays reproducible
#pragma omp parallel for schedule(static) reduction(max : m) if (a.size() >= kParallelMinWork)
  for (std::ptrdiff_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

}  // namespace parallel

void contract_axis(Exec exec, MatrixView mat, std::span<const double> in, Extents in_ext,
                   int axis, std::span<double> out) {
  if (exec == Exec::parallel)
    parallel::contract_axis(mat, in, in_ext, axis, out);
  else
    serial::contract_axis(mat, in, in_ext, axis, out);
}

void multiply(Exec exec, std::span<const double> a, std::span<const double> b,
              std::span<double> out) {
  if (exec == Exec::parallel)
    parallel::multiply(a, b, out);
  else
    serial::multiply(a, b, out);
}

void multiply_add(Exec exec, double alpha, std::span<const double> a,
                  std::span<const double> b, std::span<double> out) {
  if (exec == Exec::parallel)
    parallel::multiply_add(alpha, a, b, out);
  else
    serial::multiply_add(alpha, a, b, out);
}

void apply_blocks(Exec exec, std::span<const std::array<double, 9>> blocks,
                  std::span<const std::array<double, 3>> in, std::span<std::array<double, 3>> out) {
  if (exec == Exec::parallel)
    parallel::apply_blocks(blocks, in, out);
  else
    serial::apply_blocks(blocks, in, out);
}

void apply_blocks_add(Exec exec, std::span<const std::array<double, 9>> blocks,
                      std::span<const std::array<double, 3>> in,
                      std::span<std::array<double, 3>> out) {
  if (exec == Exec::parallel)
    parallel::apply_blocks_add(blocks, in, out);
  else
    serial::apply_blocks_add(blocks, in, out);
}

double max_abs(Exec exec, std::span<const double> a) {
  return exec == Exec::parallel ? parallel::max_abs(a) : serial::max_abs(a);
}

}  // namespace bck::kernels
