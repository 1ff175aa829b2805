#include "sdlab/kernels/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace sdlab::kernels {
namespace {

void gemm_accum_scalar(const double* a, int lda, const double* b, int ldb,
                       double* c, int ldc, int m, int n, int k) {
  for (int i = 0; i < m; ++i) {
    const double* arow = a + static_cast<size_t>(i) * lda;
    double* crow = c + static_cast<size_t>(i) * ldc;
    for (int kk = 0; kk < k; ++kk) {
      const double av = arow[kk];
      const double* brow = b + static_cast<size_t>(kk) * ldb;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void gemv_rows_scalar(const double* m, int ldm, const double* x, double* y,
                      int rows, int cols) {
  for (int i = 0; i < rows; ++i) {
    const double* row = m + static_cast<size_t>(i) * ldm;
    double acc = 0.0;
    for (int j = 0; j < cols; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
}

double dot_scalar(const double* x, const double* y, int n) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double sum_scalar(const double* x, int n) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double max_val_scalar(const double* x, int n) {
  double m = x[0];
  for (int i = 1; i < n; ++i) m = std::max(m, x[i]);
  return m;
}

void axpy_scalar(double a, const double* x, double* y, int n) {
  for (int i = 0; i < n; ++i) y[i] += a * x[i];
}

void mix_scalar(double t, const double* x, double* y, int n) {
  const double keep = 1.0 - t;
  for (int i = 0; i < n; ++i) y[i] = t * x[i] + keep * y[i];
}

void relu_scalar(const double* x, double* y, int n) {
  for (int i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_grad_scalar(const double* act, const double* dy, double* dx, int n) {
  for (int i = 0; i < n; ++i) dx[i] = act[i] > 0.0 ? dy[i] : 0.0;
}

void add_bias_rows_scalar(double* y, int ldy, const double* b, int rows,
                          int cols) {
  for (int i = 0; i < rows; ++i) {
    double* row = y + static_cast<size_t>(i) * ldy;
    for (int j = 0; j < cols; ++j) row[j] += b[j];
  }
}

void adam_update_scalar(double* p, double* m, double* v, const double* g,
                        int n, double lr, double b1, double b2, double eps,
                        double bc1, double bc2s) {
  const double om1 = 1.0 - b1;
  const double om2 = 1.0 - b2;
  for (int i = 0; i < n; ++i) {
    const double gi = g[i];
    m[i] = b1 * m[i] + om1 * gi;
    v[i] = b2 * v[i] + om2 * gi * gi;
    p[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i]) / bc2s + eps);
  }
}

}  // namespace

const Kernels& scalar() {
  static const Kernels k = {
      "scalar",          gemm_accum_scalar, gemv_rows_scalar,
      dot_scalar,        sum_scalar,        max_val_scalar,
      axpy_scalar,       mix_scalar,        relu_scalar,
      relu_grad_scalar,  add_bias_rows_scalar,
      adam_update_scalar,
  };
  return k;
}

void transpose(const double* a, int lda, double* at, int ldat, int rows,
               int cols) {
  constexpr int kBlock = 32;
  for (int i0 = 0; i0 < rows; i0 += kBlock) {
    const int i1 = std::min(i0 + kBlock, rows);
    for (int j0 = 0; j0 < cols; j0 += kBlock) {
      const int j1 = std::min(j0 + kBlock, cols);
      for (int i = i0; i < i1; ++i)
        for (int j = j0; j < j1; ++j)
          at[static_cast<size_t>(j) * ldat + i] =
              a[static_cast<size_t>(i) * lda + j];
    }
  }
}

}  // namespace sdlab::kernels
