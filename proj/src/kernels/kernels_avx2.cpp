// AVX2+FMA variants. This TU is compiled with -mavx2 -mfma; it must only be
// reached through the dispatch table after a CPUID check.
#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "sdlab/kernels/kernels.hpp"

namespace sdlab::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// 2x16 register-blocked ikj update: B rows stream through L1, the C block
// stays in registers across the whole k loop.
void gemm_accum_avx2(const double* a, int lda, const double* b, int ldb,
                     double* c, int ldc, int m, int n, int k) {
  int j = 0;
  for (; j + 16 <= n; j += 16) {
    int i = 0;
    for (; i + 2 <= m; i += 2) {
      const double* a0 = a + static_cast<size_t>(i) * lda;
      const double* a1 = a0 + lda;
      double* c0 = c + static_cast<size_t>(i) * ldc + j;
      double* c1 = c0 + ldc;
      __m256d acc00 = _mm256_loadu_pd(c0 + 0);
      __m256d acc01 = _mm256_loadu_pd(c0 + 4);
      __m256d acc02 = _mm256_loadu_pd(c0 + 8);
      __m256d acc03 = _mm256_loadu_pd(c0 + 12);
      __m256d acc10 = _mm256_loadu_pd(c1 + 0);
      __m256d acc11 = _mm256_loadu_pd(c1 + 4);
      __m256d acc12 = _mm256_loadu_pd(c1 + 8);
      __m256d acc13 = _mm256_loadu_pd(c1 + 12);
      const double* brow = b + j;
      for (int kk = 0; kk < k; ++kk, brow += ldb) {
        const __m256d b0 = _mm256_loadu_pd(brow + 0);
        const __m256d b1 = _mm256_loadu_pd(brow + 4);
        const __m256d b2 = _mm256_loadu_pd(brow + 8);
        const __m256d b3 = _mm256_loadu_pd(brow + 12);
        const __m256d av0 = _mm256_set1_pd(a0[kk]);
        acc00 = _mm256_fmadd_pd(av0, b0, acc00);
        acc01 = _mm256_fmadd_pd(av0, b1, acc01);
        acc02 = _mm256_fmadd_pd(av0, b2, acc02);
        acc03 = _mm256_fmadd_pd(av0, b3, acc03);
        const __m256d av1 = _mm256_set1_pd(a1[kk]);
        acc10 = _mm256_fmadd_pd(av1, b0, acc10);
        acc11 = _mm256_fmadd_pd(av1, b1, acc11);
        acc12 = _mm256_fmadd_pd(av1, b2, acc12);
        acc13 = _mm256_fmadd_pd(av1, b3, acc13);
      }
      _mm256_storeu_pd(c0 + 0, acc00);
      _mm256_storeu_pd(c0 + 4, acc01);
      _mm256_storeu_pd(c0 + 8, acc02);
      _mm256_storeu_pd(c0 + 12, acc03);
      _mm256_storeu_pd(c1 + 0, acc10);
      _mm256_storeu_pd(c1 + 4, acc11);
      _mm256_storeu_pd(c1 + 8, acc12);
      _mm256_storeu_pd(c1 + 12, acc13);
    }
    if (i < m) {
      const double* a0 = a + static_cast<size_t>(i) * lda;
      double* c0 = c + static_cast<size_t>(i) * ldc + j;
      __m256d acc0 = _mm256_loadu_pd(c0 + 0);
      __m256d acc1 = _mm256_loadu_pd(c0 + 4);
      __m256d acc2 = _mm256_loadu_pd(c0 + 8);
      __m256d acc3 = _mm256_loadu_pd(c0 + 12);
      const double* brow = b + j;
      for (int kk = 0; kk < k; ++kk, brow += ldb) {
        const __m256d av = _mm256_set1_pd(a0[kk]);
        acc0 = _mm256_fmadd_pd(av, _mm256_loadu_pd(brow + 0), acc0);
        acc1 = _mm256_fmadd_pd(av, _mm256_loadu_pd(brow + 4), acc1);
        acc2 = _mm256_fmadd_pd(av, _mm256_loadu_pd(brow + 8), acc2);
        acc3 = _mm256_fmadd_pd(av, _mm256_loadu_pd(brow + 12), acc3);
      }
      _mm256_storeu_pd(c0 + 0, acc0);
      _mm256_storeu_pd(c0 + 4, acc1);
      _mm256_storeu_pd(c0 + 8, acc2);
      _mm256_storeu_pd(c0 + 12, acc3);
    }
  }
  for (; j + 4 <= n; j += 4) {
    for (int i = 0; i < m; ++i) {
      const double* a0 = a + static_cast<size_t>(i) * lda;
      double* c0 = c + static_cast<size_t>(i) * ldc + j;
      __m256d acc = _mm256_loadu_pd(c0);
      const double* brow = b + j;
      for (int kk = 0; kk < k; ++kk, brow += ldb)
        acc = _mm256_fmadd_pd(_mm256_set1_pd(a0[kk]), _mm256_loadu_pd(brow),
                              acc);
      _mm256_storeu_pd(c0, acc);
    }
  }
  if (j < n) {
    for (int i = 0; i < m; ++i) {
      const double* a0 = a + static_cast<size_t>(i) * lda;
      double* c0 = c + static_cast<size_t>(i) * ldc;
      for (int kk = 0; kk < k; ++kk) {
        const double av = a0[kk];
        const double* brow = b + static_cast<size_t>(kk) * ldb;
        for (int jj = j; jj < n; ++jj) c0[jj] += av * brow[jj];
      }
    }
  }
}

void gemv_rows_avx2(const double* m, int ldm, const double* x, double* y,
                    int rows, int cols) {
  for (int i = 0; i < rows; ++i) {
    const double* row = m + static_cast<size_t>(i) * ldm;
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd();
    __m256d acc3 = _mm256_setzero_pd();
    int j = 0;
    for (; j + 16 <= cols; j += 16) {
      acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(row + j + 0),
                             _mm256_loadu_pd(x + j + 0), acc0);
      acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(row + j + 4),
                             _mm256_loadu_pd(x + j + 4), acc1);
      acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(row + j + 8),
                             _mm256_loadu_pd(x + j + 8), acc2);
      acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(row + j + 12),
                             _mm256_loadu_pd(x + j + 12), acc3);
    }
    for (; j + 4 <= cols; j += 4)
      acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(row + j), _mm256_loadu_pd(x + j),
                             acc0);
    double acc = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1),
                                    _mm256_add_pd(acc2, acc3)));
    for (; j < cols; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
}

double dot_avx2(const double* x, const double* y, int n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i),
                           acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4),
                           _mm256_loadu_pd(y + i + 4), acc1);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double sum_avx2(const double* x, int n) {
  __m256d acc = _mm256_setzero_pd();
  int i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

double max_val_avx2(const double* x, int n) {
  if (n < 8) {
    double m = x[0];
    for (int i = 1; i < n; ++i) m = std::max(m, x[i]);
    return m;
  }
  __m256d acc = _mm256_loadu_pd(x);
  int i = 4;
  for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, _mm256_loadu_pd(x + i));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double m = std::max(std::max(lanes[0], lanes[1]),
                      std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) m = std::max(m, x[i]);
  return m;
}

void axpy_avx2(double a, const double* x, double* y, int n) {
  const __m256d av = _mm256_set1_pd(a);
  int i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void mix_avx2(double t, const double* x, double* y, int n) {
  const __m256d tv = _mm256_set1_pd(t);
  const __m256d kv = _mm256_set1_pd(1.0 - t);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    const __m256d yv = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(tv, xv, _mm256_mul_pd(kv, yv)));
  }
  const double keep = 1.0 - t;
  for (; i < n; ++i) y[i] = t * x[i] + keep * y[i];
}

void relu_avx2(const double* x, double* y, int n) {
  const __m256d zero = _mm256_setzero_pd();
  int i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_max_pd(zero, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_grad_avx2(const double* act, const double* dy, double* dx, int n) {
  const __m256d zero = _mm256_setzero_pd();
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(act + i), zero,
                                       _CMP_GT_OQ);
    _mm256_storeu_pd(dx + i, _mm256_and_pd(mask, _mm256_loadu_pd(dy + i)));
  }
  for (; i < n; ++i) dx[i] = act[i] > 0.0 ? dy[i] : 0.0;
}

void add_bias_rows_avx2(double* y, int ldy, const double* b, int rows,
                        int cols) {
  for (int i = 0; i < rows; ++i) {
    double* row = y + static_cast<size_t>(i) * ldy;
    int j = 0;
    for (; j + 4 <= cols; j += 4)
      _mm256_storeu_pd(row + j, _mm256_add_pd(_mm256_loadu_pd(row + j),
                                              _mm256_loadu_pd(b + j)));
    for (; j < cols; ++j) row[j] += b[j];
  }
}

void adam_update_avx2(double* p, double* m, double* v, const double* g, int n,
                      double lr, double b1, double b2, double eps, double bc1,
                      double bc2s) {
  const __m256d b1v = _mm256_set1_pd(b1);
  const __m256d om1v = _mm256_set1_pd(1.0 - b1);
  const __m256d b2v = _mm256_set1_pd(b2);
  const __m256d om2v = _mm256_set1_pd(1.0 - b2);
  const __m256d lrv = _mm256_set1_pd(lr);
  const __m256d bc1v = _mm256_set1_pd(bc1);
  const __m256d bc2sv = _mm256_set1_pd(bc2s);
  const __m256d epsv = _mm256_set1_pd(eps);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d gv = _mm256_loadu_pd(g + i);
    __m256d mv = _mm256_fmadd_pd(b1v, _mm256_loadu_pd(m + i),
                                 _mm256_mul_pd(om1v, gv));
    __m256d vv = _mm256_fmadd_pd(b2v, _mm256_loadu_pd(v + i),
                                 _mm256_mul_pd(om2v, _mm256_mul_pd(gv, gv)));
    _mm256_storeu_pd(m + i, mv);
    _mm256_storeu_pd(v + i, vv);
    const __m256d num = _mm256_mul_pd(lrv, _mm256_div_pd(mv, bc1v));
    const __m256d den = _mm256_add_pd(_mm256_div_pd(_mm256_sqrt_pd(vv), bc2sv),
                                      epsv);
    _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i),
                                          _mm256_div_pd(num, den)));
  }
  for (; i < n; ++i) {
    const double gi = g[i];
    m[i] = b1 * m[i] + (1.0 - b1) * gi;
    v[i] = b2 * v[i] + (1.0 - b2) * gi * gi;
    p[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i]) / bc2s + eps);
  }
}

}  // namespace

const Kernels& avx2() {
  static const Kernels k = {
      "avx2",         gemm_accum_avx2, gemv_rows_avx2, dot_avx2,
      sum_avx2,       max_val_avx2,    axpy_avx2,      mix_avx2,
      relu_avx2,      relu_grad_avx2,  add_bias_rows_avx2,
      adam_update_avx2,
  };
  return k;
}

}  // namespace sdlab::kernels

#endif  // x86_64
