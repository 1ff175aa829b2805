// AVX-512F variants; same contracts as the scalar backend. Compiled with
// -mavx512f, reached only after CPUID dispatch.
#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "sdlab/kernels/kernels.hpp"

namespace sdlab::kernels {
namespace {

void gemm_accum_avx512(const double* a, int lda, const double* b, int ldb,
                       double* c, int ldc, int m, int n, int k) {
  int j = 0;
  for (; j + 32 <= n; j += 32) {
    int i = 0;
    for (; i + 2 <= m; i += 2) {
      const double* a0 = a + static_cast<size_t>(i) * lda;
      const double* a1 = a0 + lda;
      double* c0 = c + static_cast<size_t>(i) * ldc + j;
      double* c1 = c0 + ldc;
      __m512d acc00 = _mm512_loadu_pd(c0 + 0);
      __m512d acc01 = _mm512_loadu_pd(c0 + 8);
      __m512d acc02 = _mm512_loadu_pd(c0 + 16);
      __m512d acc03 = _mm512_loadu_pd(c0 + 24);
      __m512d acc10 = _mm512_loadu_pd(c1 + 0);
      __m512d acc11 = _mm512_loadu_pd(c1 + 8);
      __m512d acc12 = _mm512_loadu_pd(c1 + 16);
      __m512d acc13 = _mm512_loadu_pd(c1 + 24);
      const double* brow = b + j;
      for (int kk = 0; kk < k; ++kk, brow += ldb) {
        const __m512d b0 = _mm512_loadu_pd(brow + 0);
        const __m512d b1 = _mm512_loadu_pd(brow + 8);
        const __m512d b2 = _mm512_loadu_pd(brow + 16);
        const __m512d b3 = _mm512_loadu_pd(brow + 24);
        const __m512d av0 = _mm512_set1_pd(a0[kk]);
        acc00 = _mm512_fmadd_pd(av0, b0, acc00);
        acc01 = _mm512_fmadd_pd(av0, b1, acc01);
        acc02 = _mm512_fmadd_pd(av0, b2, acc02);
        acc03 = _mm512_fmadd_pd(av0, b3, acc03);
        const __m512d av1 = _mm512_set1_pd(a1[kk]);
        acc10 = _mm512_fmadd_pd(av1, b0, acc10);
        acc11 = _mm512_fmadd_pd(av1, b1, acc11);
        acc12 = _mm512_fmadd_pd(av1, b2, acc12);
        acc13 = _mm512_fmadd_pd(av1, b3, acc13);
      }
      _mm512_storeu_pd(c0 + 0, acc00);
      _mm512_storeu_pd(c0 + 8, acc01);
      _mm512_storeu_pd(c0 + 16, acc02);
      _mm512_storeu_pd(c0 + 24, acc03);
      _mm512_storeu_pd(c1 + 0, acc10);
      _mm512_storeu_pd(c1 + 8, acc11);
      _mm512_storeu_pd(c1 + 16, acc12);
      _mm512_storeu_pd(c1 + 24, acc13);
    }
    if (i < m) {
      const double* a0 = a + static_cast<size_t>(i) * lda;
      double* c0 = c + static_cast<size_t>(i) * ldc + j;
      __m512d acc0 = _mm512_loadu_pd(c0 + 0);
      __m512d acc1 = _mm512_loadu_pd(c0 + 8);
      __m512d acc2 = _mm512_loadu_pd(c0 + 16);
      __m512d acc3 = _mm512_loadu_pd(c0 + 24);
      const double* brow = b + j;
      for (int kk = 0; kk < k; ++kk, brow += ldb) {
        const __m512d av = _mm512_set1_pd(a0[kk]);
        acc0 = _mm512_fmadd_pd(av, _mm512_loadu_pd(brow + 0), acc0);
        acc1 = _mm512_fmadd_pd(av, _mm512_loadu_pd(brow + 8), acc1);
        acc2 = _mm512_fmadd_pd(av, _mm512_loadu_pd(brow + 16), acc2);
        acc3 = _mm512_fmadd_pd(av, _mm512_loadu_pd(brow + 24), acc3);
      }
      _mm512_storeu_pd(c0 + 0, acc0);
      _mm512_storeu_pd(c0 + 8, acc1);
      _mm512_storeu_pd(c0 + 16, acc2);
      _mm512_storeu_pd(c0 + 24, acc3);
    }
  }
  for (; j + 8 <= n; j += 8) {
    for (int i = 0; i < m; ++i) {
      const double* a0 = a + static_cast<size_t>(i) * lda;
      double* c0 = c + static_cast<size_t>(i) * ldc + j;
      __m512d acc = _mm512_loadu_pd(c0);
      const double* brow = b + j;
      for (int kk = 0; kk < k; ++kk, brow += ldb)
        acc = _mm512_fmadd_pd(_mm512_set1_pd(a0[kk]), _mm512_loadu_pd(brow),
                              acc);
      _mm512_storeu_pd(c0, acc);
    }
  }
  if (j < n) {
    const __mmask8 tail = static_cast<__mmask8>((1u << (n - j)) - 1u);
    for (int i = 0; i < m; ++i) {
      const double* a0 = a + static_cast<size_t>(i) * lda;
      double* c0 = c + static_cast<size_t>(i) * ldc + j;
      __m512d acc = _mm512_maskz_loadu_pd(tail, c0);
      const double* brow = b + j;
      for (int kk = 0; kk < k; ++kk, brow += ldb)
        acc = _mm512_fmadd_pd(_mm512_set1_pd(a0[kk]),
                              _mm512_maskz_loadu_pd(tail, brow), acc);
      _mm512_mask_storeu_pd(c0, tail, acc);
    }
  }
}

void gemv_rows_avx512(const double* m, int ldm, const double* x, double* y,
                      int rows, int cols) {
  for (int i = 0; i < rows; ++i) {
    const double* row = m + static_cast<size_t>(i) * ldm;
    __m512d acc0 = _mm512_setzero_pd();
    __m512d acc1 = _mm512_setzero_pd();
    int j = 0;
    for (; j + 16 <= cols; j += 16) {
      acc0 = _mm512_fmadd_pd(_mm512_loadu_pd(row + j),
                             _mm512_loadu_pd(x + j), acc0);
      acc1 = _mm512_fmadd_pd(_mm512_loadu_pd(row + j + 8),
                             _mm512_loadu_pd(x + j + 8), acc1);
    }
    for (; j + 8 <= cols; j += 8)
      acc0 = _mm512_fmadd_pd(_mm512_loadu_pd(row + j), _mm512_loadu_pd(x + j),
                             acc0);
    double acc = _mm512_reduce_add_pd(_mm512_add_pd(acc0, acc1));
    for (; j < cols; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
}

double dot_avx512(const double* x, const double* y, int n) {
  __m512d acc = _mm512_setzero_pd();
  int i = 0;
  for (; i + 8 <= n; i += 8)
    acc = _mm512_fmadd_pd(_mm512_loadu_pd(x + i), _mm512_loadu_pd(y + i), acc);
  double s = _mm512_reduce_add_pd(acc);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double sum_avx512(const double* x, int n) {
  __m512d acc = _mm512_setzero_pd();
  int i = 0;
  for (; i + 8 <= n; i += 8) acc = _mm512_add_pd(acc, _mm512_loadu_pd(x + i));
  double s = _mm512_reduce_add_pd(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

double max_val_avx512(const double* x, int n) {
  if (n < 16) {
    double m = x[0];
    for (int i = 1; i < n; ++i) m = std::max(m, x[i]);
    return m;
  }
  __m512d acc = _mm512_loadu_pd(x);
  int i = 8;
  for (; i + 8 <= n; i += 8) acc = _mm512_max_pd(acc, _mm512_loadu_pd(x + i));
  double m = _mm512_reduce_max_pd(acc);
  for (; i < n; ++i) m = std::max(m, x[i]);
  return m;
}

void axpy_avx512(double a, const double* x, double* y, int n) {
  const __m512d av = _mm512_set1_pd(a);
  int i = 0;
  for (; i + 8 <= n; i += 8)
    _mm512_storeu_pd(y + i, _mm512_fmadd_pd(av, _mm512_loadu_pd(x + i),
                                            _mm512_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void mix_avx512(double t, const double* x, double* y, int n) {
  const __m512d tv = _mm512_set1_pd(t);
  const __m512d kv = _mm512_set1_pd(1.0 - t);
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m512d xv = _mm512_loadu_pd(x + i);
    const __m512d yv = _mm512_loadu_pd(y + i);
    _mm512_storeu_pd(y + i, _mm512_fmadd_pd(tv, xv, _mm512_mul_pd(kv, yv)));
  }
  const double keep = 1.0 - t;
  for (; i < n; ++i) y[i] = t * x[i] + keep * y[i];
}

void relu_avx512(const double* x, double* y, int n) {
  const __m512d zero = _mm512_setzero_pd();
  int i = 0;
  for (; i + 8 <= n; i += 8)
    _mm512_storeu_pd(y + i, _mm512_max_pd(zero, _mm512_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_grad_avx512(const double* act, const double* dy, double* dx,
                      int n) {
  const __m512d zero = _mm512_setzero_pd();
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    const __mmask8 mask =
        _mm512_cmp_pd_mask(_mm512_loadu_pd(act + i), zero, _CMP_GT_OQ);
    _mm512_storeu_pd(dx + i,
                     _mm512_maskz_mov_pd(mask, _mm512_loadu_pd(dy + i)));
  }
  for (; i < n; ++i) dx[i] = act[i] > 0.0 ? dy[i] : 0.0;
}

void add_bias_rows_avx512(double* y, int ldy, const double* b, int rows,
                          int cols) {
  for (int i = 0; i < rows; ++i) {
    double* row = y + static_cast<size_t>(i) * ldy;
    int j = 0;
    for (; j + 8 <= cols; j += 8)
      _mm512_storeu_pd(row + j, _mm512_add_pd(_mm512_loadu_pd(row + j),
                                              _mm512_loadu_pd(b + j)));
    for (; j < cols; ++j) row[j] += b[j];
  }
}

void adam_update_avx512(double* p, double* m, double* v, const double* g,
                        int n, double lr, double b1, double b2, double eps,
                        double bc1, double bc2s) {
  const __m512d b1v = _mm512_set1_pd(b1);
  const __m512d om1v = _mm512_set1_pd(1.0 - b1);
  const __m512d b2v = _mm512_set1_pd(b2);
  const __m512d om2v = _mm512_set1_pd(1.0 - b2);
  const __m512d lrv = _mm512_set1_pd(lr);
  const __m512d bc1v = _mm512_set1_pd(bc1);
  const __m512d bc2sv = _mm512_set1_pd(bc2s);
  const __m512d epsv = _mm512_set1_pd(eps);
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m512d gv = _mm512_loadu_pd(g + i);
    __m512d mv = _mm512_fmadd_pd(b1v, _mm512_loadu_pd(m + i),
                                 _mm512_mul_pd(om1v, gv));
    __m512d vv = _mm512_fmadd_pd(b2v, _mm512_loadu_pd(v + i),
                                 _mm512_mul_pd(om2v, _mm512_mul_pd(gv, gv)));
    _mm512_storeu_pd(m + i, mv);
    _mm512_storeu_pd(v + i, vv);
    const __m512d num = _mm512_mul_pd(lrv, _mm512_div_pd(mv, bc1v));
    const __m512d den = _mm512_add_pd(
        _mm512_div_pd(_mm512_sqrt_pd(vv), bc2sv), epsv);
    _mm512_storeu_pd(p + i, _mm512_sub_pd(_mm512_loadu_pd(p + i),
                                          _mm512_div_pd(num, den)));
  }
  for (; i < n; ++i) {
    const double gi = g[i];
    m[i] = b1 * m[i] + (1.0 - b1) * gi;
    v[i] = b2 * v[i] + (1.0 - b2) * gi * gi;
    p[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i]) / bc2s + eps);
  }
}

}  // namespace

const Kernels& avx512() {
  static const Kernels k = {
      "avx512",         gemm_accum_avx512, gemv_rows_avx512, dot_avx512,
      sum_avx512,       max_val_avx512,    axpy_avx512,      mix_avx512,
      relu_avx512,      relu_grad_avx512,  add_bias_rows_avx512,
      adam_update_avx512,
  };
  return k;
}

}  // namespace sdlab::kernels

#endif  // x86_64
