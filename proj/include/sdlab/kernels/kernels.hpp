#pragma once

#include <string>
#include <vector>

namespace sdlab::kernels {

// Vectorized inner loops used by the MLP, optimizer and target-network
// machinery. All matrices are row-major; ld* parameters are row strides.
//
// Each entry has a scalar reference implementation plus SIMD variants
// (AVX2, AVX-512) selected once at startup from CPUID, overridable with
// SDLAB_KERNELS=scalar|avx2|avx512 or force_backend(). Backends agree to
// rounding-level accuracy, not bitwise: the equivalence suite pins the
// tolerance.
struct Kernels {
  const char* name;

  // C[m x n] += A[m x k] * B[k x n]. Accumulation over k is sequential
  // per output element in every backend.
  void (*gemm_accum)(const double* a, int lda, const double* b, int ldb,
                     double* c, int ldc, int m, int n, int k);

  // y[i] = dot(M.row(i), x), i in [0, rows)
  void (*gemv_rows)(const double* m, int ldm, const double* x, double* y,
                    int rows, int cols);

  double (*dot)(const double* x, const double* y, int n);
  double (*sum)(const double* x, int n);
  double (*max_val)(const double* x, int n);

  // y += a * x
  void (*axpy)(double a, const double* x, double* y, int n);
  // y = t*x + (1-t)*y (Polyak mix)
  void (*mix)(double t, const double* x, double* y, int n);

  void (*relu)(const double* x, double* y, int n);
  // dx[i] = act[i] > 0 ? dy[i] : 0
  void (*relu_grad)(const double* act, const double* dy, double* dx, int n);

  // y.row(i) += b for i in [0, rows)
  void (*add_bias_rows)(double* y, int ldy, const double* b, int rows,
                        int cols);

  // Bias-corrected Adam:
  //   m = b1*m + (1-b1)*g;  v = b2*v + (1-b2)*g^2
  //   p -= lr * (m/bc1) / (sqrt(v)/bc2s + eps)
  // with bc1 = 1-b1^t and bc2s = sqrt(1-b2^t) supplied by the caller.
  void (*adam_update)(double* p, double* m, double* v, const double* g, int n,
                      double lr, double b1, double b2, double eps, double bc1,
                      double bc2s);
};

const Kernels& scalar();
#if defined(__x86_64__) || defined(_M_X64)
const Kernels& avx2();
const Kernels& avx512();
#endif

bool avx2_supported();
bool avx512_supported();

// Backend chosen at first use: SDLAB_KERNELS env var if set, otherwise the
// widest supported SIMD level. Stable for the lifetime of the process
// unless force_backend() is called.
const Kernels& active();
void force_backend(const std::string& name);  // "auto"|"scalar"|"avx2"|"avx512"
std::vector<std::string> available_backends();

// AT[j,i] = A[i,j]; scratch helper, not dispatched.
void transpose(const double* a, int lda, double* at, int ldat, int rows,
               int cols);

}  // namespace sdlab::kernels
