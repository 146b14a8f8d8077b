#include "chansep/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace chansep::kernels {

namespace {
#ifdef _OPENMP
std::atomic<bool> g_parallel{true};
#else
std::atomic<bool> g_parallel{false};
#endif

using idx = std::ptrdiff_t;

// Accumulates dW rows [o_lo, o_hi) with the fragment loop outermost, so x
// and dy stream row-contiguously while each dW element still sums its k
// contributions in ascending fragment order — the order that defines the
// kernel's bit pattern.
void grad_weights_block(const double* dy, const double* x, double* dw,
                        std::size_t k, std::size_t in, std::size_t out,
                        std::size_t o_lo, std::size_t o_hi) {
  for (std::size_t o = o_lo; o < o_hi; ++o) {
    double* dwo = dw + o * in;
    for (std::size_t i = 0; i < in; ++i) dwo[i] = 0.0;
  }
  for (std::size_t r = 0; r < k; ++r) {
    const double* dyr = dy + r * out;
    const double* xr = x + r * in;
    for (std::size_t o = o_lo; o < o_hi; ++o) {
      const double g = dyr[o];
      double* dwo = dw + o * in;
      for (std::size_t i = 0; i < in; ++i) dwo[i] += g * xr[i];
    }
  }
}

void grad_bias_block(const double* dy, double* db, std::size_t k, std::size_t out,
                     std::size_t o_lo, std::size_t o_hi) {
  for (std::size_t o = o_lo; o < o_hi; ++o) db[o] = 0.0;
  for (std::size_t r = 0; r < k; ++r) {
    const double* dyr = dy + r * out;
    for (std::size_t o = o_lo; o < o_hi; ++o) db[o] += dyr[o];
  }
}
}  // namespace

bool parallel_enabled() { return g_parallel.load(); }

void set_parallel(bool enabled) {
#ifndef _OPENMP
  enabled = false;
#endif
  g_parallel.store(enabled);
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace serial {

void affine_forward(const double* x, const double* w, const double* b, double* y,
                    std::size_t k, std::size_t in, std::size_t out) {
  for (idx r = 0; r < static_cast<idx>(k); ++r) {
    const double* xr = x + r * in;
    double* yr = y + r * out;
    for (std::size_t o = 0; o < out; ++o) {
      double acc = b ? b[o] : 0.0;
      const double* wo = w + o * in;
      for (std::size_t i = 0; i < in; ++i) acc += xr[i] * wo[i];
      yr[o] = acc;
    }
  }
}

void grad_input(const double* dy, const double* w, double* dx,
                std::size_t k, std::size_t in, std::size_t out) {
  for (idx r = 0; r < static_cast<idx>(k); ++r) {
    const double* dyr = dy + r * out;
    double* dxr = dx + r * in;
    for (std::size_t i = 0; i < in; ++i) {
      double acc = 0.0;
      for (std::size_t o = 0; o < out; ++o) acc += dyr[o] * w[o * in + i];
      dxr[i] = acc;
    }
  }
}

void grad_weights(const double* dy, const double* x, double* dw,
                  std::size_t k, std::size_t in, std::size_t out) {
  grad_weights_block(dy, x, dw, k, in, out, 0, out);
}

void grad_bias(const double* dy, double* db, std::size_t k, std::size_t out) {
  grad_bias_block(dy, db, k, out, 0, out);
}

double sum_sq_diff(const double* a, const double* b, std::size_t rows, std::size_t cols) {
  std::vector<double> partial(rows);
  for (idx r = 0; r < static_cast<idx>(rows); ++r) {
    const double* ar = a + r * cols;
    const double* br = b + r * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      const double d = ar[c] - br[c];
      acc += d * d;
    }
    partial[r] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace serial

namespace omp {

void affine_forward(const double* x, const double* w, const double* b, double* y,
                    std::size_t k, std::size_t in, std::size_t out) {
#pragma omp parallel for schedule(static)
  for (idx r = 0; r < static_cast<idx>(k); ++r) {
    const double* xr = x + r * in;
    double* yr = y + r * out;
    for (std::size_t o = 0; o < out; ++o) {
      double acc = b ? b[o] : 0.0;
      const double* wo = w + o * in;
      for (std::size_t i = 0; i < in; ++i) acc += xr[i] * wo[i];
      yr[o] = acc;
    }
  }
}

void grad_input(const double* dy, const double* w, double* dx,
                std::size_t k, std::size_t in, std::size_t out) {
#pragma omp parallel for schedule(static)
  for (idx r = 0; r < static_cast<idx>(k); ++r) {
    const double* dyr = dy + r * out;
    double* dxr = dx + r * in;
    for (std::size_t i = 0; i < in; ++i) {
      double acc = 0.0;
      for (std::size_t o = 0; o < out; ++o) acc += dyr[o] * w[o * in + i];
      dxr[i] = acc;
    }
  }
}

void grad_weights(const double* dy, const double* x, double* dw,
                  std::size_t k, std::size_t in, std::size_t out) {
#ifdef _OPENMP
#pragma omp parallel
  {
    const std::size_t nt = static_cast<std::size_t>(omp_get_num_threads());
    const std::size_t tid = static_cast<std::size_t>(omp_get_thread_num());
    const std::size_t chunk = (out + nt - 1) / nt;
    const std::size_t lo = std::min(out, tid * chunk);
    grad_weights_block(dy, x, dw, k, in, out, lo, std::min(out, lo + chunk));
  }
#else
  grad_weights_block(dy, x, dw, k, in, out, 0, out);
#endif
}

void grad_bias(const double* dy, double* db, std::size_t k, std::size_t out) {
#ifdef _OPENMP
#pragma omp parallel
  {
    const std::size_t nt = static_cast<std::size_t>(omp_get_num_threads());
    const std::size_t tid = static_cast<std::size_t>(omp_get_thread_num());
    const std::size_t chunk = (out + nt - 1) / nt;
    const std::size_t lo = std::min(out, tid * chunk);
    grad_bias_block(dy, db, k, out, lo, std::min(out, lo + chunk));
  }
#else
  grad_bias_block(dy, db, k, out, 0, out);
#endif
}

double sum_sq_diff(const double* a, const double* b, std::size_t rows, std::size_t cols) {
  std::vector<double> partial(rows);
#pragma omp parallel for schedule(static)
  for (idx r = 0; r < static_cast<idx>(rows); ++r) {
    const double* ar = a + r * cols;
    const double* br = b + r * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      const double d = ar[c] - br[c];
      acc += d * d;
    }
    partial[r] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace omp

void affine_forward(const double* x, const double* w, const double* b, double* y,
                    std::size_t k, std::size_t in, std::size_t out) {
  if (parallel_enabled()) omp::affine_forward(x, w, b, y, k, in, out);
  else serial::affine_forward(x, w, b, y, k, in, out);
}

void grad_input(const double* dy, const double* w, double* dx,
                std::size_t k, std::size_t in, std::size_t out) {
  if (parallel_enabled()) omp::grad_input(dy, w, dx, k, in, out);
  else serial::grad_input(dy, w, dx, k, in, out);
}

void grad_weights(const double* dy, const double* x, double* dw,
                  std::size_t k, std::size_t in, std::size_t out) {
  if (parallel_enabled()) omp::grad_weights(dy, x, dw, k, in, out);
  else serial::grad_weights(dy, x, dw, k, in, out);
}

void grad_bias(const double* dy, double* db, std::size_t k, std::size_t out) {
  if (parallel_enabled()) omp::grad_bias(dy, db, k, out);
  else serial::grad_bias(dy, db, k, out);
}

double sum_sq_diff(const double* a, const double* b, std::size_t rows, std::size_t cols) {
  if (parallel_enabled()) return omp::sum_sq_diff(a, b, rows, cols);
  return serial::sum_sq_diff(a, b, rows, cols);
}

}  // namespace chansep::kernels
