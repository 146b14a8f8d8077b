#pragma once

#include <cstddef>

namespace chansep::kernels {

// Dense math used by the network engine. Every kernel exists twice: a plain
// serial reference and an OpenMP version. Both evaluate each output element
// with the same fixed summation order, so the two backends agree bitwise and
// results do not depend on the thread count.

// Backend toggle for the dispatching entry points below. Defaults to the
// parallel backend when built with OpenMP.
bool parallel_enabled();
void set_parallel(bool enabled);
int max_threads();

namespace serial {
// Y[k,o] = b[o] + sum_i X[k,i] * W[o,i];   X: KxIn, W: OutxIn, Y: KxOut
void affine_forward(const double* x, const double* w, const double* b, double* y,
                    std::size_t k, std::size_t in, std::size_t out);
// dX[k,i] = sum_o dY[k,o] * W[o,i]
void grad_input(const double* dy, const double* w, double* dx,
                std::size_t k, std::size_t in, std::size_t out);
// dW[o,i] = sum_k dY[k,o] * X[k,i]
void grad_weights(const double* dy, const double* x, double* dw,
                  std::size_t k, std::size_t in, std::size_t out);
// db[o] = sum_k dY[k,o]
void grad_bias(const double* dy, double* db, std::size_t k, std::size_t out);
// sum over rows of the per-row sum of (a-b)^2; row partials are added in
// row order, which pins the reduction order for both backends
double sum_sq_diff(const double* a, const double* b, std::size_t rows, std::size_t cols);
}  // namespace serial

namespace omp {
void affine_forward(const double* x, const double* w, const double* b, double* y,
                    std::size_t k, std::size_t in, std::size_t out);
void grad_input(const double* dy, const double* w, double* dx,
                std::size_t k, std::size_t in, std::size_t out);
void grad_weights(const double* dy, const double* x, double* dw,
                  std::size_t k, std::size_t in, std::size_t out);
void grad_bias(const double* dy, double* db, std::size_t k, std::size_t out);
double sum_sq_diff(const double* a, const double* b, std::size_t rows, std::size_t cols);
}  // namespace omp

// Dispatchers honoring set_parallel().
void affine_forward(const double* x, const double* w, const double* b, double* y,
                    std::size_t k, std::size_t in, std::size_t out);
void grad_input(const double* dy, const double* w, double* dx,
                std::size_t k, std::size_t in, std::size_t out);
void grad_weights(const double* dy, const double* x, double* dw,
                  std::size_t k, std::size_t in, std::size_t out);
void grad_bias(const double* dy, double* db, std::size_t k, std::size_t out);
double sum_sq_diff(const double* a, const double* b, std::size_t rows, std::size_t cols);

}  // namespace chansep::kernels
