// Times the serial reference kernels against the OpenMP backend over the
// shapes the training loops actually use, and verifies on the fly that both
// backends produce bitwise-identical results.
//
//   bench_kernels [rows] [repeats]
//
// defaults: rows 4096, repeats 50.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "chansep/kernels.hpp"
#include "chansep/rng.hpp"

using namespace chansep;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
  std::vector<double> v(n);
  Rng rng(seed);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

template <typename F>
double time_best_of(int repeats, F&& fn) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

struct Row {
  const char* name;
  double serial_s;
  double omp_s;
  double flops;
  bool identical;
};

void print_row(const Row& r) {
  std::printf("%-14s %10.3f us %10.3f us %8.2fx %8.2f GF/s %s\n", r.name, r.serial_s * 1e6,
              r.omp_s * 1e6, r.serial_s / r.omp_s, r.flops / r.omp_s * 1e-9,
              r.identical ? "bitwise-equal" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t k = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 4096;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 50;
  const std::size_t in = 64, out = 96;

  std::printf("kernel shapes: K=%zu, in=%zu, out=%zu; best of %d runs; %d thread(s)\n\n", k, in,
              out, repeats, kernels::max_threads());
  std::printf("%-14s %13s %13s %9s %13s\n", "kernel", "serial", "openmp", "speedup", "omp rate");

  const std::vector<double> x = random_vec(k * in, 1);
  const std::vector<double> w = random_vec(out * in, 2);
  const std::vector<double> b = random_vec(out, 3);
  const std::vector<double> dy = random_vec(k * out, 4);
  std::vector<double> y_s(k * out), y_p(k * out);
  std::vector<double> dx_s(k * in), dx_p(k * in);
  std::vector<double> dw_s(out * in), dw_p(out * in);
  std::vector<double> db_s(out), db_p(out);

  Row rows[5];

  rows[0] = {"forward",
             time_best_of(repeats, [&] {
               kernels::serial::affine_forward(x.data(), w.data(), b.data(), y_s.data(), k, in,
                                               out);
             }),
             time_best_of(repeats, [&] {
               kernels::omp::affine_forward(x.data(), w.data(), b.data(), y_p.data(), k, in, out);
             }),
             2.0 * k * in * out, y_s == y_p};

  rows[1] = {"grad_input",
             time_best_of(repeats, [&] {
               kernels::serial::grad_input(dy.data(), w.data(), dx_s.data(), k, in, out);
             }),
             time_best_of(repeats, [&] {
               kernels::omp::grad_input(dy.data(), w.data(), dx_p.data(), k, in, out);
             }),
             2.0 * k * in * out, dx_s == dx_p};

  rows[2] = {"grad_weights",
             time_best_of(repeats, [&] {
               kernels::serial::grad_weights(dy.data(), x.data(), dw_s.data(), k, in, out);
             }),
             time_best_of(repeats, [&] {
               kernels::omp::grad_weights(dy.data(), x.data(), dw_p.data(), k, in, out);
             }),
             2.0 * k * in * out, dw_s == dw_p};

  rows[3] = {"grad_bias",
             time_best_of(repeats, [&] {
               kernels::serial::grad_bias(dy.data(), db_s.data(), k, out);
             }),
             time_best_of(repeats, [&] {
               kernels::omp::grad_bias(dy.data(), db_p.data(), k, out);
             }),
             1.0 * k * out, db_s == db_p};

  double loss_s = 0.0, loss_p = 0.0;
  rows[4] = {"sum_sq_diff",
             time_best_of(repeats, [&] {
               loss_s = kernels::serial::sum_sq_diff(y_s.data(), dy.data(), k, out);
             }),
             time_best_of(repeats, [&] {
               loss_p = kernels::omp::sum_sq_diff(y_p.data(), dy.data(), k, out);
             }),
             3.0 * k * out, loss_s == loss_p};

  bool all_identical = true;
  for (const Row& r : rows) {
    print_row(r);
    all_identical = all_identical && r.identical;
  }
  std::printf("\nbackends %s\n", all_identical ? "agree bitwise on every kernel"
                                               : "DISAGREE: the build is broken");
  return all_identical ? 0 : 1;
}
