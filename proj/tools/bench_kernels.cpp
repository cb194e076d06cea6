#include <chrono>
#include <cstdio>
#include <random>

#include "decocrit/kernels.hpp"

// Times the serial reference implementations against the OpenMP kernels on
// representative shapes and verifies the outputs agree bitwise.

namespace {

using namespace decocrit;
namespace kernels = decocrit::kernels;
using clock_type = std::chrono::high_resolution_clock;

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

Matrix random_matrix(int rows, int cols, std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = Complex(dist(rng), dist(rng));
    return m;
}

template <typename SerialFn, typename ParallelFn>
void bench(const char* name, int reps, SerialFn serial, ParallelFn parallel) {
    auto t0 = clock_type::now();
    for (int i = 0; i < reps; ++i) serial();
    const double ts = seconds_since(t0) / reps;

    t0 = clock_type::now();
    for (int i = 0; i < reps; ++i) parallel();
    const double tp = seconds_since(t0) / reps;

    std::printf("%-22s serial %9.2f ms   omp %9.2f ms   speedup %.2fx\n", name, 1e3 * ts, 1e3 * tp,
                ts / tp);
}

} // namespace

int main() {
    std::mt19937_64 rng(11);

    const int chi = 256, d = 4;
    kernels::SiteTensor a(d), b(d);
    for (int s = 0; s < d; ++s) {
        a[s] = random_matrix(chi, chi, rng);
        b[s] = random_matrix(chi, chi, rng);
    }
    const Matrix e = random_matrix(chi, chi, rng);

    {
        const Matrix ref = kernels::transfer_update_serial(e, a, b);
        const Matrix par = kernels::transfer_update_parallel(e, a, b);
        if (ref != par) {
            std::printf("transfer_update: serial/omp outputs differ!\n");
            return 1;
        }
    }

    bench("transfer_update", 10,
          [&] { return kernels::transfer_update_serial(e, a, b); },
          [&] { return kernels::transfer_update_parallel(e, a, b); });

    const Matrix gate = random_matrix(d * d, d * d, rng);
    const Matrix theta = random_matrix(d * chi, d * chi, rng);
    bench("gate_theta", 10,
          [&] { return kernels::gate_theta_serial(gate, theta, chi, chi, d); },
          [&] { return kernels::gate_theta_parallel(gate, theta, chi, chi, d); });

    // DMRG-style matvec, d=2 and MPO width 4
    {
        const int chi2 = 160, width = 4, d2 = 2;
        kernels::SiteTensor a2(d2);
        for (int s = 0; s < d2; ++s) a2[s] = random_matrix(chi2, chi2, rng);
        std::vector<Matrix> lenv(width), renv(width);
        for (int w = 0; w < width; ++w) {
            lenv[w] = random_matrix(chi2, chi2, rng);
            renv[w] = random_matrix(chi2, chi2, rng);
        }
        kernels::MpoSiteOps ops(width, std::vector<Matrix>(width));
        ops[0][0] = random_matrix(d2, d2, rng);
        ops[1][0] = random_matrix(d2, d2, rng);
        ops[2][0] = random_matrix(d2, d2, rng);
        ops[2][1] = random_matrix(d2, d2, rng);
        ops[2][2] = random_matrix(d2, d2, rng);
        ops[3][3] = random_matrix(d2, d2, rng);
        const Matrix th = random_matrix(d2 * chi2, d2 * chi2, rng);
        bench("heff_matvec", 20,
              [&] { return kernels::heff_matvec_serial(lenv, renv, ops, ops, th, chi2, chi2, d2); },
              [&] { return kernels::heff_matvec_parallel(lenv, renv, ops, ops, th, chi2, chi2, d2); });
    }

    // dense reference kernels at L = 10
    {
        const int length = 10;
        const std::int64_t dim = 1 << length;
        Matrix rho = random_matrix(dim, dim, rng);
        rho = (rho + rho.adjoint()).eval();
        std::vector<int> perm(dim);
        std::vector<Complex> phase(dim, Complex(1, 0));
        for (std::int64_t i = 0; i < dim; ++i) perm[i] = static_cast<int>(i ^ 5);
        bench("pauli_mix", 5,
              [&] { return kernels::pauli_mix_serial(rho, perm, phase, 0.7, 0.3); },
              [&] { return kernels::pauli_mix_parallel(rho, perm, phase, 0.7, 0.3); });
        bench("partial_trace", 5,
              [&] { return kernels::partial_trace_serial(rho, 0x1f, length); },
              [&] { return kernels::partial_trace_parallel(rho, 0x1f, length); });
    }
    return 0;
}
