#pragma once

// Shared helpers for the test suites: a seeded deterministic RNG and
// generators for small random exact scalars, polynomials, and matrix
// polynomials.

#include <complex>
#include <random>

#include "psdg/matrixpoly.hpp"
#include "psdg/poly.hpp"
#include "psdg/scalars.hpp"

namespace psdg_test {

using psdg::Gaussian;
using psdg::Mat;
using psdg::MatrixPoly;
using psdg::Poly;
using psdg::Rational;

inline std::mt19937_64& rng() {
    static std::mt19937_64 gen(0x5eedu);
    return gen;
}

inline Rational rand_rational(int max_num = 4, int max_den = 3) {
    std::uniform_int_distribution<int> num(-max_num, max_num);
    std::uniform_int_distribution<int> den(1, max_den);
    return psdg::make_rational(num(rng()), den(rng()));
}

inline Gaussian rand_gaussian() { return Gaussian(rand_rational(), rand_rational()); }

inline Poly<Gaussian> rand_poly(int max_deg = 3) {
    std::uniform_int_distribution<int> degd(0, max_deg);
    int d = degd(rng());
    std::vector<Gaussian> c(static_cast<size_t>(d) + 1);
    for (auto& v : c) v = rand_gaussian();
    return Poly<Gaussian>(std::move(c));
}

inline MatrixPoly<Gaussian> rand_matrix_poly(int n, int max_deg = 3) {
    std::uniform_int_distribution<int> degd(0, max_deg);
    int d = degd(rng());
    std::vector<Mat<Gaussian>> c(static_cast<size_t>(d) + 1, Mat<Gaussian>(n, n));
    for (auto& m : c)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = rand_gaussian();
    return MatrixPoly<Gaussian>(std::move(c));
}

inline MatrixPoly<Gaussian> rand_hermitian_matrix_poly(int n, int max_deg = 3) {
    std::uniform_int_distribution<int> degd(0, max_deg);
    int d = degd(rng());
    std::vector<Mat<Gaussian>> c(static_cast<size_t>(d) + 1, Mat<Gaussian>(n, n));
    for (auto& m : c) {
        for (int i = 0; i < n; ++i) {
            m(i, i) = Gaussian(rand_rational());
            for (int j = i + 1; j < n; ++j) {
                Gaussian v = rand_gaussian();
                m(i, j) = v;
                m(j, i) = v.conj();
            }
        }
    }
    return MatrixPoly<Gaussian>(std::move(c));
}

inline bool close(std::complex<double> a, std::complex<double> b, double tol = 1e-9) {
    return std::abs(a - b) <= tol;
}

}  // namespace psdg_test
