#pragma once

// Matrix spectral factorization on the unit circle.
//
// Given a Laurent matrix polynomial Phi(z) = sum_{|k| <= N} Phi_k z^k that is
// Hermitian on |z| = 1 (Phi_{-k} = Phi_k^*) and positive semidefinite there,
// compute a polynomial factor G(z) = sum_{k=0}^N G_k z^k with
//
//     Phi(z) = G(1/conj(z))^* G(z)      on |z| = 1.
//
// The solver is a Newton fixed-point iteration on the factor (G <- [U G]_N
// with U the analytic half of G^{-*} Phi G^{-1}), run over a ladder of
// diagonal regularizations so that spectra with zeros on the circle still
// converge; the reported residual is always measured against the original,
// unregularized input.

#include <complex>

#include "psdg/matrixpoly.hpp"

namespace psdg {

struct SpectralOptions {
    double tol = 1e-10;   // target residual, relative to the input scale
    int max_iter = 80;    // Newton iterations per ladder stage
};

struct SpectralResult {
    MatrixPoly<std::complex<double>> factor;  // G(z), degree <= band of input
    double residual = 0.0;  // max |(Phi - G~ G)_k| over coefficients/entries
    int iterations = 0;     // total Newton iterations spent
    bool converged = false; // residual <= tol * (1 + input scale)
};

// Throws std::invalid_argument if the input is not square or not Hermitian
// on the circle (within a coarse structural tolerance).
SpectralResult spectral_factor_circle(const LaurentMatrixPoly<std::complex<double>>& phi,
                                      const SpectralOptions& opts = {});

}  // namespace psdg
