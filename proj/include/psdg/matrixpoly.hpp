#pragma once

// Dense matrices and matrix polynomials over a scalar field S, plus Laurent
// matrix polynomials (finitely supported two-sided coefficient sequences)
// used by the circle transform.
//
// Conventions
//   * Matrix polynomials are stored as ascending coefficient lists
//     F(x) = sum_k A_k x^k with trailing zero matrices stripped; the zero
//     polynomial has an empty list and degree kNegInfDegree.
//   * The adjoint is F^*(x) = sum_k A_k^* x^k (pointwise conjugate
//     transpose; the variable is real so x is fixed by conjugation).
//   * Determinants: exact scalars use fraction-free Bareiss elimination over
//     the polynomial ring (all interior divisions are exact); floating
//     scalars use evaluation at integer nodes followed by Newton
//     interpolation, because Bareiss' exact-division step is meaningless in
//     rounded arithmetic.

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "psdg/poly.hpp"
#include "psdg/scalars.hpp"

namespace psdg {

/* ------------------------------------------------------------------ */
/* Mat<S>: small dense matrix                                          */
/* ------------------------------------------------------------------ */

template <class S>
class Mat {
public:
    using scalar_type = S;
    using field = scalar_field<S>;

    Mat() : rows_(0), cols_(0) {}
    Mat(int rows, int cols)
        : rows_(rows), cols_(cols),
          a_(static_cast<size_t>(rows) * static_cast<size_t>(cols), field::zero()) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("Mat: negative dimension");
    }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = field::one();
        return m;
    }
    static Mat zero(int rows, int cols) { return Mat(rows, cols); }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    S& operator()(int i, int j) { return a_[idx(i, j)]; }
    const S& operator()(int i, int j) const { return a_[idx(i, j)]; }

    bool is_zero() const {
        for (const S& v : a_)
            if (!field::is_zero(v)) return false;
        return true;
    }

    Mat operator-() const {
        Mat r = *this;
        for (S& v : r.a_) v = -v;
        return r;
    }

    Mat& operator+=(const Mat& o) {
        check_same_shape(o, "Mat::operator+=");
        for (size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        check_same_shape(o, "Mat::operator-=");
        for (size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }
    Mat& operator*=(const S& s) {
        for (S& v : a_) v *= s;
        return *this;
    }

    friend Mat operator+(Mat x, const Mat& y) { x += y; return x; }
    friend Mat operator-(Mat x, const Mat& y) { x -= y; return x; }
    friend Mat operator*(Mat x, const S& s) { x *= s; return x; }
    friend Mat operator*(const S& s, Mat x) { x *= s; return x; }

    friend Mat operator*(const Mat& x, const Mat& y) {
        if (x.cols_ != y.rows_) throw std::invalid_argument("Mat::operator*: shape mismatch");
        Mat r(x.rows_, y.cols_);
        for (int i = 0; i < x.rows_; ++i)
            for (int k = 0; k < x.cols_; ++k) {
                const S& v = x(i, k);
                if (field::is_zero(v)) continue;
                for (int j = 0; j < y.cols_; ++j) r(i, j) += v * y(k, j);
            }
        return r;
    }

    friend bool operator==(const Mat& x, const Mat& y) {
        return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.a_ == y.a_;
    }
    friend bool operator!=(const Mat& x, const Mat& y) { return !(x == y); }

    Mat adjoint() const {
        Mat r(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r(j, i) = field::conj((*this)(i, j));
        return r;
    }

    Mat transpose() const {
        Mat r(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }

    bool is_hermitian() const {
        if (rows_ != cols_) return false;
        return *this == adjoint();
    }

    S trace() const {
        if (rows_ != cols_) throw std::invalid_argument("Mat::trace: non-square");
        S t = field::zero();
        for (int i = 0; i < rows_; ++i) t += (*this)(i, i);
        return t;
    }

    Mat submatrix(const std::vector<int>& row_ids, const std::vector<int>& col_ids) const {
        Mat r(static_cast<int>(row_ids.size()), static_cast<int>(col_ids.size()));
        for (size_t i = 0; i < row_ids.size(); ++i)
            for (size_t j = 0; j < col_ids.size(); ++j)
                r(static_cast<int>(i), static_cast<int>(j)) = (*this)(row_ids[i], col_ids[j]);
        return r;
    }

private:
    size_t idx(int i, int j) const {
        if (i < 0 || i >= rows_ || j < 0 || j >= cols_)
            throw std::out_of_range("Mat: index out of range");
        return static_cast<size_t>(i) * static_cast<size_t>(cols_) + static_cast<size_t>(j);
    }
    void check_same_shape(const Mat& o, const char* who) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument(std::string(who) + ": shape mismatch");
    }

    int rows_, cols_;
    std::vector<S> a_;
};

template <class T, class S, class F>
Mat<T> map_mat(const Mat<S>& m, F&& f) {
    Mat<T> r(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r(i, j) = f(m(i, j));
    return r;
}

/* ------------------------------------------------------------------ */
/* MatrixPoly<S>                                                       */
/* ------------------------------------------------------------------ */

template <class S>
class MatrixPoly {
public:
    using scalar_type = S;
    using field = scalar_field<S>;

    MatrixPoly() : rows_(0), cols_(0) {}
    MatrixPoly(int rows, int cols) : rows_(rows), cols_(cols) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("MatrixPoly: negative dimension");
    }
    explicit MatrixPoly(std::vector<Mat<S>> coeffs) {
        if (coeffs.empty()) throw std::invalid_argument("MatrixPoly: empty coefficient list; use the (rows, cols) constructor for zero");
        rows_ = coeffs.front().rows();
        cols_ = coeffs.front().cols();
        for (const auto& m : coeffs)
            if (m.rows() != rows_ || m.cols() != cols_)
                throw std::invalid_argument("MatrixPoly: inconsistent coefficient shapes");
        c_ = std::move(coeffs);
        normalize();
    }

    static MatrixPoly constant(const Mat<S>& m) { return MatrixPoly(std::vector<Mat<S>>{m}); }
    static MatrixPoly identity(int n) { return constant(Mat<S>::identity(n)); }
    // p(x) * I_n embedding of a scalar polynomial.
    static MatrixPoly scalar(const Poly<S>& p, int n) {
        MatrixPoly r(n, n);
        for (int k = 0; k <= (p.is_zero() ? -1 : p.degree()); ++k) {
            Mat<S> m = Mat<S>::identity(n);
            m *= p.coeff(k);
            r.set_coeff(k, m);
        }
        return r;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool is_zero() const { return c_.empty(); }
    int degree() const { return c_.empty() ? kNegInfDegree : static_cast<int>(c_.size()) - 1; }

    Mat<S> coeff(int k) const {
        if (k < 0 || static_cast<size_t>(k) >= c_.size()) return Mat<S>::zero(rows_, cols_);
        return c_[static_cast<size_t>(k)];
    }
    const std::vector<Mat<S>>& coeffs() const { return c_; }

    void set_coeff(int k, const Mat<S>& m) {
        if (k < 0) throw std::invalid_argument("MatrixPoly::set_coeff: negative index");
        if (m.rows() != rows_ || m.cols() != cols_)
            throw std::invalid_argument("MatrixPoly::set_coeff: shape mismatch");
        if (static_cast<size_t>(k) >= c_.size()) c_.resize(static_cast<size_t>(k) + 1, Mat<S>::zero(rows_, cols_));
        c_[static_cast<size_t>(k)] = m;
        normalize();
    }

    // Entry (i, j) as a scalar polynomial.
    Poly<S> entry(int i, int j) const {
        std::vector<S> v;
        v.reserve(c_.size());
        for (const auto& m : c_) v.push_back(m(i, j));
        return Poly<S>(std::move(v));
    }

    MatrixPoly operator-() const {
        MatrixPoly r = *this;
        for (auto& m : r.c_) m = -m;
        return r;
    }

    MatrixPoly& operator+=(const MatrixPoly& o) {
        check_same_shape(o, "MatrixPoly::operator+=");
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Mat<S>::zero(rows_, cols_));
        for (size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
        normalize();
        return *this;
    }
    MatrixPoly& operator-=(const MatrixPoly& o) {
        check_same_shape(o, "MatrixPoly::operator-=");
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Mat<S>::zero(rows_, cols_));
        for (size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
        normalize();
        return *this;
    }

    friend MatrixPoly operator+(MatrixPoly a, const MatrixPoly& b) { a += b; return a; }
    friend MatrixPoly operator-(MatrixPoly a, const MatrixPoly& b) { a -= b; return a; }

    friend MatrixPoly operator*(const MatrixPoly& a, const MatrixPoly& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("MatrixPoly::operator*: shape mismatch");
        MatrixPoly r(a.rows_, b.cols_);
        if (a.is_zero() || b.is_zero()) return r;
        r.c_.assign(a.c_.size() + b.c_.size() - 1, Mat<S>::zero(a.rows_, b.cols_));
        for (size_t i = 0; i < a.c_.size(); ++i)
            for (size_t j = 0; j < b.c_.size(); ++j) r.c_[i + j] += a.c_[i] * b.c_[j];
        r.normalize();
        return r;
    }

    friend MatrixPoly operator*(const Poly<S>& p, const MatrixPoly& f) {
        MatrixPoly r(f.rows_, f.cols_);
        if (p.is_zero() || f.is_zero()) return r;
        r.c_.assign(static_cast<size_t>(p.degree()) + f.c_.size(), Mat<S>::zero(f.rows_, f.cols_));
        for (int i = 0; i <= p.degree(); ++i) {
            if (field::is_zero(p.coeff(i))) continue;
            for (size_t j = 0; j < f.c_.size(); ++j) r.c_[static_cast<size_t>(i) + j] += f.c_[j] * p.coeff(i);
        }
        r.normalize();
        return r;
    }
    friend MatrixPoly operator*(const MatrixPoly& f, const Poly<S>& p) { return p * f; }

    friend bool operator==(const MatrixPoly& a, const MatrixPoly& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.c_ == b.c_;
    }
    friend bool operator!=(const MatrixPoly& a, const MatrixPoly& b) { return !(a == b); }

    MatrixPoly adjoint() const {
        MatrixPoly r(cols_, rows_);
        r.c_.reserve(c_.size());
        for (const auto& m : c_) r.c_.push_back(m.adjoint());
        r.normalize();
        return r;
    }

    bool is_hermitian() const { return rows_ == cols_ && *this == adjoint(); }

    Mat<S> evaluate(const S& x) const {
        Mat<S> acc = Mat<S>::zero(rows_, cols_);
        for (size_t k = c_.size(); k-- > 0;) {
            acc *= x;
            acc += c_[k];
        }
        return acc;
    }

    Mat<std::complex<double>> evaluate_complex(std::complex<double> z) const {
        Mat<std::complex<double>> acc(rows_, cols_);
        for (size_t k = c_.size(); k-- > 0;) {
            acc *= z;
            acc += map_mat<std::complex<double>>(c_[k], [](const S& v) { return field::to_complex(v); });
        }
        return acc;
    }

    MatrixPoly affine_substitute(const S& alpha, const S& beta) const {
        Poly<S> lin(std::vector<S>{beta, alpha});
        MatrixPoly acc(rows_, cols_);
        Poly<S> power = Poly<S>::constant(field::one());
        for (size_t k = 0; k < c_.size(); ++k) {
            acc += power * MatrixPoly::constant(c_[k]);
            power *= lin;
        }
        return acc;
    }

    // x^D * F(1/x); requires D >= deg F.
    MatrixPoly reversal(int D) const {
        if (is_zero()) {
            if (D < 0) throw std::invalid_argument("MatrixPoly::reversal: D below degree");
            return *this;
        }
        if (D < degree()) throw std::invalid_argument("MatrixPoly::reversal: D below degree");
        MatrixPoly r(rows_, cols_);
        r.c_.assign(static_cast<size_t>(D) + 1, Mat<S>::zero(rows_, cols_));
        for (size_t k = 0; k < c_.size(); ++k) r.c_[static_cast<size_t>(D) - k] = c_[k];
        r.normalize();
        return r;
    }

    Poly<S> trace() const {
        if (rows_ != cols_) throw std::invalid_argument("MatrixPoly::trace: non-square");
        std::vector<S> v;
        v.reserve(c_.size());
        for (const auto& m : c_) v.push_back(m.trace());
        return Poly<S>(std::move(v));
    }

    // det F as a scalar polynomial.  Exact scalars: fraction-free Bareiss
    // over the polynomial ring.  Floating scalars: evaluation at the integer
    // nodes 0, 1, -1, 2, -2, ... followed by Newton interpolation.
    Poly<S> determinant() const {
        if (rows_ != cols_) throw std::invalid_argument("MatrixPoly::determinant: non-square");
        if (rows_ == 0) return Poly<S>::constant(field::one());
        if (is_zero()) return rows_ == 0 ? Poly<S>::constant(field::one()) : Poly<S>();
        if constexpr (field::exact) {
            return determinant_bareiss();
        } else {
            return determinant_interpolate();
        }
    }

    MatrixPoly submatrix(const std::vector<int>& row_ids, const std::vector<int>& col_ids) const {
        MatrixPoly r(static_cast<int>(row_ids.size()), static_cast<int>(col_ids.size()));
        r.c_.reserve(c_.size());
        for (const auto& m : c_) r.c_.push_back(m.submatrix(row_ids, col_ids));
        r.normalize();
        return r;
    }

private:
    void normalize() {
        while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
    }
    void check_same_shape(const MatrixPoly& o, const char* who) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument(std::string(who) + ": shape mismatch");
    }

    Poly<S> determinant_bareiss() const {
        const int n = rows_;
        std::vector<std::vector<Poly<S>>> a(static_cast<size_t>(n), std::vector<Poly<S>>(static_cast<size_t>(n)));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a[static_cast<size_t>(i)][static_cast<size_t>(j)] = entry(i, j);
        Poly<S> prev = Poly<S>::constant(field::one());
        bool negate = false;
        for (int k = 0; k < n - 1; ++k) {
            if (a[static_cast<size_t>(k)][static_cast<size_t>(k)].is_zero()) {
                int swap_row = -1;
                for (int i = k + 1; i < n; ++i)
                    if (!a[static_cast<size_t>(i)][static_cast<size_t>(k)].is_zero()) { swap_row = i; break; }
                if (swap_row < 0) return Poly<S>();  // whole column zero below the diagonal
                std::swap(a[static_cast<size_t>(k)], a[static_cast<size_t>(swap_row)]);
                negate = !negate;
            }
            for (int i = k + 1; i < n; ++i)
                for (int j = k + 1; j < n; ++j) {
                    Poly<S> num = a[static_cast<size_t>(i)][static_cast<size_t>(j)] * a[static_cast<size_t>(k)][static_cast<size_t>(k)]
                                - a[static_cast<size_t>(i)][static_cast<size_t>(k)] * a[static_cast<size_t>(k)][static_cast<size_t>(j)];
                    auto [q, r] = num.divmod(prev);
                    if (!r.is_zero())
                        throw std::runtime_error("MatrixPoly::determinant: interior division not exact");
                    a[static_cast<size_t>(i)][static_cast<size_t>(j)] = q;
                }
            prev = a[static_cast<size_t>(k)][static_cast<size_t>(k)];
        }
        Poly<S> det = a[static_cast<size_t>(n - 1)][static_cast<size_t>(n - 1)];
        return negate ? -det : det;
    }

    Poly<S> determinant_interpolate() const {
        const int n = rows_;
        const int dbound = n * degree();
        const int m = dbound + 1;  // number of nodes
        std::vector<std::complex<double>> nodes(static_cast<size_t>(m));
        for (int k = 0; k < m; ++k) {
            int v = (k + 1) / 2;
            nodes[static_cast<size_t>(k)] = std::complex<double>((k % 2 == 1) ? v : -v, 0.0);
        }
        std::vector<std::complex<double>> vals(static_cast<size_t>(m));
        for (int k = 0; k < m; ++k)
            vals[static_cast<size_t>(k)] = dense_det(evaluate_complex(nodes[static_cast<size_t>(k)]));
        // Newton divided differences, then expansion to the monomial basis.
        std::vector<std::complex<double>> dd = vals;
        for (int lvl = 1; lvl < m; ++lvl)
            for (int k = m - 1; k >= lvl; --k)
                dd[static_cast<size_t>(k)] = (dd[static_cast<size_t>(k)] - dd[static_cast<size_t>(k - 1)])
                                           / (nodes[static_cast<size_t>(k)] - nodes[static_cast<size_t>(k - lvl)]);
        std::vector<std::complex<double>> mono{std::complex<double>(0.0, 0.0)};
        mono.assign(static_cast<size_t>(m), std::complex<double>(0.0, 0.0));
        // Horner over the Newton basis: c(x) = dd[m-1]; c = c*(x - x_k) + dd[k]
        std::vector<std::complex<double>> acc(static_cast<size_t>(m), std::complex<double>(0.0, 0.0));
        acc[0] = dd[static_cast<size_t>(m - 1)];
        size_t acc_len = 1;
        for (int k = m - 2; k >= 0; --k) {
            // multiply acc by (x - nodes[k])
            for (size_t t = acc_len; t-- > 0;) {
                std::complex<double> c = acc[t];
                acc[t] = -nodes[static_cast<size_t>(k)] * c;
                acc[t + 1] += c;
            }
            ++acc_len;
            acc[0] += dd[static_cast<size_t>(k)];
        }
        std::vector<S> out;
        out.reserve(acc_len);
        for (size_t t = 0; t < acc_len; ++t) {
            if constexpr (field::complex_entries) {
                out.push_back(S(acc[t]));
            } else {
                out.push_back(S(acc[t].real()));
            }
        }
        return Poly<S>(std::move(out));
    }

    static std::complex<double> dense_det(Mat<std::complex<double>> m) {
        const int n = m.rows();
        std::complex<double> det{1.0, 0.0};
        for (int k = 0; k < n; ++k) {
            int piv = k;
            double best = std::abs(m(k, k));
            for (int i = k + 1; i < n; ++i)
                if (std::abs(m(i, k)) > best) { best = std::abs(m(i, k)); piv = i; }
            if (best == 0.0) return {0.0, 0.0};
            if (piv != k) {
                for (int j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
                det = -det;
            }
            det *= m(k, k);
            for (int i = k + 1; i < n; ++i) {
                std::complex<double> f = m(i, k) / m(k, k);
                for (int j = k; j < n; ++j) m(i, j) -= f * m(k, j);
            }
        }
        return det;
    }

    int rows_, cols_;
    std::vector<Mat<S>> c_;
};

template <class T, class S, class F>
MatrixPoly<T> map_matrix_poly(const MatrixPoly<S>& f, F&& fn) {
    MatrixPoly<T> r(f.rows(), f.cols());
    for (int k = 0; k <= (f.is_zero() ? -1 : f.degree()); ++k)
        r.set_coeff(k, map_mat<T>(f.coeff(k), fn));
    return r;
}

inline MatrixPoly<std::complex<double>> to_float(const MatrixPoly<Gaussian>& f) {
    return map_matrix_poly<std::complex<double>>(f, [](const Gaussian& g) {
        return scalar_field<Gaussian>::to_complex(g);
    });
}

/* ------------------------------------------------------------------ */
/* LaurentMatrixPoly<S>: sum_{k=lo}^{hi} A_k z^k                        */
/* ------------------------------------------------------------------ */

template <class S>
class LaurentMatrixPoly {
public:
    using scalar_type = S;
    using field = scalar_field<S>;

    LaurentMatrixPoly() : rows_(0), cols_(0), lo_(0) {}
    LaurentMatrixPoly(int rows, int cols) : rows_(rows), cols_(cols), lo_(0) {}
    LaurentMatrixPoly(int lo, std::vector<Mat<S>> coeffs) : lo_(lo) {
        if (coeffs.empty()) throw std::invalid_argument("LaurentMatrixPoly: empty coefficient list");
        rows_ = coeffs.front().rows();
        cols_ = coeffs.front().cols();
        for (const auto& m : coeffs)
            if (m.rows() != rows_ || m.cols() != cols_)
                throw std::invalid_argument("LaurentMatrixPoly: inconsistent coefficient shapes");
        c_ = std::move(coeffs);
        normalize();
    }

    static LaurentMatrixPoly from_matrix_poly(const MatrixPoly<S>& f) {
        if (f.is_zero()) return LaurentMatrixPoly(f.rows(), f.cols());
        return LaurentMatrixPoly(0, f.coeffs());
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool is_zero() const { return c_.empty(); }
    // Support [low_degree, high_degree]; invalid to call on zero.
    int low_degree() const {
        if (c_.empty()) throw std::invalid_argument("LaurentMatrixPoly::low_degree: zero element");
        return lo_;
    }
    int high_degree() const {
        if (c_.empty()) throw std::invalid_argument("LaurentMatrixPoly::high_degree: zero element");
        return lo_ + static_cast<int>(c_.size()) - 1;
    }

    Mat<S> coeff(int k) const {
        if (c_.empty() || k < lo_ || k > lo_ + static_cast<int>(c_.size()) - 1)
            return Mat<S>::zero(rows_, cols_);
        return c_[static_cast<size_t>(k - lo_)];
    }

    void set_coeff(int k, const Mat<S>& m) {
        if (m.rows() != rows_ || m.cols() != cols_) {
            if (rows_ == 0 && cols_ == 0 && c_.empty()) { rows_ = m.rows(); cols_ = m.cols(); }
            else throw std::invalid_argument("LaurentMatrixPoly::set_coeff: shape mismatch");
        }
        if (c_.empty()) {
            lo_ = k;
            c_.push_back(m);
        } else if (k < lo_) {
            c_.insert(c_.begin(), static_cast<size_t>(lo_ - k), Mat<S>::zero(rows_, cols_));
            lo_ = k;
            c_.front() = m;
        } else if (k > lo_ + static_cast<int>(c_.size()) - 1) {
            c_.resize(static_cast<size_t>(k - lo_) + 1, Mat<S>::zero(rows_, cols_));
            c_.back() = m;
        } else {
            c_[static_cast<size_t>(k - lo_)] = m;
        }
        normalize();
    }

    LaurentMatrixPoly operator-() const {
        LaurentMatrixPoly r = *this;
        for (auto& m : r.c_) m = -m;
        return r;
    }

    LaurentMatrixPoly& operator+=(const LaurentMatrixPoly& o) {
        check_same_shape(o, "LaurentMatrixPoly::operator+=");
        for (int k = 0; k < static_cast<int>(o.c_.size()); ++k) {
            int deg = o.lo_ + k;
            set_coeff(deg, coeff(deg) + o.c_[static_cast<size_t>(k)]);
        }
        return *this;
    }
    LaurentMatrixPoly& operator-=(const LaurentMatrixPoly& o) {
        *this += -o;
        return *this;
    }

    friend LaurentMatrixPoly operator+(LaurentMatrixPoly a, const LaurentMatrixPoly& b) { a += b; return a; }
    friend LaurentMatrixPoly operator-(LaurentMatrixPoly a, const LaurentMatrixPoly& b) { a -= b; return a; }

    friend LaurentMatrixPoly operator*(const LaurentMatrixPoly& a, const LaurentMatrixPoly& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("LaurentMatrixPoly::operator*: shape mismatch");
        LaurentMatrixPoly r(a.rows_, b.cols_);
        if (a.is_zero() || b.is_zero()) return r;
        r.lo_ = a.lo_ + b.lo_;
        r.c_.assign(a.c_.size() + b.c_.size() - 1, Mat<S>::zero(a.rows_, b.cols_));
        for (size_t i = 0; i < a.c_.size(); ++i)
            for (size_t j = 0; j < b.c_.size(); ++j) r.c_[i + j] += a.c_[i] * b.c_[j];
        r.normalize();
        return r;
    }

    friend bool operator==(const LaurentMatrixPoly& a, const LaurentMatrixPoly& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
        if (a.is_zero() || b.is_zero()) return a.is_zero() == b.is_zero();
        return a.lo_ == b.lo_ && a.c_ == b.c_;
    }
    friend bool operator!=(const LaurentMatrixPoly& a, const LaurentMatrixPoly& b) { return !(a == b); }

    // Adjoint with respect to the unit circle: z^* = 1/z, so
    // (sum A_k z^k)^* = sum A_k^* z^{-k}.
    LaurentMatrixPoly circle_adjoint() const {
        LaurentMatrixPoly r(cols_, rows_);
        if (is_zero()) return r;
        r.lo_ = -high_degree();
        r.c_.assign(c_.size(), Mat<S>::zero(cols_, rows_));
        for (size_t k = 0; k < c_.size(); ++k)
            r.c_[c_.size() - 1 - k] = c_[k].adjoint();
        r.normalize();
        return r;
    }

    bool is_circle_hermitian() const { return rows_ == cols_ && *this == circle_adjoint(); }

    Mat<std::complex<double>> evaluate_complex(std::complex<double> z) const {
        Mat<std::complex<double>> acc(rows_, cols_);
        if (c_.empty()) return acc;
        for (size_t k = c_.size(); k-- > 0;) {
            acc *= z;
            acc += map_mat<std::complex<double>>(c_[k], [](const S& v) { return field::to_complex(v); });
        }
        // multiply by z^{ lo_ }
        std::complex<double> zp{1.0, 0.0};
        int e = lo_;
        std::complex<double> base = e >= 0 ? z : std::complex<double>(1.0, 0.0) / z;
        for (int t = 0; t < std::abs(e); ++t) zp *= base;
        acc *= zp;
        return acc;
    }

    // Multiply by z^k.
    LaurentMatrixPoly shifted(int k) const {
        LaurentMatrixPoly r = *this;
        r.lo_ += k;
        return r;
    }

private:
    void normalize() {
        while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
        while (!c_.empty() && c_.front().is_zero()) {
            c_.erase(c_.begin());
            ++lo_;
        }
        if (c_.empty()) lo_ = 0;
    }
    void check_same_shape(const LaurentMatrixPoly& o, const char* who) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument(std::string(who) + ": shape mismatch");
    }

    int rows_, cols_, lo_;
    std::vector<Mat<S>> c_;
};

}  // namespace psdg
