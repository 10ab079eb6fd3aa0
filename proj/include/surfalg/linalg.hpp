#pragma once

#include "scalar.hpp"

#include <vector>

namespace surfalg {

using Matrix = std::vector<std::vector<Scalar>>;

inline Matrix zeroMatrix(size_t rows, size_t cols, std::int64_t p) {
    return Matrix(rows, std::vector<Scalar>(cols, Scalar(0, p)));
}

// Reduced row echelon form in place; returns pivot columns.
inline std::vector<size_t> rowReduce(Matrix& a) {
    std::vector<size_t> pivots;
    if (a.empty()) return pivots;
    size_t rows = a.size(), cols = a[0].size(), r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t piv = r;
        while (piv < rows && a[piv][c].isZero()) ++piv;
        if (piv == rows) continue;
        std::swap(a[piv], a[r]);
        Scalar inv = a[r][c].inverse();
        for (size_t j = c; j < cols; ++j) a[r][j] *= inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c].isZero()) continue;
            Scalar f = a[i][c];
            for (size_t j = c; j < cols; ++j)
                if (!a[r][j].isZero()) a[i][j] -= f * a[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

inline size_t rank(Matrix a) { return rowReduce(a).size(); }

inline Scalar determinant(Matrix a, std::int64_t p) {
    size_t n = a.size();
    Scalar det(1, p);
    for (size_t c = 0; c < n; ++c) {
        size_t piv = c;
        while (piv < n && a[piv][c].isZero()) ++piv;
        if (piv == n) return Scalar(0, p);
        if (piv != c) {
            std::swap(a[piv], a[c]);
            det = -det;
        }
        det *= a[c][c];
        Scalar inv = a[c][c].inverse();
        for (size_t i = c + 1; i < n; ++i) {
            if (a[i][c].isZero()) continue;
            Scalar f = a[i][c] * inv;
            for (size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
        }
    }
    return det;
}

// Basis of the right kernel {x : a x = 0}.
inline std::vector<std::vector<Scalar>> kernel(Matrix a, size_t cols, std::int64_t p) {
    auto pivots = rowReduce(a);
    std::vector<bool> isPivot(cols, false);
    for (size_t c : pivots) isPivot[c] = true;
    std::vector<std::vector<Scalar>> out;
    for (size_t free = 0; free < cols; ++free) {
        if (isPivot[free]) continue;
        std::vector<Scalar> x(cols, Scalar(0, p));
        x[free] = Scalar(1, p);
        for (size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = -a[r][free];
        out.push_back(x);
    }
    return out;
}

inline Matrix transpose(const Matrix& a) {
    if (a.empty()) return a;
    Matrix t(a[0].size(), std::vector<Scalar>(a.size()));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a[0].size(); ++j) t[j][i] = a[i][j];
    return t;
}

inline Matrix multiply(const Matrix& a, const Matrix& b, std::int64_t p) {
    size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
    Matrix c = zeroMatrix(n, m, p);
    for (size_t i = 0; i < n; ++i)
        for (size_t l = 0; l < k; ++l) {
            if (a[i][l].isZero()) continue;
            for (size_t j = 0; j < m; ++j)
                if (!b[l][j].isZero()) c[i][j] += a[i][l] * b[l][j];
        }
    return c;
}

}  // namespace surfalg
