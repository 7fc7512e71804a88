#pragma once
#include <array>
#include <cmath>
#include <complex>

#include "errors.hpp"

namespace islm {

using Cplx = std::complex<double>;
using CVec4 = std::array<Cplx, 4>;
using Mat4 = std::array<std::array<double, 4>, 4>;
using CMat4 = std::array<std::array<Cplx, 4>, 4>;

inline CMat4 to_complex(const Mat4& m) {
    CMat4 out{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out[i][j] = m[i][j];
    return out;
}

/// Result of a dense 4×4 solve: solution vector and the pivot-ratio
/// condition estimate (|largest pivot| / |smallest pivot|).
struct SolveResult {
    CVec4 x;
    double cond;
};

/// Solves M x = b by Gaussian elimination with partial pivoting.
/// Throws SingularSystemError on an exactly zero pivot; condition screening
/// against a threshold is left to callers.
inline SolveResult solve4(CMat4 M, CVec4 b) {
    double pivot_max = 0.0, pivot_min = 0.0;
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int row = col + 1; row < 4; ++row)
            if (std::abs(M[row][col]) > std::abs(M[pivot][col])) pivot = row;
        if (std::abs(M[pivot][col]) == 0.0)
            throw SingularSystemError("zero pivot in 4x4 solve");
        if (pivot != col) {
            std::swap(M[pivot], M[col]);
            std::swap(b[pivot], b[col]);
        }
        const double mag = std::abs(M[col][col]);
        pivot_max = (col == 0) ? mag : std::max(pivot_max, mag);
        pivot_min = (col == 0) ? mag : std::min(pivot_min, mag);
        for (int row = col + 1; row < 4; ++row) {
            const Cplx f = M[row][col] / M[col][col];
            M[row][col] = 0.0;
            for (int j = col + 1; j < 4; ++j) M[row][j] -= f * M[col][j];
            b[row] -= f * b[col];
        }
    }
    CVec4 x{};
    for (int row = 3; row >= 0; --row) {
        Cplx acc = b[row];
        for (int j = row + 1; j < 4; ++j) acc -= M[row][j] * x[j];
        x[row] = acc / M[row][row];
    }
    return {x, pivot_max / pivot_min};
}

/// Determinant of a complex 4×4 matrix via LU with partial pivoting.
inline Cplx det4(CMat4 M) {
    Cplx det = 1.0;
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int row = col + 1; row < 4; ++row)
            if (std::abs(M[row][col]) > std::abs(M[pivot][col])) pivot = row;
        if (std::abs(M[pivot][col]) == 0.0) return 0.0;
        if (pivot != col) {
            std::swap(M[pivot], M[col]);
            det = -det;
        }
        det *= M[col][col];
        for (int row = col + 1; row < 4; ++row) {
            const Cplx f = M[row][col] / M[col][col];
            for (int j = col; j < 4; ++j) M[row][j] -= f * M[col][j];
        }
    }
    return det;
}

inline CVec4 mat_vec(const CMat4& M, const CVec4& x) {
    CVec4 y{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) y[i] += M[i][j] * x[j];
    return y;
}

inline double norm(const CVec4& x) {
    double s = 0.0;
    for (const auto& c : x) s += std::norm(c);
    return std::sqrt(s);
}

} // namespace islm
