#pragma once

#include <torwave/rational.hpp>

#include <stdexcept>

namespace torwave {

using IntVec = std::vector<Int>;
using IntMat = std::vector<IntVec>;  // row-major
using RatMat = std::vector<RatVec>;

inline Int gcd_vec(const IntVec& v) {
    Int g = 0;
    for (const auto& x : v) g = gcd(g, x);
    return g;
}

inline Int dot_int(const IntVec& a, const IntVec& b) {
    Int s = 0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
    return s;
}

// v / gcd(v), keeping orientation. Throws on the zero vector.
inline IntVec make_primitive(IntVec v) {
    Int g = gcd_vec(v);
    if (g == 0) throw std::invalid_argument("zero vector has no primitive form");
    for (auto& x : v) x /= g;
    return v;
}

// Smallest integer vector parallel to a rational one, same orientation.
inline IntVec primitive_from_rational(const RatVec& v) {
    Int L = 1;
    for (const auto& x : v) L = lcm(L, rat_den(x));
    IntVec w(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) w[j] = rat_num(v[j] * L);
    return make_primitive(std::move(w));
}

// Unimodular M (det +1) whose last column is the primitive vector n, so the
// coordinate change x = M w maps the axis direction e_d to n.
inline IntMat unimodular_with_last_column(const IntVec& n) {
    int d = static_cast<int>(n.size());
    IntVec v = n;
    IntMat M(d, IntVec(d, 0));
    for (int i = 0; i < d; ++i) M[i][i] = 1;
    // column op helpers that preserve det = +1 while we reduce v to e_d
    auto shear = [&](int i, const Int& q) {  // v_d -= q v_i  =>  col_i += q col_d
        v[d - 1] -= q * v[i];
        for (int r = 0; r < d; ++r) M[r][i] += q * M[r][d - 1];
    };
    auto rotate = [&](int i) {  // (v_i, v_d) <- (v_d, -v_i), cols likewise
        std::swap(v[i], v[d - 1]);
        v[d - 1] = -v[d - 1];
        for (int r = 0; r < d; ++r) {
            std::swap(M[r][i], M[r][d - 1]);
            M[r][d - 1] = -M[r][d - 1];
        }
    };
    for (int i = 0; i < d - 1; ++i) {
        while (v[i] != 0) {
            shear(i, floor_div(v[d - 1], v[i]));
            rotate(i);
        }
    }
    if (v[d - 1] == -1) {
        rotate(0);
        rotate(0);
    }
    if (v[d - 1] != 1) throw std::invalid_argument("last-column extension needs a primitive vector");
    return M;
}

// Reduced row echelon form in place; returns pivot columns (rank = count).
inline std::vector<int> rref(RatMat& A) {
    std::vector<int> pivots;
    if (A.empty()) return pivots;
    int rows = static_cast<int>(A.size()), cols = static_cast<int>(A[0].size());
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int p = -1;
        for (int i = r; i < rows; ++i)
            if (A[i][c] != 0) {
                p = i;
                break;
            }
        if (p < 0) continue;
        std::swap(A[r], A[p]);
        Rat inv = A[r][c];
        for (int j = 0; j < cols; ++j) A[r][j] /= inv;
        for (int i = 0; i < rows; ++i) {
            if (i == r || A[i][c] == 0) continue;
            Rat f = A[i][c];
            for (int j = 0; j < cols; ++j) A[i][j] -= f * A[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    A.resize(static_cast<std::size_t>(r));  // remaining rows are zero
    return pivots;
}

inline int rat_rank(RatMat A) { return static_cast<int>(rref(A).size()); }

// Basis of {x in Z^d : C x = 0} for an integer matrix C; columns of the
// unimodular U that zero out the corresponding columns of C U. The result is
// saturated (a basis of the full kernel lattice, not a finite-index subgroup).
inline IntMat integer_kernel(const IntMat& C) {
    if (C.empty()) throw std::invalid_argument("integer_kernel needs at least one row");
    int rows = static_cast<int>(C.size()), d = static_cast<int>(C[0].size());
    IntMat A = C;
    IntMat U(d, IntVec(d, 0));
    for (int i = 0; i < d; ++i) U[i][i] = 1;
    auto col_shear = [&](int dst, int src, const Int& q) {  // col_dst -= q col_src
        for (int r = 0; r < rows; ++r) A[r][dst] -= q * A[r][src];
        for (int r = 0; r < d; ++r) U[r][dst] -= q * U[r][src];
    };
    auto col_swap = [&](int a, int b) {
        for (int r = 0; r < rows; ++r) std::swap(A[r][a], A[r][b]);
        for (int r = 0; r < d; ++r) std::swap(U[r][a], U[r][b]);
    };
    int lead = 0;
    for (int r = 0; r < rows && lead < d; ++r) {
        // make columns lead..d-1 of row r all zero except column `lead`
        while (true) {
            int nz = -1;
            for (int c = lead + 1; c < d; ++c)
                if (A[r][c] != 0) {
                    nz = c;
                    break;
                }
            if (nz < 0) break;
            if (A[r][lead] == 0) {
                col_swap(lead, nz);
                continue;
            }
            Int q = floor_div(A[r][nz], A[r][lead]);
            col_shear(nz, lead, q);
            if (A[r][nz] != 0) col_swap(lead, nz);
        }
        if (A[r][lead] != 0) ++lead;
    }
    IntMat kernel;
    for (int c = lead; c < d; ++c) {
        IntVec col(d);
        for (int r = 0; r < d; ++r) col[r] = U[r][c];
        kernel.push_back(std::move(col));
    }
    return kernel;
}

// Hermite-style lattice basis of the row span of A (rational rows allowed):
// returns a full-rank list of rational rows generating the same lattice.
inline RatMat lattice_row_basis(RatMat A) {
    if (A.empty()) return A;
    int cols = static_cast<int>(A[0].size());
    // scale to integers
    Int L = 1;
    for (const auto& row : A)
        for (const auto& x : row) L = lcm(L, rat_den(x));
    IntMat B;
    for (const auto& row : A) {
        IntVec r(cols);
        for (int j = 0; j < cols; ++j) r[j] = rat_num(row[j] * L);
        B.push_back(std::move(r));
    }
    // row HNF by integer Gaussian elimination
    int r = 0;
    int rows = static_cast<int>(B.size());
    for (int c = 0; c < cols && r < rows; ++c) {
        while (true) {
            int p = -1;
            for (int i = r; i < rows; ++i)
                if (B[i][c] != 0) {
                    p = i;
                    break;
                }
            if (p < 0) break;
            std::swap(B[r], B[p]);
            bool clean = true;
            for (int i = r + 1; i < rows; ++i) {
                if (B[i][c] == 0) continue;
                Int q = floor_div(B[i][c], B[r][c]);
                for (int j = 0; j < cols; ++j) B[i][j] -= q * B[r][j];
                if (B[i][c] != 0) clean = false;
            }
            if (clean) break;
        }
        bool nz = false;
        for (int i = r; i < rows && !nz; ++i)
            if (B[i][c] != 0) nz = true;
        if (nz) ++r;
    }
    RatMat out;
    for (int i = 0; i < r; ++i) {
        RatVec row(cols);
        bool nonzero = false;
        for (int j = 0; j < cols; ++j) {
            row[j] = Rat(B[i][j], L);
            if (row[j] != 0) nonzero = true;
        }
        if (nonzero) out.push_back(std::move(row));
    }
    return out;
}

// Canonical identifier of the Q-span of the rows (rref serialization).
inline std::string subspace_signature(RatMat A) {
    rref(A);
    std::string s;
    for (const auto& row : A) {
        for (const auto& x : row) {
            s += format_rational(x);
            s += ',';
        }
        s += ';';
    }
    return s;
}

// All primitive integer directions with max_j |n_j| <= N, one per +-pair
// (first nonzero entry positive), sorted lexicographically.
inline std::vector<IntVec> enumerate_primitive_directions(int d, int N) {
    std::vector<IntVec> out;
    IntVec n(d, -N);
    while (true) {
        bool zero = true;
        for (const auto& x : n)
            if (x != 0) zero = false;
        if (!zero) {
            int first = 0;
            while (n[first] == 0) ++first;
            if (n[first] > 0 && gcd_vec(n) == 1) out.push_back(n);
        }
        int j = d - 1;
        while (j >= 0 && n[j] == N) n[j--] = -N;
        if (j < 0) break;
        ++n[j];
    }
    return out;
}

}  // namespace torwave
