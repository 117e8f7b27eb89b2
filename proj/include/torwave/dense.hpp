#pragma once

// Small dense double-precision matrices (row-major), used for the orthonormal
// changes of coordinates that accompany geodesic reduction and the flows at
// infinity.  Exact rational arithmetic stops being available once square roots
// of periods appear; these helpers are the floating-point side of that line.

#include <cmath>
#include <cstddef>
#include <vector>

namespace torwave {

using DVec = std::vector<double>;
using DMat = std::vector<DVec>;  // row-major

inline DMat dmat_identity(int d) {
    DMat m(d, DVec(d, 0.0));
    for (int i = 0; i < d; ++i) m[i][i] = 1.0;
    return m;
}

inline DMat dmat_mul(const DMat& a, const DMat& b) {
    int n = static_cast<int>(a.size());
    int k = static_cast<int>(b.size());
    int p = k ? static_cast<int>(b[0].size()) : 0;
    DMat c(n, DVec(p, 0.0));
    for (int i = 0; i < n; ++i)
        for (int l = 0; l < k; ++l) {
            double ail = a[i][l];
            if (ail == 0.0) continue;
            for (int j = 0; j < p; ++j) c[i][j] += ail * b[l][j];
        }
    return c;
}

inline DVec dmat_apply(const DMat& m, const DVec& v) {
    DVec out(m.size(), 0.0);
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
    return out;
}

inline DMat dmat_transpose(const DMat& m) {
    if (m.empty()) return {};
    DMat t(m[0].size(), DVec(m.size(), 0.0));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
    return t;
}

// max |F^T F - I|, the orthonormality defect.
inline double orthonormality_error(const DMat& f) {
    int d = static_cast<int>(f.size());
    double worst = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double s = 0.0;
            for (int r = 0; r < d; ++r) s += f[r][i] * f[r][j];
            worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
        }
    return worst;
}

}  // namespace torwave
