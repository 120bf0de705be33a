#include "stabilab/linalg.hpp"

#include <cmath>
#include <utility>

namespace stabilab {

bool lu_solve(Mat a, Vec b, Vec& x) {
    const int n = a.rows();
    if (n != a.cols() || static_cast<int>(b.size()) != n)
        throw InputError("lu_solve: shape mismatch");

    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::fabs(a(col, col));
        for (int r = col + 1; r < n; ++r) {
            double v = std::fabs(a(r, col));
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (!(best > 0.0) || !std::isfinite(best)) return false;
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
            std::swap(b[piv], b[col]);
        }
        for (int r = col + 1; r < n; ++r) {
            double f = a(r, col) / a(col, col);
            if (f == 0.0) continue;
            for (int j = col; j < n; ++j) a(r, j) -= f * a(col, j);
            b[r] -= f * b[col];
        }
    }

    x.assign(n, 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
        if (!std::isfinite(x[i])) return false;
    }
    return true;
}

}  // namespace stabilab
