#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "stabilab/errors.hpp"

namespace stabilab {

using Vec = std::vector<double>;

/// Dense row-major matrix. Sizes here are tiny (state dimension d, noise
/// dimension m), so no BLAS backing is warranted.
class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, fill) {
        if (rows < 0 || cols < 0) throw InputError("Mat: negative dimension");
    }
    Mat(int rows, int cols, std::initializer_list<double> vals) : Mat(rows, cols) {
        if (vals.size() != a_.size()) throw InputError("Mat: initializer size mismatch");
        std::copy(vals.begin(), vals.end(), a_.begin());
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    std::span<double> row(int i) { return {a_.data() + static_cast<std::size_t>(i) * cols_, static_cast<std::size_t>(cols_)}; }
    std::span<const double> row(int i) const { return {a_.data() + static_cast<std::size_t>(i) * cols_, static_cast<std::size_t>(cols_)}; }

    std::span<double> data() { return a_; }
    std::span<const double> data() const { return a_; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

inline double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

/// y = M x for a row-major matrix.
inline void mat_vec(const Mat& m, std::span<const double> x, std::span<double> y) {
    for (int i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (int j = 0; j < m.cols(); ++j) s += m(i, j) * x[j];
        y[i] = s;
    }
}

/// Solves A x = b by Gaussian elimination with partial pivoting, in place on
/// copies. Returns false when a pivot collapses (singular to working precision).
bool lu_solve(Mat a, Vec b, Vec& x);

}  // namespace stabilab
