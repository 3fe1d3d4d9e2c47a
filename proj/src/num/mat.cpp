#include "covdiff/num/mat.hpp"

#include <cmath>
#include <stdexcept>

namespace covdiff::num {

Mat Mat::identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

Mat Mat::from_rows(std::size_t r, std::size_t c, std::initializer_list<double> v) {
    Mat m(r, c);
    if (v.size() != r * c) throw std::invalid_argument("from_rows: got " + std::to_string(v.size()) + " values for " + m.shape_str());
    std::copy(v.begin(), v.end(), m.data.begin());
    return m;
}

std::string Mat::shape_str() const {
    return "[" + std::to_string(rows) + "x" + std::to_string(cols) + "]";
}

void check_same_shape(const Mat& a, const Mat& b, const char* op) {
    if (a.rows != b.rows || a.cols != b.cols)
        throw std::invalid_argument(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " + b.shape_str());
}

bool all_finite(const Mat& m) {
    for (double v : m.data)
        if (!std::isfinite(v)) return false;
    return true;
}

void require_finite(const Mat& m, const std::string& what) {
    if (!all_finite(m)) throw std::invalid_argument(what + ": non-finite entry");
}

namespace {

// Eight-lane dot product with a fixed combine order: lane j sums indices
// congruent to j mod 8, lanes fold pairwise, remainder last. The order is
// set by the code alone, so results are identical run to run.
inline double dot8(const double* a, const double* b, std::size_t n) {
    double acc[8] = {};
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        for (std::size_t j = 0; j < 8; ++j) acc[j] += a[i + j] * b[i + j];
    double tail = 0.0;
    for (; i < n; ++i) tail += a[i] * b[i];
    return (((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]))) + tail;
}

}  // namespace

Mat matmul_xwt(const Mat& x, const Mat& w) {
    if (x.cols != w.cols)
        throw std::invalid_argument("matmul_xwt: inner dims " + x.shape_str() + " vs weight " + w.shape_str());
    Mat y(x.rows, w.rows);
    const std::size_t in = x.cols, out = w.rows;
    const double* wd = w.data.data();
    const long long rows = static_cast<long long>(x.rows);
    // Four batch rows per weight pass; rows of y are independent.
#pragma omp parallel for schedule(static)
    for (long long b0 = 0; b0 < rows; b0 += 4) {
        const long long bend = std::min<long long>(b0 + 4, rows);
        for (std::size_t o = 0; o < out; ++o) {
            const double* wr = wd + o * in;
            for (long long b = b0; b < bend; ++b)
                y.data[b * out + o] = dot8(x.data.data() + b * in, wr, in);
        }
    }
    return y;
}

Mat matmul_xw(const Mat& x, const Mat& w) {
    if (x.cols != w.rows)
        throw std::invalid_argument("matmul_xw: inner dims " + x.shape_str() + " vs " + w.shape_str());
    Mat y(x.rows, w.cols);
    const std::size_t out = x.cols, in = w.cols;
#pragma omp parallel for schedule(static)
    for (long long b = 0; b < static_cast<long long>(x.rows); ++b) {
        double* yr = y.data.data() + b * in;
        const double* xr = x.data.data() + b * out;
        for (std::size_t o = 0; o < out; ++o) {
            const double xo = xr[o];
            const double* wr = w.data.data() + o * in;
            for (std::size_t i = 0; i < in; ++i) yr[i] += xo * wr[i];
        }
    }
    return y;
}

void accumulate_dw(const Mat& dy, const Mat& x, Mat& dw) {
    if (dy.rows != x.rows || dw.rows != dy.cols || dw.cols != x.cols)
        throw std::invalid_argument("accumulate_dw: shapes dy " + dy.shape_str() + " x " + x.shape_str() + " dw " + dw.shape_str());
    const std::size_t in = x.cols, out = dy.cols;
    // Rows of dw are independent; the batch sum per row stays in b order.
#pragma omp parallel for schedule(static)
    for (long long o = 0; o < static_cast<long long>(out); ++o) {
        double* dwr = dw.data.data() + o * in;
        for (std::size_t b = 0; b < dy.rows; ++b) {
            const double g = dy.data[b * out + o];
            if (g == 0.0) continue;
            const double* xr = x.data.data() + b * in;
            for (std::size_t i = 0; i < in; ++i) dwr[i] += g * xr[i];
        }
    }
}

Mat transpose(const Mat& m) {
    Mat t(m.cols, m.rows);
    for (std::size_t r = 0; r < m.rows; ++r)
        for (std::size_t c = 0; c < m.cols; ++c) t.at(c, r) = m.at(r, c);
    return t;
}

void add_row_inplace(Mat& m, std::span<const double> v) {
    if (v.size() != m.cols)
        throw std::invalid_argument("add_row_inplace: vector size " + std::to_string(v.size()) + " vs " + m.shape_str());
    for (std::size_t r = 0; r < m.rows; ++r) {
        double* mr = m.data.data() + r * m.cols;
        for (std::size_t c = 0; c < m.cols; ++c) mr[c] += v[c];
    }
}

}  // namespace covdiff::num
