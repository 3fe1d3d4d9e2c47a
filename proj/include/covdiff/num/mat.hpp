// Dense row-major matrix of doubles plus the handful of products the policy
// networks need. Kernels are written axpy-style: every accumulator receives
// its contributions in a fixed serial order, so results are bitwise
// reproducible for any OpenMP thread count (parallel loops only ever split
// independent output rows).
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace covdiff::num {

struct Mat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // row-major, rows*cols

    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    static Mat zeros(std::size_t r, std::size_t c) { return Mat(r, c); }
    static Mat identity(std::size_t n);
    static Mat from_rows(std::size_t r, std::size_t c, std::initializer_list<double> v);

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

    std::size_t size() const { return data.size(); }
    void fill(double v) { std::fill(data.begin(), data.end(), v); }

    std::string shape_str() const;
};

// Throws std::invalid_argument naming both shapes when a product or sum
// does not conform.
void check_same_shape(const Mat& a, const Mat& b, const char* op);

bool all_finite(const Mat& m);
// Throws std::invalid_argument naming `what` if m holds a NaN or Inf.
void require_finite(const Mat& m, const std::string& what);

// y = x * W^T, x: [B x in], W: [out x in], y: [B x out].
Mat matmul_xwt(const Mat& x, const Mat& w);

// y = x * W, x: [B x out], W: [out x in], y: [B x in].
Mat matmul_xw(const Mat& x, const Mat& w);

// dW = dy^T * x, dy: [B x out], x: [B x in], accumulated into dw [out x in].
void accumulate_dw(const Mat& dy, const Mat& x, Mat& dw);

Mat transpose(const Mat& m);

void add_row_inplace(Mat& m, std::span<const double> v);  // broadcast add per row

}  // namespace covdiff::num
