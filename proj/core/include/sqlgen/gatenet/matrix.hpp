#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace sqlgen::gatenet {

class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }

    void fill(double v);
    bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// a * b
Matrix matmul(const Matrix& a, const Matrix& b);
/// a * b^T
Matrix matmul_nt(const Matrix& a, const Matrix& b);
/// a^T * b
Matrix matmul_tn(const Matrix& a, const Matrix& b);

/// a += scale * b
void add_inplace(Matrix& a, const Matrix& b, double scale = 1.0);
/// Adds a 1 x cols bias to every row.
void add_row_bias(Matrix& a, const Matrix& bias);
/// Column sums as a 1 x cols matrix, accumulated into out.
void accumulate_column_sums(const Matrix& a, Matrix& out);

/// Row-wise softmax. Entries equal to -infinity get probability 0.
Matrix softmax_rows(const Matrix& logits);
/// Gradient w.r.t. the logits given the softmax output and the gradient w.r.t. it.
Matrix softmax_rows_backward(const Matrix& probs, const Matrix& grad_probs);

Matrix relu(const Matrix& x);
/// grad * (pre > 0)
Matrix relu_backward(const Matrix& pre, const Matrix& grad);

struct LayerNormCache {
    Matrix normalized;
    std::vector<double> inv_std;
};

inline constexpr double kLayerNormEpsilon = 1e-6;

/// Per-row normalization with 1 x cols gain and bias.
Matrix layer_norm(const Matrix& x, const Matrix& gain, const Matrix& bias,
                  LayerNormCache* cache = nullptr);
/// Returns dx and accumulates dgain/dbias.
Matrix layer_norm_backward(const Matrix& dy, const LayerNormCache& cache, const Matrix& gain,
                           Matrix& dgain, Matrix& dbias);

double sigmoid(double z);

}  // namespace sqlgen::gatenet
