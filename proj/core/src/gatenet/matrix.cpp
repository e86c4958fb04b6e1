#include "sqlgen/gatenet/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sqlgen::gatenet {

namespace {

std::string shape(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require(bool ok, const char* what, const Matrix& a, const Matrix& b) {
    if (!ok) throw ShapeError(std::string(what) + ": " + shape(a) + " vs " + shape(b));
}

}  // namespace

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

Matrix matmul(const Matrix& a, const Matrix& b) {
    require(a.cols() == b.rows(), "matmul", a, b);
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto o = out.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            auto br = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) o[j] += aik * br[j];
        }
    }
    return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    require(a.cols() == b.cols(), "matmul_nt", a, b);
    Matrix out(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto ar = a.row(i);
        for (std::size_t j = 0; j < b.rows(); ++j) {
            auto br = b.row(j);
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += ar[k] * br[k];
            out(i, j) = acc;
        }
    }
    return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    require(a.rows() == b.rows(), "matmul_tn", a, b);
    Matrix out(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        auto ar = a.row(k);
        auto br = b.row(k);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = ar[i];
            if (aki == 0.0) continue;
            auto o = out.row(i);
            for (std::size_t j = 0; j < b.cols(); ++j) o[j] += aki * br[j];
        }
    }
    return out;
}

void add_inplace(Matrix& a, const Matrix& b, double scale) {
    require(a.same_shape(b), "add_inplace", a, b);
    auto av = a.values();
    auto bv = b.values();
    for (std::size_t i = 0; i < av.size(); ++i) av[i] += scale * bv[i];
}

void add_row_bias(Matrix& a, const Matrix& bias) {
    require(bias.rows() == 1 && bias.cols() == a.cols(), "add_row_bias", a, bias);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto r = a.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) r[j] += bias(0, j);
    }
}

void accumulate_column_sums(const Matrix& a, Matrix& out) {
    require(out.rows() == 1 && out.cols() == a.cols(), "accumulate_column_sums", a, out);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto r = a.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) out(0, j) += r[j];
    }
}

Matrix softmax_rows(const Matrix& logits) {
    Matrix out(logits.rows(), logits.cols());
    for (std::size_t i = 0; i < logits.rows(); ++i) {
        auto in = logits.row(i);
        auto o = out.row(i);
        const double mx = *std::max_element(in.begin(), in.end());
        if (mx == -std::numeric_limits<double>::infinity()) {
            throw ShapeError("softmax_rows: row " + std::to_string(i) + " is entirely masked");
        }
        double total = 0.0;
        for (std::size_t j = 0; j < in.size(); ++j) {
            o[j] = std::exp(in[j] - mx);
            total += o[j];
        }
        for (double& v : o) v /= total;
    }
    return out;
}

Matrix softmax_rows_backward(const Matrix& probs, const Matrix& grad_probs) {
    require(probs.same_shape(grad_probs), "softmax_rows_backward", probs, grad_probs);
    Matrix out(probs.rows(), probs.cols());
    for (std::size_t i = 0; i < probs.rows(); ++i) {
        auto p = probs.row(i);
        auto g = grad_probs.row(i);
        double dot = 0.0;
        for (std::size_t j = 0; j < p.size(); ++j) dot += p[j] * g[j];
        auto o = out.row(i);
        for (std::size_t j = 0; j < p.size(); ++j) o[j] = p[j] * (g[j] - dot);
    }
    return out;
}

Matrix relu(const Matrix& x) {
    Matrix out = x;
    for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
    return out;
}

Matrix relu_backward(const Matrix& pre, const Matrix& grad) {
    require(pre.same_shape(grad), "relu_backward", pre, grad);
    Matrix out = grad;
    auto p = pre.values();
    auto o = out.values();
    for (std::size_t i = 0; i < o.size(); ++i) {
        if (!(p[i] > 0.0)) o[i] = 0.0;
    }
    return out;
}

Matrix layer_norm(const Matrix& x, const Matrix& gain, const Matrix& bias, LayerNormCache* cache) {
    require(gain.rows() == 1 && gain.cols() == x.cols(), "layer_norm gain", x, gain);
    require(bias.same_shape(gain), "layer_norm bias", gain, bias);
    const std::size_t n = x.cols();
    Matrix normalized(x.rows(), n);
    Matrix out(x.rows(), n);
    std::vector<double> inv_std(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        auto r = x.row(i);
        double mean = 0.0;
        for (double v : r) mean += v;
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (double v : r) var += (v - mean) * (v - mean);
        var /= static_cast<double>(n);
        inv_std[i] = 1.0 / std::sqrt(var + kLayerNormEpsilon);
        for (std::size_t j = 0; j < n; ++j) {
            normalized(i, j) = (r[j] - mean) * inv_std[i];
            out(i, j) = normalized(i, j) * gain(0, j) + bias(0, j);
        }
    }
    if (cache != nullptr) {
        cache->normalized = std::move(normalized);
        cache->inv_std = std::move(inv_std);
    }
    return out;
}

Matrix layer_norm_backward(const Matrix& dy, const LayerNormCache& cache, const Matrix& gain,
                           Matrix& dgain, Matrix& dbias) {
    const Matrix& xhat = cache.normalized;
    require(dy.same_shape(xhat), "layer_norm_backward", dy, xhat);
    const std::size_t n = dy.cols();
    Matrix dx(dy.rows(), n);
    std::vector<double> dxhat(n);
    for (std::size_t i = 0; i < dy.rows(); ++i) {
        double mean_d = 0.0;
        double mean_dx = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            dgain(0, j) += dy(i, j) * xhat(i, j);
            dbias(0, j) += dy(i, j);
            dxhat[j] = dy(i, j) * gain(0, j);
            mean_d += dxhat[j];
            mean_dx += dxhat[j] * xhat(i, j);
        }
        mean_d /= static_cast<double>(n);
        mean_dx /= static_cast<double>(n);
        for (std::size_t j = 0; j < n; ++j) {
            dx(i, j) = cache.inv_std[i] * (dxhat[j] - mean_d - xhat(i, j) * mean_dx);
        }
    }
    return dx;
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace sqlgen::gatenet
