#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "sqlgen/gatenet/gate.hpp"
#include "sqlgen/random.hpp"

namespace sqlgen::gatenet {
namespace {

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng, double scale = 1.0) {
    Matrix m(r, c);
    for (auto& v : m.values()) v = scale * rng.normal();
    return m;
}

GateParams random_gate(std::size_t d, std::size_t vocab, Rng& rng) {
    GateParams p = GateParams::zeros(d, vocab);
    GateParams::visit(p, [&](const char*, Matrix& m) {
        for (auto& v : m.values()) v = 0.7 * rng.normal();
    });
    return p;
}

// Straight loops over the definitions, no shared helpers with the library.
std::vector<std::vector<double>> naive_product(const Matrix& a, const Matrix& b) {
    std::vector<std::vector<double>> out(a.rows(), std::vector<double>(b.cols(), 0.0));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j)
            for (std::size_t k = 0; k < a.cols(); ++k) out[i][j] += a(i, k) * b(k, j);
    return out;
}

Matrix to_matrix(const std::vector<std::vector<double>>& v) {
    Matrix m(v.size(), v.empty() ? 0 : v[0].size());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = v[i][j];
    return m;
}

void expect_near(const Matrix& a, const Matrix& b, double tol) {
    ASSERT_EQ(a.rows(), b.rows());
    ASSERT_EQ(a.cols(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) EXPECT_NEAR(a(i, j), b(i, j), tol) << i << "," << j;
}

TEST(GateMath, CrossAttentionMatchesLoops) {
    Rng rng(3);
    const std::size_t d = 5, src = 6, tgt = 4;
    const GateParams p = random_gate(d, 9, rng);
    const Matrix h_enc = random_matrix(src, d, rng);
    const Matrix h_dec = random_matrix(tgt, d, rng);
    const auto att = cross_attention(h_enc, h_dec, p);

    const Matrix q = to_matrix(naive_product(h_dec, p.w_q));
    const Matrix kv = to_matrix(naive_product(h_enc, p.w_kv));
    Matrix weights(tgt, src);
    for (std::size_t t = 0; t < tgt; ++t) {
        std::vector<double> s(src);
        for (std::size_t j = 0; j < src; ++j)
            for (std::size_t k = 0; k < d; ++k) s[j] += q(t, k) * kv(j, k);
        for (std::size_t j = 0; j < src; ++j) EXPECT_NEAR(att.score(t, j), s[j], 1e-12);
        double z = 0.0;
        for (double x : s) z += std::exp(x);
        for (std::size_t j = 0; j < src; ++j) weights(t, j) = std::exp(s[j]) / z;
    }
    expect_near(att.weights, weights, 1e-12);
    const auto mixed = naive_product(weights, kv);
    auto ff = naive_product(to_matrix(mixed), p.ff_w);
    for (std::size_t t = 0; t < tgt; ++t)
        for (std::size_t k = 0; k < d; ++k) ff[t][k] = std::max(0.0, ff[t][k] + p.ff_b(0, k));
    expect_near(att.context, to_matrix(ff), 1e-12);
}

TEST(GateMath, GateMatchesLoops) {
    Rng rng(4);
    const std::size_t d = 6, tgt = 3;
    const GateParams p = random_gate(d, 5, rng);
    const Matrix h_dec = random_matrix(tgt, d, rng);
    const Matrix ctx = random_matrix(tgt, d, rng);
    const auto g = extraction_gate(h_dec, ctx, p);
    auto norm = [&](const Matrix& x, std::size_t t, const Matrix& gain, const Matrix& bias) {
        double mean = 0.0, var = 0.0;
        for (std::size_t k = 0; k < d; ++k) mean += x(t, k) / d;
        for (std::size_t k = 0; k < d; ++k) var += (x(t, k) - mean) * (x(t, k) - mean) / d;
        std::vector<double> y(d);
        for (std::size_t k = 0; k < d; ++k)
            y[k] = gain(0, k) * (x(t, k) - mean) / std::sqrt(var + kLayerNormEpsilon) + bias(0, k);
        return y;
    };
    ASSERT_EQ(g.p_ext.size(), tgt);
    for (std::size_t t = 0; t < tgt; ++t) {
        const auto a = norm(h_dec, t, p.ln_dec_gain, p.ln_dec_bias);
        const auto b = norm(ctx, t, p.ln_ctx_gain, p.ln_ctx_bias);
        double z = p.gate_b(0, 0);
        for (std::size_t k = 0; k < d; ++k) z += a[k] * p.gate_w(k, 0) + b[k] * p.gate_w(d + k, 0);
        EXPECT_NEAR(g.p_ext[t], 1.0 / (1.0 + std::exp(-z)), 1e-12);
        EXPECT_GT(g.p_ext[t], 0.0);
        EXPECT_LT(g.p_ext[t], 1.0);
    }
}

TEST(GateMath, GateBiasLimits) {
    Rng rng(5);
    GateParams p = random_gate(4, 5, rng);
    const Matrix h = random_matrix(2, 4, rng), c = random_matrix(2, 4, rng);
    p.gate_w.fill(0.0);
    p.gate_b.fill(0.0);
    for (double v : extraction_gate(h, c, p).p_ext) EXPECT_EQ(v, 0.5);
    p.gate_b.fill(20.0);
    for (double v : extraction_gate(h, c, p).p_ext) EXPECT_GT(v, 1.0 - 1e-8);
    p.gate_b.fill(-800.0);
    for (double v : extraction_gate(h, c, p).p_ext) {
        EXPECT_TRUE(std::isfinite(v));
        EXPECT_GE(v, 0.0);
    }
}

TEST(GateMath, SingleSourcePositionGetsAllAttention) {
    Rng rng(6);
    const GateParams p = random_gate(4, 5, rng);
    const auto att = cross_attention(random_matrix(1, 4, rng, 10.0), random_matrix(3, 4, rng, 10.0), p);
    for (std::size_t t = 0; t < 3; ++t) EXPECT_EQ(att.weights(t, 0), 1.0);
}

TEST(GateMath, IdenticalEncoderStatesGiveUniformAttention) {
    Rng rng(7);
    const GateParams p = random_gate(4, 5, rng);
    const Matrix one = random_matrix(1, 4, rng);
    Matrix h_enc(5, 4);
    for (std::size_t s = 0; s < 5; ++s)
        for (std::size_t k = 0; k < 4; ++k) h_enc(s, k) = one(0, k);
    const auto att = cross_attention(h_enc, random_matrix(2, 4, rng), p);
    for (std::size_t t = 0; t < 2; ++t)
        for (std::size_t s = 0; s < 5; ++s) EXPECT_NEAR(att.weights(t, s), 0.2, 1e-15);
}

TEST(GateMath, CopyScatterSumsRepeatedTokens) {
    Matrix w(2, 4);
    const double rows[2][4] = {{0.1, 0.2, 0.3, 0.4}, {0.25, 0.25, 0.25, 0.25}};
    for (std::size_t t = 0; t < 2; ++t)
        for (std::size_t s = 0; s < 4; ++s) w(t, s) = rows[t][s];
    const std::vector<int> ids = {3, 1, 3, 0};
    const Matrix o = copy_distribution(w, ids, 5);
    EXPECT_DOUBLE_EQ(o(0, 3), 0.1 + 0.3);
    EXPECT_DOUBLE_EQ(o(0, 1), 0.2);
    EXPECT_DOUBLE_EQ(o(0, 0), 0.4);
    EXPECT_EQ(o(0, 2), 0.0);
    EXPECT_EQ(o(0, 4), 0.0);
    EXPECT_DOUBLE_EQ(o(1, 3), 0.5);

    const std::vector<int> bad = {3, 1, 5, 0};
    EXPECT_THROW(copy_distribution(w, bad, 5), std::out_of_range);
    const std::vector<int> shorter = {3, 1};
    EXPECT_THROW(copy_distribution(w, shorter, 5), ShapeError);
}

TEST(GateMath, MergeIsConvexCombination) {
    Rng rng(8);
    const GateParams p = random_gate(4, 6, rng);
    const Matrix o_gen = generation_distribution(random_matrix(3, 4, rng), p);
    Matrix o_ext(3, 6);
    for (std::size_t t = 0; t < 3; ++t) o_ext(t, t) = 1.0;

    const std::vector<double> zero(3, 0.0), one(3, 1.0), quarter(3, 0.25);
    expect_near(merge(o_gen, o_ext, zero), o_gen, 0.0);
    expect_near(merge(o_gen, o_ext, one), o_ext, 0.0);
    const Matrix m = merge(o_gen, o_ext, quarter);
    for (std::size_t t = 0; t < 3; ++t) {
        double sum = 0.0;
        for (std::size_t w = 0; w < 6; ++w) {
            EXPECT_NEAR(m(t, w), 0.75 * o_gen(t, w) + 0.25 * o_ext(t, w), 1e-15);
            sum += m(t, w);
        }
        EXPECT_NEAR(sum, 1.0, 1e-12);
    }
    const std::vector<double> two(2, 0.5);
    EXPECT_THROW(merge(o_gen, o_ext, two), ShapeError);
}

TEST(GateMath, ShapeErrors) {
    Rng rng(9);
    const GateParams p = random_gate(4, 5, rng);
    EXPECT_THROW(cross_attention(random_matrix(3, 5, rng), random_matrix(2, 4, rng), p), ShapeError);
    EXPECT_THROW(matmul(Matrix(2, 3), Matrix(2, 3)), ShapeError);
    EXPECT_THROW(extraction_gate(Matrix(2, 4), Matrix(3, 4), p), ShapeError);
}

TEST(MatrixOps, SoftmaxBackwardMatchesFiniteDifference) {
    Rng rng(10);
    const Matrix logits = random_matrix(2, 5, rng);
    const Matrix g = random_matrix(2, 5, rng);
    const Matrix analytic = softmax_rows_backward(softmax_rows(logits), g);
    const double eps = 1e-6;
    for (std::size_t r = 0; r < 2; ++r) {
        for (std::size_t c = 0; c < 5; ++c) {
            Matrix up = logits, down = logits;
            up(r, c) += eps;
            down(r, c) -= eps;
            const Matrix pu = softmax_rows(up), pd = softmax_rows(down);
            double num = 0.0;
            for (std::size_t j = 0; j < 5; ++j) num += g(r, j) * (pu(r, j) - pd(r, j)) / (2 * eps);
            EXPECT_NEAR(analytic(r, c), num, 1e-8);
        }
    }
}

TEST(MatrixOps, SoftmaxMaskedEntriesAndLargeLogits) {
    Matrix x(1, 3);
    x(0, 0) = 1000.0;
    x(0, 1) = -std::numeric_limits<double>::infinity();
    x(0, 2) = 1000.0;
    const Matrix p = softmax_rows(x);
    EXPECT_EQ(p(0, 1), 0.0);
    EXPECT_DOUBLE_EQ(p(0, 0), 0.5);
    Matrix all(1, 2, -std::numeric_limits<double>::infinity());
    EXPECT_THROW(softmax_rows(all), ShapeError);
}

TEST(MatrixOps, SigmoidIsStable) {
    EXPECT_EQ(sigmoid(0.0), 0.5);
    EXPECT_TRUE(std::isfinite(sigmoid(-1000.0)));
    EXPECT_EQ(sigmoid(1000.0), 1.0);
    EXPECT_NEAR(sigmoid(2.0) + sigmoid(-2.0), 1.0, 1e-15);
}

}  // namespace
}  // namespace sqlgen::gatenet
