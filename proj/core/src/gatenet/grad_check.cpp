#include "sqlgen/gatenet/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sqlgen::gatenet {

namespace {

Matrix& find_tensor(ModelParams& p, const std::string& name) {
    Matrix* found = nullptr;
    p.for_each([&](const char* n, Matrix& m) {
        if (name == n) found = &m;
    });
    if (found == nullptr) throw std::invalid_argument("unknown parameter '" + name + "'");
    return *found;
}

double central_difference(GateModel& probe, Matrix& tensor, std::size_t index,
                          std::span<const int> src, std::span<const int> tgt, double eps) {
    double& entry = tensor.values()[index];
    const double saved = entry;
    entry = saved + eps;
    const double up = probe.forward(src, tgt).loss;
    entry = saved - eps;
    const double down = probe.forward(src, tgt).loss;
    entry = saved;
    if (!std::isfinite(up) || !std::isfinite(down)) {
        throw std::runtime_error("grad_check: non-finite loss while perturbing an entry");
    }
    return (up - down) / (2.0 * eps);
}

}  // namespace

double numeric_derivative(const GateModel& model, std::span<const int> src,
                          std::span<const int> tgt, const std::string& parameter,
                          std::size_t index, double epsilon) {
    GateModel probe = model;
    Matrix& tensor = find_tensor(probe.params(), parameter);
    if (index >= tensor.size()) throw std::out_of_range("grad_check: index past tensor end");
    return central_difference(probe, tensor, index, src, tgt, epsilon);
}

GradCheckResult grad_check(const GateModel& model, std::span<const int> src,
                           std::span<const int> tgt, double epsilon) {
    ModelParams grads = zero_params(model.config());
    const double loss = model.loss_and_gradient(src, tgt, grads);
    if (!std::isfinite(loss)) throw std::runtime_error("grad_check: loss is not finite");

    GateModel probe = model;
    std::vector<Matrix*> tensors;
    probe.params().for_each([&](const char*, Matrix& m) { tensors.push_back(&m); });

    GradCheckResult result;
    result.max_relative_error = -1.0;
    std::size_t t = 0;
    grads.for_each([&](const char* name, const Matrix& g) {
        Matrix& tensor = *tensors[t++];
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double analytic = g.values()[i];
            if (!std::isfinite(analytic)) {
                throw std::runtime_error(std::string("grad_check: non-finite gradient in ") + name);
            }
            const double numeric = central_difference(probe, tensor, i, src, tgt, epsilon);
            const double denom =
                std::max({std::abs(analytic), std::abs(numeric), kGradCheckFloor});
            const double rel = std::abs(analytic - numeric) / denom;
            ++result.checked;
            if (rel > result.max_relative_error) {
                result.max_relative_error = rel;
                result.worst_parameter = name;
                result.worst_index = i;
                result.worst_analytic = analytic;
                result.worst_numeric = numeric;
            }
        }
    });
    result.max_relative_error = std::max(result.max_relative_error, 0.0);
    return result;
}

}  // namespace sqlgen::gatenet
