#include "normstance/pulearn/model.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace normstance::pulearn {

namespace {

using MatMap = Eigen::Map<const Eigen::MatrixXd>;
using VecMap = Eigen::Map<const Eigen::VectorXd>;

}  // namespace

ScoreModel::ScoreModel(ModelKind kind, std::size_t input_dim, std::size_t hidden_size, std::size_t hidden_layers)
    : kind_(kind),
      input_dim_(input_dim),
      hidden_size_(kind == ModelKind::Linear ? 0 : hidden_size),
      hidden_layers_(kind == ModelKind::Linear ? 0 : hidden_layers) {
    if (input_dim == 0) throw std::invalid_argument("model input dimension must be positive");
    if (kind == ModelKind::Mlp && (hidden_size == 0 || hidden_layers == 0)) {
        throw std::invalid_argument("MLP needs at least one hidden layer of positive width");
    }
    const std::size_t last = hidden_layers_ == 0 ? input_dim_ : hidden_size_;
    params_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(output_offset() + last + 1));
}

ScoreModel ScoreModel::linear(std::size_t input_dim) { return ScoreModel(ModelKind::Linear, input_dim, 0, 0); }

ScoreModel ScoreModel::with_shape(ModelKind kind, std::size_t input_dim, std::size_t hidden_size,
                                  std::size_t hidden_layers) {
    return ScoreModel(kind, input_dim, hidden_size, hidden_layers);
}

ScoreModel ScoreModel::mlp(std::size_t input_dim, std::size_t hidden_size, std::size_t hidden_layers,
                           std::uint64_t seed) {
    ScoreModel m(ModelKind::Mlp, input_dim, hidden_size, hidden_layers);
    std::mt19937_64 rng(seed);
    auto fill = [&](std::size_t offset, std::size_t count, std::size_t fan_in) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (std::size_t i = 0; i < count; ++i) m.params_[static_cast<Eigen::Index>(offset + i)] = dist(rng);
    };
    for (std::size_t l = 0; l < hidden_layers; ++l) {
        const std::size_t in = m.layer_input(l);
        fill(m.layer_offset(l), hidden_size * in + hidden_size, in);
    }
    fill(m.output_offset(), hidden_size + 1, hidden_size);
    return m;
}

std::size_t ScoreModel::layer_offset(std::size_t layer) const {
    std::size_t offset = 0;
    for (std::size_t l = 0; l < layer; ++l) offset += hidden_size_ * layer_input(l) + hidden_size_;
    return offset;
}

ScoreModel::Forward ScoreModel::forward(const Eigen::MatrixXd& inputs) const {
    if (static_cast<std::size_t>(inputs.cols()) != input_dim_) {
        throw std::invalid_argument("input dimension " + std::to_string(inputs.cols()) + " does not match model " +
                                    std::to_string(input_dim_));
    }
    Forward fwd;
    fwd.pre.reserve(hidden_layers_);
    fwd.post.reserve(hidden_layers_);
    const double* p = params_.data();
    const Eigen::MatrixXd* activ = &inputs;
    for (std::size_t l = 0; l < hidden_layers_; ++l) {
        const auto in = static_cast<Eigen::Index>(layer_input(l));
        const auto h = static_cast<Eigen::Index>(hidden_size_);
        const std::size_t off = layer_offset(l);
        MatMap weight(p + off, h, in);
        VecMap bias(p + off + static_cast<std::size_t>(h * in), h);
        Eigen::MatrixXd z = (*activ) * weight.transpose();
        z.rowwise() += bias.transpose();
        fwd.pre.push_back(z);
        fwd.post.push_back(z.cwiseMax(0.0));
        activ = &fwd.post.back();
    }
    const auto last = static_cast<Eigen::Index>(hidden_layers_ == 0 ? input_dim_ : hidden_size_);
    const std::size_t off = output_offset();
    VecMap w(p + off, last);
    const double b = p[off + static_cast<std::size_t>(last)];
    fwd.scores = ((*activ) * w).array() + b;
    return fwd;
}

Eigen::VectorXd ScoreModel::scores(const Eigen::MatrixXd& inputs) const { return forward(inputs).scores; }

double ScoreModel::score(std::span<const double> x) const {
    if (x.size() != input_dim_) {
        throw std::invalid_argument("embedding dimension " + std::to_string(x.size()) + " does not match model " +
                                    std::to_string(input_dim_));
    }
    if (kind_ == ModelKind::Linear) {
        double s = params_[static_cast<Eigen::Index>(input_dim_)];
        for (std::size_t j = 0; j < input_dim_; ++j) s += params_[static_cast<Eigen::Index>(j)] * x[j];
        return s;
    }
    Eigen::MatrixXd row(1, static_cast<Eigen::Index>(input_dim_));
    for (std::size_t j = 0; j < input_dim_; ++j) row(0, static_cast<Eigen::Index>(j)) = x[j];
    return forward(row).scores[0];
}

double ScoreModel::score(std::span<const float> x) const {
    std::vector<double> tmp(x.begin(), x.end());
    return score(std::span<const double>(tmp));
}

Eigen::VectorXd ScoreModel::gradient(const Eigen::MatrixXd& inputs, const Forward& fwd,
                                     const Eigen::VectorXd& dscores) const {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(params_.size());
    const double* p = params_.data();

    const Eigen::MatrixXd& last_activ = hidden_layers_ == 0 ? inputs : fwd.post.back();
    const auto last = last_activ.cols();
    const std::size_t out_off = output_offset();
    grad.segment(static_cast<Eigen::Index>(out_off), last) = last_activ.transpose() * dscores;
    grad[static_cast<Eigen::Index>(out_off) + last] = dscores.sum();
    if (hidden_layers_ == 0) return grad;

    // d score / d post-activation of the last hidden layer
    VecMap w_out(p + out_off, last);
    Eigen::MatrixXd upstream = dscores * w_out.transpose();
    for (std::size_t li = hidden_layers_; li-- > 0;) {
        const auto in = static_cast<Eigen::Index>(layer_input(li));
        const auto h = static_cast<Eigen::Index>(hidden_size_);
        const std::size_t off = layer_offset(li);
        Eigen::MatrixXd dz = upstream.array() * (fwd.pre[li].array() > 0.0).cast<double>();
        const Eigen::MatrixXd& below = li == 0 ? inputs : fwd.post[li - 1];
        Eigen::Map<Eigen::MatrixXd> gw(grad.data() + off, h, in);
        gw = dz.transpose() * below;
        grad.segment(static_cast<Eigen::Index>(off) + h * in, h) = dz.colwise().sum().transpose();
        if (li > 0) {
            MatMap weight(p + off, h, in);
            upstream = dz * weight;
        }
    }
    return grad;
}

}  // namespace normstance::pulearn
