#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace normstance::pulearn {

enum class ModelKind : std::uint8_t { Linear, Mlp };

// Real-valued scorer f(x). All parameters live in one flat vector so that
// optimizers and finite-difference checks can treat the model uniformly.
//
// Linear layout: [w (D), b]
// MLP layout, per hidden layer l: [W_l (H x in, column-major), b_l (H)],
// then the output layer [w_out (H), b_out]. Hidden units are ReLU.
class ScoreModel {
public:
    static ScoreModel linear(std::size_t input_dim);

    // Weights and biases ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
    static ScoreModel mlp(std::size_t input_dim, std::size_t hidden_size, std::size_t hidden_layers,
                          std::uint64_t seed);

    // Shape only, zero parameters (used when loading from disk).
    static ScoreModel with_shape(ModelKind kind, std::size_t input_dim, std::size_t hidden_size,
                                 std::size_t hidden_layers);

    ModelKind kind() const noexcept { return kind_; }
    std::size_t input_dim() const noexcept { return input_dim_; }
    std::size_t hidden_size() const noexcept { return hidden_size_; }
    std::size_t hidden_layers() const noexcept { return hidden_layers_; }
    std::size_t parameter_count() const noexcept { return static_cast<std::size_t>(params_.size()); }

    Eigen::VectorXd& parameters() noexcept { return params_; }
    const Eigen::VectorXd& parameters() const noexcept { return params_; }

    // Activations kept for the backward pass.
    struct Forward {
        std::vector<Eigen::MatrixXd> pre;   // pre-activation per hidden layer (B x H)
        std::vector<Eigen::MatrixXd> post;  // post-activation per hidden layer (B x H)
        Eigen::VectorXd scores;             // B
    };

    // `inputs` holds one example per row.
    Forward forward(const Eigen::MatrixXd& inputs) const;
    Eigen::VectorXd scores(const Eigen::MatrixXd& inputs) const;
    double score(std::span<const float> x) const;
    double score(std::span<const double> x) const;

    // Gradient of sum_i dscores[i] * f(x_i) w.r.t. the flat parameters. ReLU
    // uses derivative 0 at 0.
    Eigen::VectorXd gradient(const Eigen::MatrixXd& inputs, const Forward& fwd,
                             const Eigen::VectorXd& dscores) const;

private:
    ScoreModel(ModelKind kind, std::size_t input_dim, std::size_t hidden_size, std::size_t hidden_layers);

    std::size_t layer_input(std::size_t layer) const { return layer == 0 ? input_dim_ : hidden_size_; }
    std::size_t layer_offset(std::size_t layer) const;
    std::size_t output_offset() const { return layer_offset(hidden_layers_); }

    ModelKind kind_;
    std::size_t input_dim_;
    std::size_t hidden_size_;
    std::size_t hidden_layers_;
    Eigen::VectorXd params_;
};

}  // namespace normstance::pulearn
