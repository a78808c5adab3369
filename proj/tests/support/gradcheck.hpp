#pragma once
// Finite-difference checks of the training objective.

#include <cstdint>
#include <functional>

#include <Eigen/Dense>

namespace normstance::testkit {

// Central differences of f at theta with step h.
Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& theta, double h);

struct GradientTrial {
    bool smooth = false;     // false when the point sits within `margin` of a kink
    double rel_error = 0.0;  // |g - g_fd| / max(|g|, |g_fd|)
};

// Random 2-layer MLP batch objective (PN double-hinge risk, EO penalty with
// both groups present, L2) at a random point drawn from `seed`.
GradientTrial mlp_gradient_trial(std::uint64_t seed, double margin = 1e-3);

}  // namespace normstance::testkit
