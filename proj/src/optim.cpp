#include "courtcast/optim.hpp"

#include <cmath>

namespace courtcast::ad {

void adam_step(std::vector<Parameter>& params, const AdamConfig& config) {
    for (Parameter& p : params) {
        if (!p.grad.same_shape(p.value))
            throw ShapeError("adam_step: gradient shape differs from value for " + p.name);
        p.step += 1;
        const Eigen::ArrayXd g = p.grad.array() + config.weight_decay * p.value.array();
        p.m.array() = config.beta1 * p.m.array() + (1.0 - config.beta1) * g;
        p.v.array() = config.beta2 * p.v.array() + (1.0 - config.beta2) * g.square();
        const double correction1 = 1.0 - std::pow(config.beta1, static_cast<double>(p.step));
        const double correction2 = 1.0 - std::pow(config.beta2, static_cast<double>(p.step));
        p.value.array() -= config.lr * (p.m.array() / correction1) /
                           ((p.v.array() / correction2).sqrt() + config.eps);
    }
}

void xavier_uniform(Tensor& t, int fan_in, int fan_out, Rng& rng) {
    if (fan_in <= 0 || fan_out <= 0) throw Error("xavier_uniform: fans must be positive");
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (Eigen::Index i = 0; i < t.size(); ++i) t.at(i) = rng.uniform(-limit, limit);
}

}  // namespace courtcast::ad
