#pragma once

#include <string>
#include <vector>

#include "courtcast/rng.hpp"
#include "courtcast/tensor.hpp"

namespace courtcast::ad {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;
};

// A trainable tensor together with its gradient accumulator and Adam state.
// m/v are lazily sized on the first step; step counts per parameter so a
// freshly added parameter starts its own bias-correction schedule.
struct Parameter {
    std::string name;
    Tensor value;
    Tensor grad;
    Tensor m;
    Tensor v;
    long step = 0;

    Parameter() = default;
    Parameter(std::string parameter_name, Tensor initial)
        : name(std::move(parameter_name)),
          value(std::move(initial)),
          grad(Tensor(value.shape())),
          m(Tensor(value.shape())),
          v(Tensor(value.shape())) {}

    void zero_grad() { grad.array().setZero(); }
};

// One Adam update over every parameter. Weight decay is the classic coupled
// form: decay * value is added to the gradient before the moment updates.
void adam_step(std::vector<Parameter>& params, const AdamConfig& config);

// Fills t with samples from U(-limit, limit), limit = sqrt(6 / (fan_in + fan_out)).
void xavier_uniform(Tensor& t, int fan_in, int fan_out, Rng& rng);

}  // namespace courtcast::ad
