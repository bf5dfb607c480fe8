#include "courtcast/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace courtcast::ad {

namespace {

double evaluate(const std::function<Var(Tape&, const std::vector<Var>&)>& f,
                const std::vector<Tensor>& inputs) {
    Tape tape;
    std::vector<Var> vars;
    vars.reserve(inputs.size());
    for (const Tensor& t : inputs) vars.push_back(tape.leaf(t));
    const Var out = f(tape, vars);
    const Tensor& value = tape.value(out);
    if (value.size() != 1) throw ShapeError("grad_check: function must return a scalar");
    if (!value.all_finite()) throw Error("grad_check: non-finite loss during perturbation");
    return value.at(0);
}

}  // namespace

double grad_check(const std::function<Var(Tape&, const std::vector<Var>&)>& f,
                  std::vector<Tensor> inputs, double h) {
    if (h <= 0.0) throw Error("grad_check: step must be positive");

    Tape tape;
    std::vector<Var> vars;
    vars.reserve(inputs.size());
    for (const Tensor& t : inputs) vars.push_back(tape.leaf(t));
    const Var out = f(tape, vars);
    if (tape.value(out).size() != 1)
        throw ShapeError("grad_check: function must return a scalar");
    tape.backward(out);

    double worst = 0.0;
    for (size_t k = 0; k < inputs.size(); ++k) {
        const Tensor& analytic = tape.grad(vars[k]);
        for (Eigen::Index i = 0; i < inputs[k].size(); ++i) {
            const double original = inputs[k].at(i);
            inputs[k].at(i) = original + h;
            const double up = evaluate(f, inputs);
            inputs[k].at(i) = original - h;
            const double down = evaluate(f, inputs);
            inputs[k].at(i) = original;

            const double fd = (up - down) / (2.0 * h);
            const double ad = analytic.at(i);
            const double rel =
                std::abs(ad - fd) / std::max(1e-8, std::abs(ad) + std::abs(fd));
            worst = std::max(worst, rel);
        }
    }
    return worst;
}

}  // namespace courtcast::ad
