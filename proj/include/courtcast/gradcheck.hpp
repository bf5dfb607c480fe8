#pragma once

#include <functional>
#include <vector>

#include "courtcast/tape.hpp"

namespace courtcast::ad {

// Compares reverse-mode gradients against central finite differences.
//
// f receives a fresh tape plus one leaf Var per input tensor and must return
// a scalar Var. For every input element x the checker evaluates
// (f(x+h) - f(x-h)) / 2h on throwaway tapes and reports the largest
// relative error  |g_ad - g_fd| / max(1e-8, |g_ad| + |g_fd|)  over all
// elements of all inputs.
double grad_check(const std::function<Var(Tape&, const std::vector<Var>&)>& f,
                  std::vector<Tensor> inputs, double h = 1e-6);

}  // namespace courtcast::ad
