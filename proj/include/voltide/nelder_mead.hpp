#pragma once

#include <functional>
#include <vector>

namespace voltide::opt {

struct NelderMeadOptions {
    double f_tolerance = 1e-6;  ///< stop when max spread of simplex f-values falls below this
    std::size_t max_iterations = 20000;
    std::vector<double> initial_step;  ///< per-coordinate simplex step; scalar fallback below
    double default_step = 0.25;
};

struct NelderMeadResult {
    std::vector<double> x;
    double f = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Derivative-free simplex minimization (Nelder-Mead with standard
/// reflection/expansion/contraction/shrink coefficients).
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& x0, const NelderMeadOptions& opts = {});

}  // namespace voltide::opt
