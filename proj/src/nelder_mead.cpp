#include "voltide/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "voltide/errors.hpp"

namespace voltide::opt {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& x0, const NelderMeadOptions& opts) {
    const std::size_t n = x0.size();
    if (n == 0) throw NumericError("nelder_mead: empty start point");

    std::vector<std::vector<double>> pts(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) {
        const double step =
            i < opts.initial_step.size() ? opts.initial_step[i] : opts.default_step;
        pts[i + 1][i] += step;
    }
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(pts[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);

    NelderMeadResult res;
    for (res.iterations = 0; res.iterations < opts.max_iterations; ++res.iterations) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[n - 1];

        if (std::abs(fv[worst] - fv[best]) < opts.f_tolerance) {
            res.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t k = 0; k <= n; ++k) {
            if (k == worst) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[k][j];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        for (std::size_t j = 0; j < n; ++j) xr[j] = centroid[j] + (centroid[j] - pts[worst][j]);
        const double fr = f(xr);

        if (fr < fv[best]) {
            for (std::size_t j = 0; j < n; ++j)
                xe[j] = centroid[j] + 2.0 * (centroid[j] - pts[worst][j]);
            const double fe = f(xe);
            if (fe < fr) {
                pts[worst] = xe;
                fv[worst] = fe;
            } else {
                pts[worst] = xr;
                fv[worst] = fr;
            }
        } else if (fr < fv[second_worst]) {
            pts[worst] = xr;
            fv[worst] = fr;
        } else {
            const bool outside = fr < fv[worst];
            const std::vector<double>& ref = outside ? xr : pts[worst];
            for (std::size_t j = 0; j < n; ++j) xc[j] = centroid[j] + 0.5 * (ref[j] - centroid[j]);
            const double fc = f(xc);
            if (fc < (outside ? fr : fv[worst])) {
                pts[worst] = xc;
                fv[worst] = fc;
            } else {
                for (std::size_t k = 0; k <= n; ++k) {
                    if (k == best) continue;
                    for (std::size_t j = 0; j < n; ++j)
                        pts[k][j] = pts[best][j] + 0.5 * (pts[k][j] - pts[best][j]);
                    fv[k] = f(pts[k]);
                }
            }
        }
    }

    const auto it = std::min_element(fv.begin(), fv.end());
    res.f = *it;
    res.x = pts[static_cast<std::size_t>(it - fv.begin())];
    return res;
}

}  // namespace voltide::opt
