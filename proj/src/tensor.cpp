#include "tweetpolarity/tensor.hpp"

#include <algorithm>
#include <numeric>

namespace tp {

double grad_check(const std::function<double()>& f, std::span<double> param, std::span<const double> analytic,
                  const GradCheckOptions& opts) {
  if (param.size() != analytic.size())
    throw ShapeError("grad_check: param has " + std::to_string(param.size()) + " entries, gradient has " +
                     std::to_string(analytic.size()));
  std::vector<std::size_t> coords(param.size());
  std::iota(coords.begin(), coords.end(), std::size_t{0});
  if (opts.max_coords != 0 && coords.size() > opts.max_coords) {
    Rng rng(opts.seed);
    shuffle(coords, rng);
    coords.resize(opts.max_coords);
  }
  double worst = 0.0;
  for (const std::size_t i : coords) {
    const double saved = param[i];
    param[i] = saved + opts.h;
    const double up = f();
    param[i] = saved - opts.h;
    const double down = f();
    param[i] = saved;
    const double fd = (up - down) / (2.0 * opts.h);
    const double err = std::abs(fd - analytic[i]) / std::max(1.0, std::abs(fd) + std::abs(analytic[i]));
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace tp
