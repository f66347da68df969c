#include "nsq/smooth_suite.hpp"

#include <cmath>
#include <random>

namespace nsq {

namespace {

std::function<cplx(cplx)> bump(cplx c, double w, cplx a0, cplx a1, cplx a2) {
  return [=](cplx z) { return std::exp(-std::norm(z - c) / (w * w)) * (a0 + a1 * z + a2 * std::conj(z)); };
}

}  // namespace

std::vector<SmoothFunction> smooth_suite() {
  return {
      {"bump-0.025", bump({-0.2, 0.35}, 0.025, 1.0, 0.5, 0.0)},
      {"bump-0.03", bump({0.1, 0.2}, 0.03, 1.0, 0.5, 0.0)},
      {"bump-0.035", bump({-0.3, 0.1}, 0.035, kI, 0.0, 0.3)},
      {"bump-0.04", bump({0.2, -0.4}, 0.04, 1.0, 0.0, 0.0)},
      {"bump-0.05", bump({0.0, 0.0}, 0.05, 0.5, 1.0, 0.0)},
      {"bump-0.06", bump({-0.2, -0.3}, 0.06, {1.0, -1.0}, 0.0, 0.0)},
      {"bump-0.07", bump({0.4, 0.3}, 0.07, 1.0, 0.0, kI)},
      {"bump-0.08", bump({-0.5, 0.2}, 0.08, 1.0, 0.2, 0.2)},
      {"bump-0.09", bump({0.3, 0.0}, 0.09, {0.3, 0.7}, 0.0, 0.0)},
      {"bump-0.1", bump({0.0, -0.55}, 0.1, 1.0, -0.5, 0.0)},
  };
}

SmoothFunction smooth_random(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> rad(0.0, 0.5), ang(0.0, 2.0 * kPi), wid(0.12, 0.25);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::function<cplx(cplx)>> parts;
  for (int k = 0; k < 3; ++k) {
    cplx c = std::polar(rad(rng), ang(rng));
    double w = wid(rng);
    cplx a0(g(rng), g(rng)), a1(g(rng), g(rng));
    parts.push_back(bump(c, w, a0, 0.3 * a1, 0.0));
  }
  return {"random-" + std::to_string(seed), [parts](cplx z) {
            cplx s = 0.0;
            for (const auto& p : parts) s += p(z);
            return s;
          }};
}

}  // namespace nsq
