#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nsq/types.hpp"

namespace nsq {

struct SmoothFunction {
  std::string name;
  std::function<cplx(cplx)> f;
};

// Ten compactly concentrated bumps in |ζ| ≤ 0.7, widths 0.025 to 0.1.
std::vector<SmoothFunction> smooth_suite();

// Three Gaussian bumps with seeded centres, widths and complex amplitudes.
SmoothFunction smooth_random(std::uint64_t seed);

}  // namespace nsq
