#pragma once

// Smooth Hermitian test states S compatible with the summand charges.

#include "vortex/matrix_field.hpp"
#include "vortex/system_config.hpp"

#include <cstdint>

namespace vortex {

// Diagonal entries are real combinations of the first spherical harmonics;
// entry (p, q) with charge m >= 0 is a random polynomial section of O(m) in
// the unitary frame (its conjugate fills (q, p)). Entries are scaled so each
// one is bounded by roughly `amplitude`.
MatrixField random_smooth_state(const SplitSystemConfig& cfg, const SphereGrid& g, std::uint64_t seed,
                                double amplitude = 0.5);

} // namespace vortex
