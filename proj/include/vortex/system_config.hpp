#pragma once

// A coherent system on the sphere given concretely: a sum of line bundles
// O(a_1) + ... + O(a_r) and k polynomial sections spanning V.

#include "vortex/matrix_field.hpp"
#include "vortex/stability.hpp"

#include <optional>
#include <vector>

namespace vortex {

using Polynomial = std::vector<cd>; // ascending coefficients
using SectionVector = std::vector<Polynomial>; // one polynomial per summand

struct SplitSystemConfig {
    std::vector<int> degrees;
    std::vector<SectionVector> sections;

    int rank() const { return static_cast<int>(degrees.size()); }
    int k() const { return static_cast<int>(sections.size()); }
    long degree() const;
    SystemType type() const;
    int charge(int p, int q) const { return degrees[p] - degrees[q]; }

    // Shape checks: 1 <= r <= kMaxRank, k <= kMaxSections, component i of
    // every section has at most degrees[i] + 1 coefficients. Throws
    // ValidationError. Independence is checked numerically by the model.
    void validate() const;

    // The summand decomposition when every section lives in one summand.
    std::optional<DecomposableSystem> decomposition() const;
};

// Section coefficients in the north unitary frame at every cell (r x k per
// cell), evaluated on the chart covering the cell and blended on the overlap.
MatrixField evaluate_sections(const SplitSystemConfig& cfg, const SphereGrid& g);

// Value of the unitary-frame coefficient of component polynomial p of a
// degree-a summand at a cell, using the north or south chart.
cd section_coefficient_north(const Polynomial& p, int a, cd z);
cd section_coefficient_south(const Polynomial& p, int a, cd w);

} // namespace vortex
