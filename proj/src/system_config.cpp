#include "vortex/system_config.hpp"

#include <cmath>

namespace vortex {

long SplitSystemConfig::degree() const {
    long d = 0;
    for (int a : degrees) d += a;
    return d;
}

SystemType SplitSystemConfig::type() const { return {degree(), rank(), k()}; }

void SplitSystemConfig::validate() const {
    if (degrees.empty()) throw ValidationError("config needs at least one summand");
    if (rank() > kMaxRank) throw ValidationError("rank above " + std::to_string(kMaxRank) + " is not supported");
    if (k() > kMaxSections) throw ValidationError("more than " + std::to_string(kMaxSections) + " sections");
    for (std::size_t s = 0; s < sections.size(); ++s) {
        if (static_cast<int>(sections[s].size()) != rank())
            throw ValidationError("section " + std::to_string(s) + " must have one polynomial per summand");
        bool nonzero = false;
        for (int i = 0; i < rank(); ++i) {
            const auto& p = sections[s][i];
            int top = -1;
            for (int j = 0; j < static_cast<int>(p.size()); ++j)
                if (p[j] != cd(0)) top = j;
            if (top > degrees[i])
                throw ValidationError("section " + std::to_string(s) + " component " + std::to_string(i) +
                                      " has degree above " + std::to_string(degrees[i]));
            nonzero = nonzero || top >= 0;
        }
        if (!nonzero) throw ValidationError("section " + std::to_string(s) + " is zero");
    }
}

std::optional<DecomposableSystem> SplitSystemConfig::decomposition() const {
    std::vector<Summand> out;
    for (int a : degrees) out.push_back({a, 0});
    for (const auto& s : sections) {
        int support = -1;
        for (int i = 0; i < rank(); ++i) {
            bool nz = false;
            for (cd c : s[i]) nz = nz || c != cd(0);
            if (!nz) continue;
            if (support >= 0) return std::nullopt;
            support = i;
        }
        if (support < 0) return std::nullopt;
        out[support].sections += 1;
    }
    try {
        return DecomposableSystem(out);
    } catch (const ValidationError&) {
        return std::nullopt;
    }
}

cd section_coefficient_north(const Polynomial& p, int a, cd z) {
    cd acc = 0;
    for (int j = static_cast<int>(p.size()) - 1; j >= 0; --j) acc = acc * z + p[j];
    return acc * std::pow(1.0 + std::norm(z), -0.5 * a);
}

cd section_coefficient_south(const Polynomial& p, int a, cd w) {
    // p(1/w) = w^{-a} sum_j c_j w^{a-j}; the unitary frames differ by (|w|/w)^a
    cd acc = 0;
    for (int j = 0; j < static_cast<int>(p.size()); ++j) acc = acc * w + p[j];
    // acc = sum_j c_j w^{n-1-j}; shift to exponent a - j
    int n = static_cast<int>(p.size());
    acc *= std::pow(w, a - (n - 1));
    double aw = std::abs(w);
    cd phase = aw > 0 ? std::pow(aw / w, a) : cd(1);
    return phase * acc * std::pow(1.0 + aw * aw, -0.5 * a);
}

MatrixField evaluate_sections(const SplitSystemConfig& cfg, const SphereGrid& g) {
    int r = cfg.rank(), k = cfg.k();
    MatrixField P(g.cells(), r, k);
    for (int c = 0; c < g.cells(); ++c) {
        double wn = g.north_blend(c), ws = g.south_blend(c);
        for (int s = 0; s < k; ++s)
            for (int i = 0; i < r; ++i) {
                const auto& p = cfg.sections[s][i];
                if (p.empty()) {
                    P[c](i, s) = 0;
                    continue;
                }
                cd v = 0;
                if (wn > 0) v += wn * section_coefficient_north(p, cfg.degrees[i], g.north_coord(c));
                if (ws > 0) v += ws * section_coefficient_south(p, cfg.degrees[i], g.south_coord(c));
                P[c](i, s) = v;
            }
    }
    return P;
}

} // namespace vortex
