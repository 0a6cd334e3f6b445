#include "vortex/stability.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace vortex {

std::string to_string(const SystemType& t) {
    return "(" + std::to_string(t.d) + "," + std::to_string(t.r) + "," + std::to_string(t.k) + ")";
}

bool is_proper(const SystemType& sub, const SystemType& sys) {
    if (sub == sys) return false;
    if (sub.r == 0 && sub.k == 0) return false;
    return true;
}

AlphaParam::AlphaParam(Rational value) : value_(std::move(value)) {
    if (value_ <= 0) throw InfeasibleParameterError("alpha must be positive, got " + to_string(value_));
}

DecomposableSystem::DecomposableSystem(std::vector<Summand> summands) : summands_(std::move(summands)) {
    if (summands_.empty()) throw ValidationError("decomposable system needs at least one summand");
    for (const auto& s : summands_) {
        if (s.sections < 0) throw ValidationError("negative section count");
        long cap = std::max<long>(s.degree + 1, 0);
        if (s.sections > cap)
            throw ValidationError("summand O(" + std::to_string(s.degree) + ") has at most " + std::to_string(cap) +
                                  " independent sections, got " + std::to_string(s.sections));
    }
}

SystemType DecomposableSystem::type() const {
    SystemType t{0, 0, 0};
    for (const auto& s : summands_) {
        t.d += s.degree;
        t.r += 1;
        t.k += s.sections;
    }
    return t;
}

SystemType DecomposableSystem::type_of(const std::vector<int>& indices) const {
    SystemType t{0, 0, 0};
    for (int i : indices) {
        t.d += summands_.at(i).degree;
        t.r += 1;
        t.k += summands_.at(i).sections;
    }
    return t;
}

Rational alpha_degree(const SystemType& sub, const AlphaParam& alpha) {
    return Rational(sub.d) + alpha.value() * sub.k;
}

Rational alpha_slope(const SystemType& sub, const AlphaParam& alpha) {
    if (sub.r < 1) throw SlopeUndefinedError("slope undefined for rank " + std::to_string(sub.r));
    return alpha_degree(sub, alpha) / sub.r;
}

Rational tau_of_alpha(const SystemType& sys, const AlphaParam& alpha) { return alpha_slope(sys, alpha); }

AlphaParam alpha_of_tau(const SystemType& sys, const Rational& tau) {
    if (sys.k == 0) throw NoSectionsError("alpha is not determined by tau when k = 0");
    Rational a = (tau * sys.r - sys.d) / sys.k;
    if (a <= 0) throw InfeasibleParameterError("tau = " + to_string(tau) + " gives alpha = " + to_string(a) + " <= 0");
    return AlphaParam(a);
}

std::optional<Rational> critical_alpha(const SystemType& sys, const SystemType& sub) {
    long den = static_cast<long>(sys.r) * sub.k - static_cast<long>(sub.r) * sys.k;
    if (den == 0) return std::nullopt;
    long num = static_cast<long>(sub.r) * sys.d - static_cast<long>(sys.r) * sub.d;
    return Rational(BigInt(num)) / BigInt(den);
}

bool is_generic(const AlphaParam& alpha, const SystemType& sys) {
    return denominator_of(alpha.value()) > static_cast<long>(sys.r) * sys.k;
}

Rational slope_upper_bound(const SystemType& sys, const Rational& mu_max, const AlphaParam& alpha) {
    if (sys.r < 1) throw SlopeUndefinedError("slope bound undefined for rank 0");
    return mu_max + alpha.value() * sys.k / sys.r;
}

namespace {

// Non-empty proper subsets of {0..n-1} in lexicographic order of the sorted
// index lists.
std::vector<std::vector<int>> proper_subsets(int n) {
    std::vector<std::vector<int>> out;
    for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
        std::vector<int> s;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) s.push_back(i);
        out.push_back(std::move(s));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::vector<int>> all_subsets(int n) {
    auto out = proper_subsets(n);
    std::vector<int> full(n);
    std::iota(full.begin(), full.end(), 0);
    out.push_back(full);
    std::sort(out.begin(), out.end());
    return out;
}

// Best subobject among candidates: maximal slope, then maximal rank, then the
// lexicographically smallest index set.
std::optional<IndexedSubobject> best_of(const std::vector<IndexedSubobject>& cands, const AlphaParam& alpha) {
    std::optional<IndexedSubobject> best;
    Rational best_slope;
    for (const auto& c : cands) {
        Rational s = alpha_slope(c.type, alpha);
        bool better = !best || s > best_slope || (s == best_slope && c.type.r > best->type.r) ||
                      (s == best_slope && c.type.r == best->type.r && c.indices < best->indices);
        if (better) {
            best = c;
            best_slope = s;
        }
    }
    return best;
}

} // namespace

std::vector<IndexedSubobject> summand_subobjects(const DecomposableSystem& sys) {
    std::vector<IndexedSubobject> out;
    for (auto& idx : proper_subsets(static_cast<int>(sys.size())))
        out.push_back({idx, sys.type_of(idx)});
    return out;
}

std::vector<SystemType> enumerate_subobjects(const DecomposableSystem& sys) {
    std::set<SystemType> seen;
    for (const auto& sub : summand_subobjects(sys))
        for (int kk = 0; kk <= sub.type.k; ++kk) seen.insert({sub.type.d, sub.type.r, kk});
    return {seen.begin(), seen.end()};
}

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::stable: return "stable";
    case Verdict::strictly_semistable: return "strictly-semistable";
    case Verdict::unstable: return "unstable";
    }
    return "unknown";
}

StabilityResult stability_verdict(const DecomposableSystem& sys, const AlphaParam& alpha) {
    StabilityResult res;
    res.total_slope = alpha_slope(sys.type(), alpha);
    auto best = best_of(summand_subobjects(sys), alpha);
    if (!best) return res;
    Rational s = alpha_slope(best->type, alpha);
    if (s < res.total_slope) return res;
    res.verdict = s > res.total_slope ? Verdict::unstable : Verdict::strictly_semistable;
    res.witness = best;
    res.witness_slope = s;
    return res;
}

Filtration hn_filtration(const DecomposableSystem& sys, const AlphaParam& alpha) {
    Filtration f;
    std::vector<int> remaining(sys.size());
    std::iota(remaining.begin(), remaining.end(), 0);
    std::vector<int> taken;
    while (!remaining.empty()) {
        // candidates: non-empty subsets of the remaining summands, judged by
        // the slope of what they add on top of the previous step
        std::vector<IndexedSubobject> cands;
        for (auto& local : all_subsets(static_cast<int>(remaining.size()))) {
            std::vector<int> idx;
            for (int i : local) idx.push_back(remaining[i]);
            cands.push_back({idx, sys.type_of(idx)});
        }
        auto best = best_of(cands, alpha);
        taken.insert(taken.end(), best->indices.begin(), best->indices.end());
        std::sort(taken.begin(), taken.end());
        std::vector<int> rest;
        std::set_difference(remaining.begin(), remaining.end(), best->indices.begin(), best->indices.end(),
                            std::back_inserter(rest));
        remaining = rest;
        SystemType step = sys.type_of(taken);
        f.steps.push_back(step);
        f.index_sets.push_back(taken);
        f.quotient_slopes.push_back(alpha_slope(best->type, alpha));
    }
    return f;
}

std::vector<SystemType> seshadri_graded(const DecomposableSystem& sys, const AlphaParam& alpha) {
    auto v = stability_verdict(sys, alpha);
    if (v.verdict == Verdict::unstable)
        throw NotSemistableError("system is unstable at alpha = " + to_string(alpha.value()));
    // Semistable sums of lines have all summand slopes equal to the total, and
    // each line summand is stable on its own.
    std::vector<SystemType> out;
    for (const auto& s : sys.summands()) out.push_back({s.degree, 1, s.sections});
    return out;
}

namespace {

std::vector<Wall> collect(const std::map<Rational, std::set<SystemType>>& m) {
    std::vector<Wall> out;
    for (const auto& [a, subs] : m) out.push_back({a, {subs.begin(), subs.end()}});
    return out;
}

} // namespace

std::vector<Wall> walls(const DecomposableSystem& sys) {
    std::map<Rational, std::set<SystemType>> found;
    SystemType total = sys.type();
    for (const auto& sub : summand_subobjects(sys)) {
        auto a = critical_alpha(total, sub.type);
        if (a && *a > 0) found[*a].insert(sub.type);
    }
    return collect(found);
}

std::vector<Wall> walls(const SystemType& sys, const Rational& alpha_max) {
    if (alpha_max <= 0) throw ValidationError("alpha_max must be positive");
    std::map<Rational, std::set<SystemType>> found;
    for (int rs = 1; rs < sys.r; ++rs) {
        for (int ks = 0; ks <= sys.k; ++ks) {
            long den = static_cast<long>(sys.r) * ks - static_cast<long>(rs) * sys.k;
            if (den == 0) continue;
            // alpha = (rs d - r ds) / den lies in (0, alpha_max]; solve for ds.
            // r ds = rs d - alpha den, so ds ranges between the endpoint values.
            Rational lo_end = Rational(static_cast<long>(rs) * sys.d) / sys.r;
            Rational hi_end = (Rational(static_cast<long>(rs) * sys.d) - alpha_max * den) / sys.r;
            Rational a = std::min(lo_end, hi_end), b = std::max(lo_end, hi_end);
            BigInt first = numerator_of(a) / denominator_of(a) - 1;
            BigInt last = numerator_of(b) / denominator_of(b) + 1;
            for (BigInt ds = first; ds <= last; ++ds) {
                SystemType sub{ds.convert_to<long>(), rs, ks};
                auto c = critical_alpha(sys, sub);
                if (c && *c > 0 && *c <= alpha_max) found[*c].insert(sub);
            }
        }
    }
    return collect(found);
}

} // namespace vortex
