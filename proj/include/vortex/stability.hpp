#pragma once

// Slope stability of coherent systems in exact rational arithmetic.
//
// A coherent system of type (d, r, k) is a rank r bundle of degree d with a
// k-dimensional space of sections. Verdicts and filtrations are computed for
// direct sums of line bundles, where subobjects are sums of summands.

#include "vortex/errors.hpp"
#include "vortex/rational.hpp"

#include <optional>
#include <string>
#include <vector>

namespace vortex {

struct SystemType {
    long d = 0;
    int r = 1;
    int k = 0;

    bool operator==(const SystemType&) const = default;
    auto operator<=>(const SystemType&) const = default;
};

using SubobjectType = SystemType;

std::string to_string(const SystemType& t); // "(d,r,k)"

// True when sub is not the whole system and not the zero object.
bool is_proper(const SystemType& sub, const SystemType& sys);

class AlphaParam {
public:
    explicit AlphaParam(Rational value); // throws InfeasibleParameterError unless value > 0
    const Rational& value() const { return value_; }

private:
    Rational value_;
};

struct Summand {
    long degree = 0;
    int sections = 0;

    bool operator==(const Summand&) const = default;
};

class DecomposableSystem {
public:
    DecomposableSystem() = default;
    // Throws ValidationError if a summand carries more sections than a
    // degree-a line bundle on the sphere has (a + 1), or a negative count.
    explicit DecomposableSystem(std::vector<Summand> summands);

    const std::vector<Summand>& summands() const { return summands_; }
    std::size_t size() const { return summands_.size(); }
    SystemType type() const;
    SystemType type_of(const std::vector<int>& indices) const;

private:
    std::vector<Summand> summands_;
};

Rational alpha_degree(const SystemType& sub, const AlphaParam& alpha);
Rational alpha_slope(const SystemType& sub, const AlphaParam& alpha);
Rational tau_of_alpha(const SystemType& sys, const AlphaParam& alpha);
AlphaParam alpha_of_tau(const SystemType& sys, const Rational& tau);

// The parameter where sub and sys have equal slope. Empty when the slopes
// differ by a constant (r k' = r' k).
std::optional<Rational> critical_alpha(const SystemType& sys, const SystemType& sub);

bool is_generic(const AlphaParam& alpha, const SystemType& sys);

Rational slope_upper_bound(const SystemType& sys, const Rational& mu_max, const AlphaParam& alpha);

// A subobject made from a set of summands, carrying all of their sections.
struct IndexedSubobject {
    std::vector<int> indices; // sorted summand indices
    SystemType type;
};

// Non-empty proper summand subsets, each with every section count
// 0..(available), deduplicated by type and sorted.
std::vector<SystemType> enumerate_subobjects(const DecomposableSystem& sys);

// Non-empty proper summand subsets with maximal section count, in
// lexicographic order of index sets.
std::vector<IndexedSubobject> summand_subobjects(const DecomposableSystem& sys);

enum class Verdict { stable, strictly_semistable, unstable };
std::string to_string(Verdict v);

struct StabilityResult {
    Verdict verdict = Verdict::stable;
    Rational total_slope;
    std::optional<IndexedSubobject> witness; // maximizer; absent for stable
    std::optional<Rational> witness_slope;
};

StabilityResult stability_verdict(const DecomposableSystem& sys, const AlphaParam& alpha);

struct Filtration {
    std::vector<SystemType> steps;       // cumulative, last is the whole system
    std::vector<std::vector<int>> index_sets; // summands in each cumulative step
    std::vector<Rational> quotient_slopes;
};

Filtration hn_filtration(const DecomposableSystem& sys, const AlphaParam& alpha);

// Stable factors of a semistable system. Throws NotSemistableError.
std::vector<SystemType> seshadri_graded(const DecomposableSystem& sys, const AlphaParam& alpha);

struct Wall {
    Rational alpha;
    std::vector<SystemType> subobjects; // subobjects whose slope ties the total there
};

// Positive critical parameters over the summand subobject family.
std::vector<Wall> walls(const DecomposableSystem& sys);

// Positive critical parameters in (0, alpha_max] over all numerical
// subtypes (d', r', k') with 1 <= r' < r and 0 <= k' <= k.
std::vector<Wall> walls(const SystemType& sys, const Rational& alpha_max);

} // namespace vortex
