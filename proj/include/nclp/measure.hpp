#pragma once

// The D(eps, delta) neighborhood system of the measure topology.
//
// A lies in D(eps, delta) when some projection p satisfies ||A p|| <= eps and
// tau(1 - p) <= delta; equivalently the spectral projection of |A| on
// (eps, infinity) carries trace mass at most delta. Membership, the adjoint
// symmetry, the sum rule D(e1+e2, d1+d2), the product rule D(e1 e2, d1+d2)
// and the inversion of the distribution function all reduce to the weighted
// singular value profile of the operand.
//
// Tie rule at the cut: eigenvalues within the clustering tolerance of eps
// count as not exceeding eps, so the interval stays open, minimal_epsilon is
// attained, and membership is deterministic under roundoff.

#include <algorithm>
#include <optional>
#include <vector>

#include "nclp/algebra.hpp"
#include "nclp/spectral.hpp"

namespace nclp {

struct DNeighborhood {
    double epsilon = 1.0; // operator-norm cut, > 0
    double delta = 0.0;   // trace mass allowance, >= 0
    AlgebraSpec algebra;

    DNeighborhood() = default;
    DNeighborhood(double eps, double del, AlgebraSpec spec)
        : epsilon(eps), delta(del), algebra(std::move(spec)) {
        if (!(epsilon > 0.0)) throw Error("DNeighborhood: epsilon must be > 0");
        if (!(delta >= 0.0)) throw Error("DNeighborhood: delta must be >= 0");
    }
};

struct DMembership {
    bool member = false;
    std::optional<Element> witness; // p with ||a p|| <= eps, tau(1-p) <= delta
};

namespace detail {

struct SpectralProfile {
    std::vector<double> values;  // cluster representatives of |a|, ascending
    std::vector<double> masses;  // tau of the matching spectral projections
    std::vector<Element> projections;
    double tol = 0.0; // clustering tolerance used for the cut tie rule
};

inline SpectralProfile modulus_profile(const Element& a) {
    const Element abs = absolute_value(a);
    const SpectralData sd = spectral_decomposition(abs);
    SpectralProfile prof;
    prof.tol = kSpectralTol * (1.0 + sd.source_norm);
    prof.values = sd.eigenvalues;
    prof.projections = sd.projections;
    for (const Element& p : sd.projections)
        prof.masses.push_back(trace_eval(p).real());
    return prof;
}

inline double mass_above(const SpectralProfile& prof, double eps) {
    double m = 0.0;
    for (std::size_t i = 0; i < prof.values.size(); ++i)
        if (prof.values[i] > eps + prof.tol) m += prof.masses[i];
    return m;
}

} // namespace detail

inline DMembership d_membership(const Element& a, const DNeighborhood& nbhd) {
    if (a.algebra != nbhd.algebra)
        throw AlgebraMismatch("d_membership: element outside the neighborhood's algebra");
    const auto prof = detail::modulus_profile(a);
    Element excess = zero_element(a.algebra);
    for (std::size_t i = 0; i < prof.values.size(); ++i)
        if (prof.values[i] > nbhd.epsilon + prof.tol)
            excess = add(excess, prof.projections[i]);
    const double mass = trace_eval(excess).real();
    DMembership res;
    res.member = mass <= nbhd.delta + kDeltaSlack;
    if (res.member) {
        Element p = sub(identity_element(a.algebra), excess);
        // The witness must actually witness: both defining bounds are
        // re-verified against the cut with clustering slack.
        if (operator_norm(mul(a, p)) > nbhd.epsilon + 32.0 * prof.tol)
            throw Error("d_membership: witness violates the norm cut");
        if (trace_eval(sub(identity_element(a.algebra), p)).real() > nbhd.delta + kDeltaSlack)
            throw Error("d_membership: witness violates the mass budget");
        res.witness = std::move(p);
    }
    return res;
}

// A and A* always land on the same side of D(eps, delta): |A| and |A*| share
// their spectrum. Returns whether the two memberships agree.
inline bool adjoint_symmetry_check(const Element& a, const DNeighborhood& nbhd) {
    return d_membership(a, nbhd).member == d_membership(adjoint(a), nbhd).member;
}

// Smallest eps with tau(E_{(eps, inf)}(|a|)) <= delta. The distribution
// function is a right-continuous step function on the cluster
// representatives, so the infimum is attained at one of them (or at 0).
inline double minimal_epsilon(const Element& a, double delta) {
    if (!(delta >= 0.0)) throw Error("minimal_epsilon: delta must be >= 0");
    const auto prof = detail::modulus_profile(a);
    std::vector<double> candidates{0.0};
    candidates.insert(candidates.end(), prof.values.begin(), prof.values.end());
    std::sort(candidates.begin(), candidates.end());
    for (double c : candidates)
        if (detail::mass_above(prof, c) <= delta + kDeltaSlack) return std::max(c, 0.0);
    return candidates.back();
}

struct DArithmetic {
    bool sum_ok = false;
    bool prod_ok = false;
};

// Sum and product rules. The claimed memberships of the inputs are genuine
// preconditions and are checked first.
inline DArithmetic d_arithmetic_check(const Element& a, const Element& b,
                                      double e1, double d1, double e2, double d2) {
    check_same_algebra(a, b, "d_arithmetic_check");
    const DNeighborhood n1(e1, d1, a.algebra), n2(e2, d2, a.algebra);
    if (!d_membership(a, n1).member)
        throw PreconditionFailed("d_arithmetic_check: a is not in D(e1, d1)");
    if (!d_membership(b, n2).member)
        throw PreconditionFailed("d_arithmetic_check: b is not in D(e2, d2)");
    DArithmetic res;
    res.sum_ok = d_membership(add(a, b), DNeighborhood(e1 + e2, d1 + d2, a.algebra)).member;
    res.prod_ok = d_membership(mul(a, b), DNeighborhood(e1 * e2, d1 + d2, a.algebra)).member;
    return res;
}

// tau(1 - p_n) along an increasing projection chain; the profile decreasing
// to zero is the finite-dimensional face of tau-density.
inline std::vector<double> tau_density_profile(const std::vector<Element>& chain) {
    std::vector<double> out;
    if (chain.empty()) return out;
    for (const Element& p : chain) require_projection(p, "tau_density_profile");
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        check_same_algebra(chain[i], chain[i + 1], "tau_density_profile");
        if (!is_positive(sub(chain[i + 1], chain[i]), PositivityCriterion::spectral))
            throw NotIncreasing("tau_density_profile: chain step " + std::to_string(i) +
                                " is not below its successor");
    }
    const Element one = identity_element(chain.front().algebra);
    for (const Element& p : chain)
        out.push_back(trace_eval(sub(one, p)).real());
    return out;
}

} // namespace nclp
