#pragma once

// L_p norms of the weighted trace:  ||A||_p = tau(|A|^p)^{1/p}  for finite
// p >= 1 and ||A||_inf = ||A||. In finite dimension every L_p space is the
// algebra itself with a different norm, so values carry (element, p) pairs
// instead of a distinct completion.
//
// The module exposes the Hoelder family (pair, k-factor and target-r forms),
// the trace-norm chain |tau(AB)| <= tau(|AB|) <= ||A|| tau(|B|), the duality
// pairing (A,B) -> tau(AB), and the extremal witness that attains the dual
// sup:
//
//     B = |A|^{p-1} u* / tau(|A|^p)^{(p-1)/p},        a = u|A|,
//
// which satisfies ||B||_q = 1 and tau(AB) = ||A||_p for 1/p + 1/q = 1. At
// p = 1 the formula degenerates and the witness is u* itself.

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "nclp/algebra.hpp"
#include "nclp/spectral.hpp"

namespace nclp {

inline constexpr double kInfiniteP = std::numeric_limits<double>::infinity();

struct LpValue {
    double p = 1.0;
    double value = 0.0;
    Element element_ref;
};

namespace detail {

// Singular values of a block paired with its trace weight.
inline std::vector<std::pair<double, double>> weighted_singular_values(const Element& a) {
    std::vector<std::pair<double, double>> out;
    for (std::size_t k = 0; k < a.blocks.size(); ++k) {
        Eigen::JacobiSVD<Matrix> svd(a.blocks[k]);
        for (int i = 0; i < svd.singularValues().size(); ++i)
            out.emplace_back(svd.singularValues()(i), a.algebra.trace_weights[k]);
    }
    return out;
}

} // namespace detail

inline void require_exponent(double p, const char* who) {
    if (std::isnan(p) || p < 1.0)
        throw BadExponent(std::string(who) + ": exponent must satisfy p >= 1");
}

inline LpValue lp_norm(const Element& a, double p) {
    require_exponent(p, "lp_norm");
    LpValue v{p, 0.0, a};
    if (std::isinf(p)) {
        v.value = operator_norm(a);
        return v;
    }
    double acc = 0.0;
    for (const auto& [sigma, weight] : detail::weighted_singular_values(a))
        acc += weight * std::pow(sigma, p);
    v.value = std::pow(acc, 1.0 / p);
    return v;
}

struct HolderResult {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

// ||prod A_i||_r <= prod ||A_i||_{p_i} whenever sum 1/p_i = 1/r. The budget
// identity is enforced to 1e-12; r = 1 reproduces the two-factor and
// k-factor theorems.
inline HolderResult holder_bound(const std::vector<std::pair<Element, double>>& factors,
                                 double r = 1.0) {
    if (factors.empty())
        throw PreconditionFailed("holder_bound: at least one factor required");
    require_exponent(r, "holder_bound(target)");
    double budget = 0.0;
    for (const auto& [a, p] : factors) {
        require_exponent(p, "holder_bound(factor)");
        if (!std::isinf(p)) budget += 1.0 / p;
    }
    const double target = std::isinf(r) ? 0.0 : 1.0 / r;
    if (std::abs(budget - target) > kExponentTol)
        throw ExponentMismatch("holder_bound: sum of reciprocals deviates from 1/r");

    Element prod = factors.front().first;
    for (std::size_t i = 1; i < factors.size(); ++i)
        prod = mul(prod, factors[i].first);
    HolderResult res;
    res.lhs = lp_norm(prod, r).value;
    res.rhs = 1.0;
    for (const auto& [a, p] : factors) res.rhs *= lp_norm(a, p).value;
    res.holds = res.lhs <= res.rhs + kSpectralTol * (1.0 + res.rhs);
    return res;
}

struct DualWitness {
    Element witness;
    double pairing = 0.0;
};

// Extremal element of the dual-sup formula. p > 1 uses the power formula;
// p = 1 returns u* (then tau(a u*) = tau(|a|) and ||u*||_inf = 1).
inline DualWitness dual_norm_witness(const Element& a, double p) {
    require_exponent(p, "dual_norm_witness");
    if (std::isinf(p))
        throw BadExponent("dual_norm_witness: p must be finite; the q = 1 side has no witness formula here");
    if (operator_norm(a) <= 1e-14)
        throw ZeroElement("dual_norm_witness: zero element has no normalized witness");
    const PolarData pd = polar_decomposition(a);
    Element b = adjoint(pd.u);
    if (p > 1.0 + kExponentTol) {
        const double np = lp_norm(a, p).value;
        b = scalar_mul(std::pow(np, -(p - 1.0)), mul(element_pow(pd.abs, p - 1.0), b));
    }
    DualWitness dw{b, 0.0};
    const cdouble pairing = trace_eval(mul(a, b));
    dw.pairing = pairing.real();
    return dw;
}

inline cdouble duality_pairing(const Element& a, const Element& b) {
    check_same_algebra(a, b, "duality_pairing");
    return trace_eval(mul(a, b));
}

struct TraceNormBound {
    double lhs1 = 0.0; // |tau(AB)|
    double lhs2 = 0.0; // tau(|AB|)
    double rhs = 0.0;  // ||A|| tau(|B|)
    bool holds = false;
};

inline TraceNormBound trace_norm_bound_check(const Element& a, const Element& b) {
    check_same_algebra(a, b, "trace_norm_bound_check");
    TraceNormBound r;
    const Element ab = mul(a, b);
    r.lhs1 = std::abs(trace_eval(ab));
    r.lhs2 = lp_norm(ab, 1.0).value;
    r.rhs = operator_norm(a) * lp_norm(b, 1.0).value;
    const double tol = kSpectralTol * (1.0 + r.rhs);
    r.holds = r.lhs1 <= r.lhs2 + tol && r.lhs2 <= r.rhs + tol;
    return r;
}

} // namespace nclp
