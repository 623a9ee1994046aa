#pragma once

// Three Radon-Nikodym derivatives between positive functionals, the induced
// weight phi_H, and the flow-commutation equivalence.
//
// Commutant form (psi <= phi, phi a faithful state): the sesquilinear form
// psi~([A],[B]) = psi(B*A) is bounded by the GNS inner product, so a Riesz
// operator H' with psi~(x,y) = <H'x, y> exists in the commutant of pi(M).
// Here the commutant consists of right multiplications, and H' is found by a
// least-squares solve over that basis; it satisfies 0 <= H' <= 1 and
// psi(A) = <H' pi(A) xi, xi>. On positive A the adjointed variant
// <H' pi(A*) xi, xi> agrees (A* = A); on general A it returns psi(A*).
//
// Sakai form: H = rho^{-1/2} (rho^{1/2} sigma rho^{1/2})^{1/2} rho^{-1/2} is
// the unique positive solution of H rho H = sigma, giving psi = phi(H . H).
//
// Pedersen-Takesaki form: when psi is flow-invariant, which in finite
// dimension means [sigma, rho] = 0, H = sigma rho^{-1} lies in the
// centralizer and psi = phi(H .). Domination is not required; psi <= phi
// merely adds ||H|| <= 1.

#include <cmath>
#include <vector>

#include "nclp/algebra.hpp"
#include "nclp/functionals.hpp"
#include "nclp/gns.hpp"
#include "nclp/modular.hpp"
#include "nclp/spectral.hpp"

namespace nclp {

namespace detail {

inline Element density_gap(const FunctionalSpec& f, const FunctionalSpec& g) {
    check_same_algebra(f.density, g.density, "radon_nikodym");
    return sub(f.density, g.density);
}

} // namespace detail

struct CommutantRnResult {
    Element right_multiplier; // D with H' [A] = [A D]
    Matrix gns_operator;      // H' on GNS coordinates, 0 <= H' <= 1
};

inline CommutantRnResult commutant_rn(const FunctionalSpec& f, const FunctionalSpec& g) {
    detail::require_faithful_state(f, "commutant_rn");
    if (!g.is_positive_functional)
        throw NotPositive("commutant_rn: psi must be positive");
    if (!is_positive(detail::density_gap(f, g), PositivityCriterion::spectral))
        throw DominationFailed("commutant_rn: psi <= phi fails");

    const GnsData gns = gns_construct(f);
    const int d = gns.dim;
    const auto units = matrix_unit_basis(f.algebra);

    // Right multiplications R_E [A] = [A E] span the commutant of pi(M).
    std::vector<Matrix> right_reps;
    right_reps.reserve(units.size());
    for (const Element& e : units) {
        const std::size_t m = gns.domain_basis.size();
        Matrix rm = Matrix::Zero(m, m);
        for (std::size_t i = 0; i < m; ++i)
            rm.col(i) = gns.coords(mul(gns.domain_basis[i], e));
        right_reps.push_back(gns.basis_map * rm * gns.lift_map);
    }
    // Spot check the commutant claim against a represented element.
    {
        const Matrix pi0 = gns.represent(units.front());
        if ((pi0 * right_reps.back() - right_reps.back() * pi0).norm() > 1e-8 * (1.0 + pi0.norm()))
            throw Error("commutant_rn: right multiplication escapes the commutant");
    }

    // Riesz problem on coordinates: sum_e c_e <R_e z_a, z_b> = psi(lift(z_b)* lift(z_a))
    // over the standard GNS basis vectors.
    Matrix lhs(d * d, int(units.size()));
    Vector rhs(d * d);
    std::vector<Element> lifts;
    lifts.reserve(d);
    for (int a = 0; a < d; ++a)
        lifts.push_back(gns.lift(Vector::Unit(d, a)));
    int row = 0;
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b, ++row) {
            for (std::size_t e = 0; e < units.size(); ++e)
                lhs(row, int(e)) = right_reps[e](b, a);
            rhs(row) = trace_eval(mul(g.density, mul(adjoint(lifts[b]), lifts[a])));
        }
    const Vector coeff = lhs.colPivHouseholderQr().solve(rhs);

    CommutantRnResult res{zero_element(f.algebra), Matrix::Zero(d, d)};
    for (std::size_t e = 0; e < units.size(); ++e) {
        res.right_multiplier = add(res.right_multiplier, scalar_mul(coeff(int(e)), units[e]));
        res.gns_operator += coeff(int(e)) * right_reps[e];
    }

    const double tol = kResidualTol * (1.0 + operator_norm(g.density));
    if ((res.gns_operator - res.gns_operator.adjoint()).norm() > tol)
        throw Error("commutant_rn: H' is not self-adjoint");
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (res.gns_operator + res.gns_operator.adjoint()));
    if (es.eigenvalues().minCoeff() < -tol || es.eigenvalues().maxCoeff() > 1.0 + tol)
        throw Error("commutant_rn: H' escapes [0, 1]");
    for (const Element& e : units) {
        const cdouble got = gns.cyclic_vector.adjoint() *
                            (res.gns_operator * (gns.represent(e) * gns.cyclic_vector));
        const cdouble want = trace_eval(mul(g.density, e));
        if (std::abs(got - want) > tol)
            throw Error("commutant_rn: reproducing identity fails on a matrix unit");
    }
    return res;
}

inline Element sakai_rn(const FunctionalSpec& f, const FunctionalSpec& g) {
    detail::require_faithful_bounded(f, "sakai_rn");
    if (!g.is_positive_functional || !is_bounded(g))
        throw NotPositive("sakai_rn: psi must be positive and bounded");
    if (!is_positive(detail::density_gap(f, g), PositivityCriterion::spectral))
        throw DominationFailed("sakai_rn: psi <= phi fails");

    const Element& rho = f.density;
    const Element& sigma = g.density;
    const Element root = element_sqrt(rho);
    const Element inv_root = element_pow(rho, -0.5);
    const Element mid = element_sqrt(mul(root, mul(sigma, root)));
    Element h = mul(inv_root, mul(mid, inv_root));
    h = scalar_mul(0.5, add(h, adjoint(h)));

    const double tol = kResidualTol * (1.0 + operator_norm(sigma));
    if (min_eigenvalue(h) < -tol || operator_norm(h) > 1.0 + tol)
        throw Error("sakai_rn: H escapes [0, 1]");
    for (const Element& e : matrix_unit_basis(f.algebra)) {
        const cdouble lhs = trace_eval(mul(sigma, e));
        const cdouble rhs = trace_eval(mul(rho, mul(h, mul(e, h))));
        if (std::abs(lhs - rhs) > tol)
            throw Error("sakai_rn: defining identity psi = phi(H . H) fails");
    }
    return h;
}

inline Element pt_rn(const FunctionalSpec& f, const FunctionalSpec& g) {
    detail::require_faithful_bounded(f, "pt_rn");
    if (!g.is_positive_functional || !is_bounded(g))
        throw NotPositive("pt_rn: psi must be positive and bounded");
    const Element& rho = f.density;
    const Element& sigma = g.density;
    const double inv_tol = kSpectralTol * (1.0 + operator_norm(rho) * operator_norm(sigma));
    if (commutator_norm(sigma, rho) > inv_tol)
        throw NotInvariant("pt_rn: psi is not invariant under the modular flow of phi");
    // Redundant guard: invariance at sampled flow times.
    const SpectralData sd = spectral_decomposition(rho);
    for (double t : {0.7, -1.3}) {
        for (const Element& e : matrix_unit_basis(f.algebra)) {
            const Element fe = detail::flow_from_spectral(sd, f.algebra, e, cdouble(t, 0.0));
            if (std::abs(trace_eval(mul(sigma, fe)) - trace_eval(mul(sigma, e))) >
                kResidualTol * (1.0 + operator_norm(sigma)))
                throw NotInvariant("pt_rn: sampled flow invariance fails");
        }
    }

    Element h = mul(sigma, element_pow(rho, -1.0));
    h = scalar_mul(0.5, add(h, adjoint(h)));
    const double tol = kResidualTol * (1.0 + operator_norm(sigma));
    if (commutator_norm(h, rho) > kSpectralTol * (1.0 + operator_norm(rho)) * (1.0 + operator_norm(h)))
        throw Error("pt_rn: H escapes the centralizer");
    for (const Element& e : matrix_unit_basis(f.algebra)) {
        const cdouble lhs = trace_eval(mul(sigma, e));
        const cdouble rhs = trace_eval(mul(rho, mul(h, e)));
        if (std::abs(lhs - rhs) > tol)
            throw Error("pt_rn: defining identity psi = phi(H .) fails");
    }
    if (is_positive(detail::density_gap(f, g), PositivityCriterion::spectral) &&
        operator_norm(h) > 1.0 + tol)
        throw Error("pt_rn: psi <= phi should force ||H|| <= 1");
    return h;
}

// Weight phi_H with density H^{1/2} F H^{1/2} = F H for commuting data. The
// infinite part shrinks to the part of P_inf that H actually reaches.
inline FunctionalSpec weight_from_density(const FunctionalSpec& f, const Element& h) {
    if (!f.is_positive_functional)
        throw NotPositive("weight_from_density: base weight must be positive");
    require_positive(h, "weight_from_density");
    check_same_algebra(f.density, h, "weight_from_density");
    const double tol = kSpectralTol * (1.0 + operator_norm(h)) * (1.0 + operator_norm(f.density));
    if (commutator_norm(h, f.density) > tol)
        throw NotCommuting("weight_from_density: h does not commute with the density");
    if (commutator_norm(h, f.infinite_part) > tol)
        throw NotCommuting("weight_from_density: h does not commute with the infinite part");
    Element density = mul(f.density, h);
    density = scalar_mul(0.5, add(density, adjoint(density)));
    Element infinite = mul(f.infinite_part, support_projection(h));
    infinite = scalar_mul(0.5, add(infinite, adjoint(infinite)));
    return make_functional(density, infinite);
}

// Cap-ladder form: the weights phi_{H_i} built from H_i = E_{[0, c_i)} H
// E_{[0, c_i)} increase along the ladder and stabilize to phi_H once the cap
// clears the spectrum of h, so the limit does not depend on the chosen
// sequence. Both monotonicity and stabilization are verified on the instance.
inline FunctionalSpec weight_from_caps(const FunctionalSpec& f, const Element& h,
                                       const std::vector<double>& caps) {
    if (caps.empty())
        throw PreconditionFailed("weight_from_caps: cap sequence must be nonempty");
    for (std::size_t i = 0; i + 1 < caps.size(); ++i)
        if (caps[i + 1] < caps[i])
            throw NotIncreasing("weight_from_caps: caps must be nondecreasing");
    const double tol = kSpectralTol * (1.0 + operator_norm(h)) * (1.0 + operator_norm(f.density));
    FunctionalSpec current = weight_from_density(f, spectral_cap(h, caps.front()));
    for (std::size_t i = 1; i < caps.size(); ++i) {
        const FunctionalSpec next = weight_from_density(f, spectral_cap(h, caps[i]));
        if (!is_positive(sub(next.density, current.density), PositivityCriterion::spectral))
            throw Error("weight_from_caps: weight ladder fails to increase");
        if (!is_positive(sub(next.infinite_part, current.infinite_part),
                         PositivityCriterion::spectral))
            throw Error("weight_from_caps: infinite parts fail to increase");
        current = next;
    }
    if (caps.back() > operator_norm(h) + tol) {
        const FunctionalSpec full = weight_from_density(f, h);
        if (norm_distance(current.density, full.density) > tol ||
            norm_distance(current.infinite_part, full.infinite_part) > tol)
            throw Error("weight_from_caps: ladder fails to stabilize at phi_H");
    }
    return current;
}

struct FlowCommutation {
    bool invariance_fg = false; // psi of sigma^phi_t equals psi
    bool invariance_gf = false; // phi of sigma^psi_t equals phi
    bool flows_commute = false;
    double residual_fg = 0.0;
    double residual_gf = 0.0;
    double residual_comm = 0.0;
};

// The three conditions of the invariance-commutation equivalence, evaluated
// at the sampled times; the booleans must agree, and disagreement is an
// error rather than a return value.
inline FlowCommutation flow_commutation_check(const FunctionalSpec& f, const FunctionalSpec& g,
                                              const std::vector<double>& t_samples) {
    detail::require_faithful_state(f, "flow_commutation_check");
    detail::require_faithful_state(g, "flow_commutation_check");
    check_same_algebra(f.density, g.density, "flow_commutation_check");
    const SpectralData sdf = spectral_decomposition(f.density);
    const SpectralData sdg = spectral_decomposition(g.density);
    const auto units = matrix_unit_basis(f.algebra);
    FlowCommutation res;
    for (double t : t_samples) {
        for (const Element& e : units) {
            const Element ef = detail::flow_from_spectral(sdf, f.algebra, e, cdouble(t, 0.0));
            const Element eg = detail::flow_from_spectral(sdg, f.algebra, e, cdouble(t, 0.0));
            res.residual_fg = std::max(res.residual_fg,
                                       std::abs(trace_eval(mul(g.density, ef)) - trace_eval(mul(g.density, e))));
            res.residual_gf = std::max(res.residual_gf,
                                       std::abs(trace_eval(mul(f.density, eg)) - trace_eval(mul(f.density, e))));
        }
        for (double s : t_samples) {
            for (const Element& e : units) {
                const Element fg = detail::flow_from_spectral(
                    sdf, f.algebra, detail::flow_from_spectral(sdg, f.algebra, e, cdouble(s, 0.0)),
                    cdouble(t, 0.0));
                const Element gf = detail::flow_from_spectral(
                    sdg, f.algebra, detail::flow_from_spectral(sdf, f.algebra, e, cdouble(t, 0.0)),
                    cdouble(s, 0.0));
                res.residual_comm = std::max(res.residual_comm, norm_distance(fg, gf));
            }
        }
    }
    const double tol =
        kSpectralTol * (1.0 + operator_norm(f.density) + operator_norm(g.density));
    res.invariance_fg = res.residual_fg <= tol;
    res.invariance_gf = res.residual_gf <= tol;
    res.flows_commute = res.residual_comm <= tol;
    if (res.invariance_fg != res.invariance_gf || res.invariance_fg != res.flows_commute)
        throw Error("flow_commutation_check: the three equivalent conditions disagree");
    return res;
}

} // namespace nclp
