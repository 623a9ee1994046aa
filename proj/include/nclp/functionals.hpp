#pragma once

// States, traces and semifinite weights as density data.
//
// A functional is carried by a density F and an infinite-part projection
// P_inf orthogonal to it:
//
//     phi(A) = tau(F A)            when the infinite part does not see A,
//     phi(A) = +infinity           for positive A overlapping P_inf.
//
// A plain density cannot produce the value +infinity in finite dimension, so
// P_inf restores the domain structure of a genuinely semifinite weight: the
// left ideal N_phi = {A : A P_inf = 0}, the finite corner
// M_phi = (1-P_inf) M (1-P_inf), and the null ideal {A : A F = 0, A P_inf = 0}.
// The marker for +infinity is a tagged value, never a float infinity, so the
// convention infinity*0 = 0 stays explicit.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nclp/algebra.hpp"
#include "nclp/spectral.hpp"

namespace nclp {

struct FunctionalSpec {
    AlgebraSpec algebra;
    Element density;        // F
    Element infinite_part;  // P_inf, projection, F P_inf = P_inf F = 0
    bool is_positive_functional = false;
    bool is_trace_compatible = false; // density central per block: phi(AB) = phi(BA)
};

namespace detail {

inline bool density_is_central(const Element& f) {
    const double tol = kSpectralTol * (1.0 + operator_norm(f));
    for (std::size_t k = 0; k < f.blocks.size(); ++k) {
        const int n = int(f.blocks[k].rows());
        const cdouble mean = f.blocks[k].trace() / double(n);
        if ((f.blocks[k] - mean * Matrix::Identity(n, n)).norm() > tol * std::sqrt(double(n)))
            return false;
    }
    return true;
}

} // namespace detail

inline FunctionalSpec make_functional(const Element& density, const Element& infinite_part) {
    check_same_algebra(density, infinite_part, "make_functional");
    require_projection(infinite_part, "make_functional(infinite_part)");
    const double tol = kSpectralTol * (1.0 + operator_norm(density));
    if (operator_norm(mul(density, infinite_part)) > tol ||
        operator_norm(mul(infinite_part, density)) > tol)
        throw Error("make_functional: density must vanish on the infinite part");
    FunctionalSpec f;
    f.algebra = density.algebra;
    f.density = density;
    f.infinite_part = infinite_part;
    f.is_positive_functional = is_positive(density, PositivityCriterion::spectral);
    f.is_trace_compatible = detail::density_is_central(density);
    return f;
}

inline FunctionalSpec make_bounded_functional(const Element& density) {
    return make_functional(density, zero_element(density.algebra));
}

// The canonical trace tau as a functional: density = identity.
inline FunctionalSpec trace_functional(const AlgebraSpec& spec) {
    return make_bounded_functional(identity_element(spec));
}

inline bool is_bounded(const FunctionalSpec& f) {
    return operator_norm(f.infinite_part) <= 0.5;
}

// Faithful on positives: the combined support F + P_inf covers everything.
inline bool is_faithful(const FunctionalSpec& f) {
    if (!f.is_positive_functional) return false;
    const Element s = support_projection(add(f.density, f.infinite_part));
    return norm_distance(s, identity_element(f.algebra)) <= 0.5;
}

inline bool is_state(const FunctionalSpec& f) {
    if (!f.is_positive_functional || !is_bounded(f)) return false;
    return std::abs(trace_eval(f.density) - cdouble(1.0, 0.0)) <= kSpectralTol * (1.0 + operator_norm(f.density));
}

// Evaluation result: either a finite complex value or the tagged +infinity.
struct EvalResult {
    bool is_infinite = false;
    cdouble value{0.0, 0.0};
};

inline EvalResult finite_value(cdouble v) { return EvalResult{false, v}; }
inline EvalResult infinite_value() { return EvalResult{true, cdouble(0.0, 0.0)}; }

// phi(a). Finite branch: tau(F a). Positive a overlapping the infinite part
// evaluates to the +infinity marker; a non-positive a that touches P_inf has
// no consistent extended value and is rejected.
inline EvalResult functional_eval(const FunctionalSpec& f, const Element& a) {
    check_same_algebra(f.density, a, "functional_eval");
    const double tol = kSpectralTol * (1.0 + operator_norm(a));
    if (is_bounded(f)) return finite_value(trace_eval(mul(f.density, a)));
    const Element pa = mul(f.infinite_part, a);
    const Element ap = mul(a, f.infinite_part);
    const bool touches = operator_norm(pa) > tol || operator_norm(ap) > tol;
    if (!touches) return finite_value(trace_eval(mul(f.density, a)));
    if (is_positive(a, PositivityCriterion::spectral)) {
        // tau(P a P) = 0 forces a P = 0 for positive a, so overlap here means
        // genuine infinite mass.
        return infinite_value();
    }
    throw UndefinedEvaluation("functional_eval: non-positive element touches the infinite part");
}

// Dual norm sup_{||A|| <= 1} |tau(F A)| = sum_k c_k ||F_k||_1, the weighted
// singular value sum. The sampled sup stays available to tests as an oracle.
inline double functional_norm(const FunctionalSpec& f) {
    if (!is_bounded(f))
        throw UnboundedWeight("functional_norm: infinite part present");
    double n = 0.0;
    for (std::size_t k = 0; k < f.density.blocks.size(); ++k) {
        Eigen::JacobiSVD<Matrix> svd(f.density.blocks[k]);
        n += f.algebra.trace_weights[k] * svd.singularValues().sum();
    }
    return n;
}

struct WeightDomains {
    std::vector<Element> n_phi_basis;      // N_phi = {A : A P_inf = 0}
    std::vector<Element> m_phi_basis;      // M_phi = (1-P_inf) M (1-P_inf)
    std::vector<Element> null_ideal_basis; // {A : A F = 0, A P_inf = 0}
    Element corner_projection;             // 1 - P_inf; F_phi = corner M_+ corner
    std::string f_phi_description;
};

namespace detail {

// Orthonormal eigenvectors of a Hermitian block with eigenvalue below (or
// above) a 0.5 cut; used to slice ranges of projections and supports.
inline std::vector<Vector> split_eigenvectors(const Matrix& h, bool below_half) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
    std::vector<Vector> out;
    for (int i = 0; i < h.rows(); ++i) {
        const bool below = es.eigenvalues()(i) < 0.5;
        if (below == below_half) out.push_back(es.eigenvectors().col(i));
    }
    return out;
}

inline Element rank_one(const AlgebraSpec& spec, std::size_t block, const Vector& x, const Vector& y) {
    Element e = zero_element(spec);
    e.blocks[block] = x * y.adjoint();
    return e;
}

inline int span_rank(const std::vector<Element>& elems) {
    if (elems.empty()) return 0;
    const int dim = elems.front().algebra.total_dim();
    Matrix m(dim, int(elems.size()));
    for (std::size_t c = 0; c < elems.size(); ++c) {
        int r = 0;
        for (const Matrix& blk : elems[c].blocks)
            for (int i = 0; i < blk.rows(); ++i)
                for (int j = 0; j < blk.cols(); ++j) m(r++, int(c)) = blk(i, j);
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(m);
    qr.setThreshold(kRankTol);
    return int(qr.rank());
}

} // namespace detail

// Domain subspaces of a positive weight, with the structural properties
// (ideal closure, M_phi = span of N_phi* N_phi) verified on the computed
// bases before returning.
inline WeightDomains weight_domains(const FunctionalSpec& f) {
    if (!f.is_positive_functional)
        throw NotPositive("weight_domains: functional is not positive");
    const AlgebraSpec& spec = f.algebra;
    WeightDomains wd;
    wd.corner_projection = sub(identity_element(spec), f.infinite_part);
    wd.f_phi_description = "F_phi = pMp intersect M_+ with p = 1 - P_inf";

    const Element support_total = support_projection(add(f.density, f.infinite_part));
    for (std::size_t k = 0; k < spec.block_count(); ++k) {
        const int n = spec.block_dims[k];
        const auto corner = detail::split_eigenvectors(f.infinite_part.blocks[k], true);
        const auto null_dirs = detail::split_eigenvectors(support_total.blocks[k], true);
        for (int i = 0; i < n; ++i) {
            Vector ei = Vector::Zero(n);
            ei(i) = 1.0;
            for (const Vector& w : corner)
                wd.n_phi_basis.push_back(detail::rank_one(spec, k, ei, w));
            for (const Vector& w : null_dirs)
                wd.null_ideal_basis.push_back(detail::rank_one(spec, k, ei, w));
        }
        for (const Vector& wi : corner)
            for (const Vector& wj : corner)
                wd.m_phi_basis.push_back(detail::rank_one(spec, k, wi, wj));
    }

    const double tol = kSpectralTol * (1.0 + operator_norm(f.density));
    for (const Element& a : wd.n_phi_basis)
        if (operator_norm(mul(a, f.infinite_part)) > tol)
            throw Error("weight_domains: N_phi basis element escapes the kernel constraint");
    for (const Element& a : wd.null_ideal_basis) {
        if (operator_norm(mul(a, f.density)) > tol ||
            operator_norm(mul(a, f.infinite_part)) > tol)
            throw Error("weight_domains: null ideal basis element fails A F = 0");
    }
    // M_phi lands in N_phi and N_phi*, which contains F_phi.
    for (const Element& x : wd.m_phi_basis) {
        if (operator_norm(mul(x, f.infinite_part)) > tol ||
            operator_norm(mul(adjoint(x), f.infinite_part)) > tol)
            throw Error("weight_domains: M_phi basis element escapes N_phi or N_phi*");
    }
    // Left ideal closure on sampled products and the span identity
    // M_phi = span { B* A : A, B in N_phi }.
    std::vector<Element> products;
    for (const Element& a : wd.n_phi_basis)
        for (const Element& b : wd.n_phi_basis)
            products.push_back(mul(adjoint(b), a));
    if (!wd.n_phi_basis.empty()) {
        for (const Element& c : matrix_unit_basis(spec)) {
            const Element ca = mul(c, wd.n_phi_basis.front());
            if (operator_norm(mul(ca, f.infinite_part)) > tol)
                throw Error("weight_domains: left ideal closure fails");
        }
        if (detail::span_rank(products) != int(wd.m_phi_basis.size()))
            throw Error("weight_domains: span of N_phi* N_phi does not match M_phi");
    }
    return wd;
}

struct FunctionalPolarData {
    Element u;              // partial isometry from the density's polar decomposition
    FunctionalSpec modulus; // positive part |phi| with density |F|
};

// phi(A) = |phi|(A U) and |phi|(A) = phi(A U*), with F = U |F| blockwise.
// Both identities are verified on the matrix-unit basis before returning.
inline FunctionalPolarData functional_polar(const FunctionalSpec& f) {
    if (!is_bounded(f))
        throw UnboundedWeight("functional_polar: infinite part present");
    const PolarData pd = polar_decomposition(f.density);
    FunctionalPolarData out{pd.u, make_bounded_functional(pd.abs)};
    for (const Element& e : matrix_unit_basis(f.algebra)) {
        const cdouble lhs1 = trace_eval(mul(f.density, e));
        const cdouble rhs1 = trace_eval(mul(pd.abs, mul(e, pd.u)));
        const cdouble lhs2 = trace_eval(mul(pd.abs, e));
        const cdouble rhs2 = trace_eval(mul(f.density, mul(e, adjoint(pd.u))));
        if (std::abs(lhs1 - rhs1) > kSpectralTol || std::abs(lhs2 - rhs2) > kSpectralTol)
            throw Error("functional_polar: reconstruction identity fails on basis");
    }
    return out;
}

// |phi(A H)| <= ||H|| phi(A) over a positive test set, provided the induced
// functional A -> phi(A H) is self-adjoint; without that hypothesis the bound
// is not asserted and the check refuses to run.
inline bool dominated_bound_check(const FunctionalSpec& f, const Element& h,
                                  std::uint64_t seed = 20260823u) {
    if (!f.is_positive_functional)
        throw NotPositive("dominated_bound_check: functional is not positive");
    if (!is_bounded(f))
        throw UnboundedWeight("dominated_bound_check: weight must be bounded");
    check_same_algebra(f.density, h, "dominated_bound_check");

    const double tol = kSpectralTol * (1.0 + operator_norm(h)) * (1.0 + functional_norm(f));
    for (const Element& e : matrix_unit_basis(f.algebra)) {
        const cdouble v = trace_eval(mul(f.density, mul(e, h)));
        const cdouble w = trace_eval(mul(f.density, mul(adjoint(e), h)));
        if (std::abs(v - std::conj(w)) > tol)
            throw PreconditionFailed("dominated_bound_check: induced functional is not self-adjoint");
    }

    std::vector<Element> test_set;
    for (std::size_t k = 0; k < f.algebra.block_count(); ++k) {
        const int n = f.algebra.block_dims[k];
        for (int i = 0; i < n; ++i) {
            Vector ei = Vector::Zero(n);
            ei(i) = 1.0;
            test_set.push_back(detail::rank_one(f.algebra, k, ei, ei));
            for (int j = i + 1; j < n; ++j) {
                Vector ej = Vector::Zero(n);
                ej(j) = 1.0;
                const Vector sum = (ei + ej) / std::sqrt(2.0);
                const Vector tw = (ei + cdouble(0.0, 1.0) * ej) / std::sqrt(2.0);
                test_set.push_back(detail::rank_one(f.algebra, k, sum, sum));
                test_set.push_back(detail::rank_one(f.algebra, k, tw, tw));
            }
        }
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        Element g = zero_element(f.algebra);
        for (Matrix& blk : g.blocks)
            for (int i = 0; i < blk.rows(); ++i)
                for (int j = 0; j < blk.cols(); ++j)
                    blk(i, j) = cdouble(gauss(rng), gauss(rng));
        const Element sa = scalar_mul(0.5, add(g, adjoint(g)));
        const SpectralData sd = spectral_decomposition(sa);
        for (const Element& p : sd.projections) test_set.push_back(p);
    }

    const double hn = operator_norm(h);
    for (const Element& a : test_set) {
        const double lhs = std::abs(trace_eval(mul(f.density, mul(a, h))));
        const double rhs = hn * trace_eval(mul(f.density, a)).real();
        if (lhs > rhs + tol) return false;
    }
    return true;
}

// Doubled algebra M_2(M): every block dimension doubled, weights kept.
inline AlgebraSpec amplify(const AlgebraSpec& spec) {
    std::vector<int> dims;
    dims.reserve(spec.block_count());
    for (int d : spec.block_dims) dims.push_back(2 * d);
    return AlgebraSpec(dims, spec.trace_weights);
}

// Embeds a at corner (row, col) of the doubled algebra, row, col in {0, 1}.
inline Element corner_embed(const Element& a, int row, int col) {
    const AlgebraSpec big = amplify(a.algebra);
    Element out = zero_element(big);
    for (std::size_t k = 0; k < a.blocks.size(); ++k) {
        const int n = a.algebra.block_dims[k];
        out.blocks[k].block(row * n, col * n, n, n) = a.blocks[k];
    }
    return out;
}

inline Element corner_extract(const Element& big, const AlgebraSpec& small_spec, int row, int col) {
    Element out = zero_element(small_spec);
    for (std::size_t k = 0; k < small_spec.block_count(); ++k) {
        const int n = small_spec.block_dims[k];
        out.blocks[k] = big.blocks[k].block(row * n, col * n, n, n);
    }
    return out;
}

// Balanced weight theta(A) = phi(A_11) + psi(A_22) on M_2(M), carried by the
// block-diagonal density diag(F_phi, F_psi) and infinite part diag(P, Q).
// theta is faithful exactly when both inputs are; the construction checks
// that equivalence on the instance.
inline FunctionalSpec balanced_weight(const FunctionalSpec& f, const FunctionalSpec& g) {
    if (f.algebra != g.algebra)
        throw AlgebraMismatch("balanced_weight: functionals over different algebras");
    const Element density = add(corner_embed(f.density, 0, 0), corner_embed(g.density, 1, 1));
    const Element infinite = add(corner_embed(f.infinite_part, 0, 0), corner_embed(g.infinite_part, 1, 1));
    FunctionalSpec theta = make_functional(density, infinite);
    if (f.is_positive_functional && g.is_positive_functional) {
        if (is_faithful(theta) != (is_faithful(f) && is_faithful(g)))
            throw Error("balanced_weight: faithfulness equivalence fails");
    }
    return theta;
}

} // namespace nclp
