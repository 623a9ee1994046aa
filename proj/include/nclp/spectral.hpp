#pragma once

// Spectral resolution and functional calculus on self-adjoint elements.
//
// A self-adjoint A decomposes as  A = sum_i lambda_i P_i  with distinct real
// eigenvalues and mutually orthogonal projections summing to the identity.
// Eigenvalues closer than the relative clustering tolerance merge into one
// spectral point; their eigenspaces merge into one projection. The scalar
// calculus  f(A) = sum_i f(lambda_i) P_i  is a *-homomorphism on functions of
// a fixed A, and it carries every fractional power, spectral cut and unitary
// one-parameter group used by the higher modules.
//
// Polar decomposition A = u|A| uses |A| = (A*A)^{1/2} from the calculus and a
// per-block SVD for the partial isometry u, with u set to zero on ker|A| so
// the output is unique.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "nclp/algebra.hpp"

namespace nclp {

struct SpectralData {
    std::vector<double> eigenvalues;  // ascending, pairwise separated beyond tolerance
    std::vector<Element> projections; // same length; orthogonal; sum to identity
    double source_norm = 0.0;
};

namespace detail {

struct EigenPair {
    std::size_t block;
    double value;
    Vector vec;
};

} // namespace detail

// Clustered eigendecomposition. Requires a self-adjoint within
// kSpectralTol*(1+||a||); eigenvalues within that tolerance of each other
// merge into one spectral point whose projection spans the merged eigenspaces
// across all blocks.
inline SpectralData spectral_decomposition(const Element& a) {
    const double scale = operator_norm(a);
    const double tol = kSpectralTol * (1.0 + scale);
    if (!is_self_adjoint(a, tol))
        throw NotSelfAdjoint("spectral_decomposition: defect " + std::to_string(herm_defect(a)));

    std::vector<detail::EigenPair> pairs;
    for (std::size_t k = 0; k < a.blocks.size(); ++k) {
        const Matrix h = 0.5 * (a.blocks[k] + a.blocks[k].adjoint());
        Eigen::SelfAdjointEigenSolver<Matrix> es(h);
        if (es.info() != Eigen::Success)
            throw Error("spectral_decomposition: eigensolver failed");
        for (int i = 0; i < h.rows(); ++i)
            pairs.push_back({k, es.eigenvalues()(i), es.eigenvectors().col(i)});
    }
    std::sort(pairs.begin(), pairs.end(),
              [](const detail::EigenPair& x, const detail::EigenPair& y) { return x.value < y.value; });

    SpectralData sd;
    sd.source_norm = scale;
    std::size_t i = 0;
    while (i < pairs.size()) {
        std::size_t j = i + 1;
        while (j < pairs.size() && pairs[j].value - pairs[j - 1].value <= tol) ++j;
        double lambda = 0.0;
        Element proj = zero_element(a.algebra);
        for (std::size_t m = i; m < j; ++m) {
            lambda += pairs[m].value;
            proj.blocks[pairs[m].block] += pairs[m].vec * pairs[m].vec.adjoint();
        }
        sd.eigenvalues.push_back(lambda / double(j - i));
        sd.projections.push_back(std::move(proj));
        i = j;
    }

    // Reconstruction is an invariant of the type, not a property of lucky
    // inputs; a failure here means the cluster widths drifted past budget.
    Element rec = zero_element(a.algebra);
    for (std::size_t m = 0; m < sd.eigenvalues.size(); ++m)
        rec = add(rec, scalar_mul(sd.eigenvalues[m], sd.projections[m]));
    if (norm_distance(rec, a) > 16.0 * tol)
        throw Error("spectral_decomposition: reconstruction defect exceeds budget");
    return sd;
}

// f(A) from a precomputed resolution of A. f may be real- or complex-valued.
template <typename F>
Element apply_function(const SpectralData& sd, const AlgebraSpec& spec, F&& f) {
    Element out = zero_element(spec);
    for (std::size_t i = 0; i < sd.eigenvalues.size(); ++i)
        out = add(out, scalar_mul(cdouble(f(sd.eigenvalues[i])), sd.projections[i]));
    return out;
}

template <typename F>
Element functional_calculus(F&& f, const Element& a) {
    return apply_function(spectral_decomposition(a), a.algebra, std::forward<F>(f));
}

inline double min_eigenvalue(const Element& a) {
    double m = std::numeric_limits<double>::infinity();
    for (const Matrix& blk : a.blocks) {
        const Matrix h = 0.5 * (blk + blk.adjoint());
        Eigen::SelfAdjointEigenSolver<Matrix> es(h);
        m = std::min(m, es.eigenvalues().minCoeff());
    }
    return m;
}

enum class PositivityCriterion { spectral, norm_distance };

// Positivity through either the eigenvalue floor or the norm distance
// ||1 - A/||A|| || <= 1. Both demand self-adjointness and tolerate a negative
// part of at most kSpectralTol*(1+||a||); the zero element counts as positive
// under both by convention.
inline bool is_positive(const Element& a, PositivityCriterion criterion) {
    const double scale = operator_norm(a);
    const double tol = kSpectralTol * (1.0 + scale);
    if (!is_self_adjoint(a, tol)) return false;
    if (scale <= tol) return true;
    if (criterion == PositivityCriterion::spectral)
        return min_eigenvalue(a) >= -tol;
    const Element gap = sub(identity_element(a.algebra), scalar_mul(1.0 / scale, a));
    return operator_norm(gap) <= 1.0 + tol / scale;
}

inline bool is_positive(const Element& a) {
    const bool s = is_positive(a, PositivityCriterion::spectral);
    const bool n = is_positive(a, PositivityCriterion::norm_distance);
    if (s != n)
        throw Error("is_positive: criteria disagree");
    return s;
}

inline void require_positive(const Element& a, const char* who) {
    if (!is_positive(a, PositivityCriterion::spectral))
        throw NotPositive(std::string(who) + ": operand has a negative part beyond tolerance");
}

// sqrt(A) for positive A. Eigenvalues in [-tol, 0] clamp to 0; anything more
// negative is a genuine domain violation.
inline Element element_sqrt(const Element& a) {
    const double tol = kSpectralTol * (1.0 + operator_norm(a));
    return functional_calculus(
        [tol](double t) {
            if (t < -tol) throw DomainError("sqrt of negative eigenvalue " + std::to_string(t));
            return std::sqrt(std::max(t, 0.0));
        },
        a);
}

// A^p for positive A with the same clamp. Negative exponents require the
// spectrum to stay clear of zero.
inline Element element_pow(const Element& a, double p) {
    const double tol = kSpectralTol * (1.0 + operator_norm(a));
    return functional_calculus(
        [tol, p](double t) {
            if (t < -tol) throw DomainError("power of negative eigenvalue " + std::to_string(t));
            const double c = std::max(t, 0.0);
            if (c <= tol && p < 0.0)
                throw DomainError("negative power of a singular element");
            if (c == 0.0) return p == 0.0 ? 1.0 : 0.0;
            return std::pow(c, p);
        },
        a);
}

struct PolarData {
    Element u;   // partial isometry, zero on ker|a|
    Element abs; // |a| = (a* a)^{1/2}, positive
};

inline Element absolute_value(const Element& a) {
    return element_sqrt(mul(adjoint(a), a));
}

// a = u|a| with u*u the right support and uu* the left support. The rank cut
// for the kernel uses kRankTol relative to the largest singular value.
inline PolarData polar_decomposition(const Element& a) {
    PolarData pd{zero_element(a.algebra), absolute_value(a)};
    const double scale = operator_norm(a);
    const double cut = kRankTol * (1.0 + scale);
    for (std::size_t k = 0; k < a.blocks.size(); ++k) {
        Eigen::JacobiSVD<Matrix> svd(a.blocks[k], Eigen::ComputeFullU | Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        Matrix u = Matrix::Zero(a.blocks[k].rows(), a.blocks[k].cols());
        for (int i = 0; i < sv.size(); ++i)
            if (sv(i) > cut)
                u += svd.matrixU().col(i) * svd.matrixV().col(i).adjoint();
        pd.u.blocks[k] = u;
    }
    if (norm_distance(mul(pd.u, pd.abs), a) > 16.0 * kSpectralTol * (1.0 + scale))
        throw Error("polar_decomposition: reconstruction defect exceeds budget");
    return pd;
}

// Support projection of a self-adjoint element: the spectral projection onto
// eigenvalues separated from zero.
inline Element support_projection(const Element& a) {
    const double tol = kSpectralTol * (1.0 + operator_norm(a));
    return functional_calculus([tol](double t) { return std::abs(t) > tol ? 1.0 : 0.0; }, a);
}

inline bool is_projection(const Element& p, double tol) {
    if (!is_self_adjoint(p, tol)) return false;
    return norm_distance(mul(p, p), p) <= tol;
}

inline void require_projection(const Element& p, const char* who) {
    const double tol = kSpectralTol * (1.0 + operator_norm(p));
    if (!is_projection(p, std::max(tol, kSpectralTol)))
        throw NotAProjection(std::string(who) + ": operand fails the self-adjoint idempotent check");
}

// Spectral cut E_{[0,n)} A E_{[0,n)} of a positive element: keeps the part of
// the spectrum below the cap.
inline Element spectral_cap(const Element& a, double cap) {
    require_positive(a, "spectral_cap");
    return functional_calculus([cap](double t) { return (t >= 0.0 && t < cap) ? t : 0.0; }, a);
}

enum class LatticeOp { meet, join };

namespace detail {

// Intersection of ranges per block: x lies in range(p) and range(q) exactly
// when the stacked constraint [(1-p); (1-q)] annihilates x. The meet is the
// projection onto that null space, read off from the small singular values.
inline Matrix block_meet(const Matrix& p, const Matrix& q) {
    const int n = int(p.rows());
    Matrix stacked(2 * n, n);
    stacked.topRows(n) = Matrix::Identity(n, n) - p;
    stacked.bottomRows(n) = Matrix::Identity(n, n) - q;
    Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    Matrix meet = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const double s = i < sv.size() ? sv(i) : 0.0;
        if (s < kRankTol)
            meet += svd.matrixV().col(i) * svd.matrixV().col(i).adjoint();
    }
    return meet;
}

} // namespace detail

inline Element projection_lattice(const Element& p, const Element& q, LatticeOp op) {
    check_same_algebra(p, q, "projection_lattice");
    require_projection(p, "projection_lattice");
    require_projection(q, "projection_lattice");
    Element out = zero_element(p.algebra);
    if (op == LatticeOp::meet) {
        for (std::size_t k = 0; k < p.blocks.size(); ++k)
            out.blocks[k] = detail::block_meet(p.blocks[k], q.blocks[k]);
        return out;
    }
    const Element one = identity_element(p.algebra);
    return sub(one, projection_lattice(sub(one, p), sub(one, q), LatticeOp::meet));
}

inline int projection_rank(const Matrix& p) {
    return int(std::lround(p.trace().real()));
}

struct MvResult {
    bool equivalent = false;
    std::optional<Element> witness; // u with u*u = p, uu* = q when equivalent
};

// Murray-von Neumann equivalence. In a finite direct sum of matrix factors
// this is blockwise rank equality; the witness maps an orthonormal basis of
// range(p) onto one of range(q) block by block.
inline MvResult mv_equivalent(const Element& p, const Element& q) {
    check_same_algebra(p, q, "mv_equivalent");
    require_projection(p, "mv_equivalent");
    require_projection(q, "mv_equivalent");
    MvResult res;
    Element u = zero_element(p.algebra);
    for (std::size_t k = 0; k < p.blocks.size(); ++k) {
        Eigen::SelfAdjointEigenSolver<Matrix> ep(p.blocks[k]), eq(q.blocks[k]);
        const int n = int(p.blocks[k].rows());
        std::vector<int> pcols, qcols;
        for (int i = 0; i < n; ++i) {
            if (ep.eigenvalues()(i) > 0.5) pcols.push_back(i);
            if (eq.eigenvalues()(i) > 0.5) qcols.push_back(i);
        }
        if (pcols.size() != qcols.size()) return res;
        Matrix ub = Matrix::Zero(n, n);
        for (std::size_t r = 0; r < pcols.size(); ++r)
            ub += eq.eigenvectors().col(qcols[r]) * ep.eigenvectors().col(pcols[r]).adjoint();
        u.blocks[k] = ub;
    }
    res.equivalent = true;
    res.witness = std::move(u);
    return res;
}

} // namespace nclp
