#pragma once

// Modular data of a faithful state, the modular flow, the KMS boundary
// condition, centralizers, and Gaussian regularization of analytic elements.
//
// On the GNS space of a faithful state phi with density rho, the antilinear
// map S: [A] -> [A*] factors as S = J Delta^{1/2} with Delta = S*S. The
// antilinear adjoint is taken after realification: an antilinear z -> M
// conj(z) becomes the real 2d x 2d matrix [[Re M, Im M], [Im M, -Re M]], a
// plain transpose there is the antilinear adjoint, and the real polar
// decomposition of S splits into J and Delta^{1/2}.
//
// The flow is sigma_t(A) = rho^{-it} A rho^{it}. Sign orientation: with this
// choice F(z) = phi(A sigma_z(B)) is entire and satisfies both boundary
// lines F(t) = phi(A sigma_t(B)) and F(t+i) = phi(sigma_t(B) A); the
// opposite sign meets them on the reflected strip. Substituting
// rho^{-i(t+i)} = rho rho^{-it} turns F(t+i) into tau(A rho sigma_t(B)),
// which is phi(sigma_t(B) A) by cyclicity, so the orientation is forced.
//
// Gaussian regularization A_n = sqrt(n/pi) integral e^{-n t^2} sigma_t(A) dt
// is evaluated by Gauss-Hermite quadrature and cross-checked against the
// closed form that scales each rho-eigenbasis entry A_{ij} by
// exp(-(log(rho_i/rho_j))^2 / (4n)).

#include <cmath>
#include <vector>

#include "nclp/algebra.hpp"
#include "nclp/functionals.hpp"
#include "nclp/gns.hpp"
#include "nclp/spectral.hpp"

namespace nclp {

// Antilinear map on GNS coordinates: z -> m * conj(z).
struct AntilinearMap {
    Matrix m;
    Vector apply(const Vector& z) const { return m * z.conjugate(); }
};

struct ModularData {
    GnsData gns;
    AntilinearMap S; // [A] -> [A*]
    AntilinearMap J; // isometric involution
    Matrix delta;    // positive, delta = S*S
    Element rho;     // flow generator, the state's density
    SpectralData rho_spectral;
};

namespace detail {

inline Eigen::MatrixXd realify_antilinear(const Matrix& m) {
    const int d = int(m.rows());
    Eigen::MatrixXd r(2 * d, 2 * d);
    r.topLeftCorner(d, d) = m.real();
    r.topRightCorner(d, d) = m.imag();
    r.bottomLeftCorner(d, d) = m.imag();
    r.bottomRightCorner(d, d) = -m.real();
    return r;
}

inline Matrix delinearify(const Eigen::MatrixXd& r, bool antilinear, double tol, const char* who) {
    const int d = int(r.rows()) / 2;
    const Eigen::MatrixXd tl = r.topLeftCorner(d, d), tr = r.topRightCorner(d, d);
    const Eigen::MatrixXd bl = r.bottomLeftCorner(d, d), br = r.bottomRightCorner(d, d);
    const double defect = antilinear ? (tr - bl).norm() + (br + tl).norm()
                                     : (tr + bl).norm() + (br - tl).norm();
    if (defect > tol)
        throw Error(std::string(who) + ": realified matrix lost its complex structure");
    Matrix m(d, d);
    m.real() = tl;
    m.imag() = bl;
    return m;
}

inline void require_faithful_state(const FunctionalSpec& f, const char* who) {
    if (!is_state(f))
        throw NotAState(std::string(who) + ": functional is not a state");
    const double tol = kSpectralTol * (1.0 + operator_norm(f.density));
    if (min_eigenvalue(f.density) <= tol)
        throw NotFaithful(std::string(who) + ": density is singular");
}

inline void require_faithful_bounded(const FunctionalSpec& f, const char* who) {
    if (!f.is_positive_functional)
        throw NotPositive(std::string(who) + ": functional is not positive");
    if (!is_bounded(f))
        throw NotFaithful(std::string(who) + ": infinite part admits no finite flow generator");
    const double tol = kSpectralTol * (1.0 + operator_norm(f.density));
    if (min_eigenvalue(f.density) <= tol)
        throw NotFaithful(std::string(who) + ": density is singular");
}

// rho^{-iz} a rho^{iz} from a fixed resolution of rho; z may be complex.
inline Element flow_from_spectral(const SpectralData& sd, const AlgebraSpec& spec,
                                  const Element& a, cdouble z) {
    const cdouble iz(0.0, 1.0);
    Element left = zero_element(spec), right = zero_element(spec);
    for (std::size_t i = 0; i < sd.eigenvalues.size(); ++i) {
        const double lg = std::log(sd.eigenvalues[i]);
        left = add(left, scalar_mul(std::exp(-iz * z * lg), sd.projections[i]));
        right = add(right, scalar_mul(std::exp(iz * z * lg), sd.projections[i]));
    }
    return mul(left, mul(a, right));
}

} // namespace detail

inline ModularData modular_data(const FunctionalSpec& f) {
    detail::require_faithful_state(f, "modular_data");
    ModularData md;
    md.gns = gns_construct(f);
    md.rho = f.density;
    md.rho_spectral = spectral_decomposition(md.rho);

    const std::size_t m = md.gns.domain_basis.size();
    Matrix adj_coords(m, m);
    for (std::size_t i = 0; i < m; ++i)
        adj_coords.col(i) = md.gns.coords(adjoint(md.gns.domain_basis[i]));
    md.S.m = md.gns.basis_map * adj_coords * md.gns.lift_map.conjugate();

    const Eigen::MatrixXd s_real = detail::realify_antilinear(md.S.m);
    const Eigen::MatrixXd delta_real = s_real.transpose() * s_real;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(delta_real);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw NotFaithful("modular_data: S is singular, Delta has no inverse square root");
    Eigen::MatrixXd root = Eigen::MatrixXd::Zero(delta_real.rows(), delta_real.cols());
    Eigen::MatrixXd inv_root = root;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        const Eigen::VectorXd v = es.eigenvectors().col(i);
        root += std::sqrt(es.eigenvalues()(i)) * v * v.transpose();
        inv_root += (1.0 / std::sqrt(es.eigenvalues()(i))) * v * v.transpose();
    }
    const Eigen::MatrixXd j_real = s_real * inv_root;

    const double scale = 1e-8 * (1.0 + delta_real.norm());
    md.delta = detail::delinearify(delta_real, false, scale, "modular_data(Delta)");
    md.J.m = detail::delinearify(j_real, true, scale, "modular_data(J)");
    const Matrix half = detail::delinearify(root, false, scale, "modular_data(Delta^1/2)");
    const Matrix inv_half = detail::delinearify(inv_root, false, scale, "modular_data(Delta^-1/2)");

    const int d = md.gns.dim;
    if ((md.J.m * md.J.m.conjugate() - Matrix::Identity(d, d)).norm() > scale)
        throw Error("modular_data: J fails to be an involution");
    if ((md.S.m - md.J.m * half.conjugate()).norm() > scale)
        throw Error("modular_data: S deviates from J Delta^{1/2}");
    if ((md.J.m * half.conjugate() * md.J.m.conjugate() - inv_half).norm() > scale)
        throw Error("modular_data: J Delta^{1/2} J deviates from Delta^{-1/2}");
    if ((md.delta * md.gns.cyclic_vector - md.gns.cyclic_vector).norm() >
        scale * (1.0 + md.gns.cyclic_vector.norm()))
        throw Error("modular_data: Delta does not fix the cyclic vector");
    return md;
}

inline Element modular_flow(const FunctionalSpec& f, const Element& a, double t) {
    detail::require_faithful_state(f, "modular_flow");
    check_same_algebra(f.density, a, "modular_flow");
    const SpectralData sd = spectral_decomposition(f.density);
    return detail::flow_from_spectral(sd, f.algebra, a, cdouble(t, 0.0));
}

struct KmsResult {
    double max_residual = 0.0;
    bool holds = false;
};

// Both boundary lines of the modular condition, checked at each sample:
// F(t) against the real-flow evaluation and F(t+i) against phi(sigma_t(B)A),
// where F(z) = phi(A rho^{-iz} B rho^{iz}) comes from functional calculus at
// complex arguments.
inline KmsResult kms_check(const FunctionalSpec& f, const Element& a, const Element& b,
                           const std::vector<double>& t_samples) {
    detail::require_faithful_state(f, "kms_check");
    check_same_algebra(f.density, a, "kms_check");
    check_same_algebra(f.density, b, "kms_check");
    const SpectralData sd = spectral_decomposition(f.density);
    const auto phi = [&](const Element& x) { return trace_eval(mul(f.density, x)); };
    KmsResult res;
    for (double t : t_samples) {
        const Element sig_b = detail::flow_from_spectral(sd, f.algebra, b, cdouble(t, 0.0));
        // Lower line: F(t) against the real-flow evaluation. In finite
        // dimension both sides ride the same resolution of rho, so this
        // residual only catches plumbing faults.
        const cdouble f_t = phi(mul(a, detail::flow_from_spectral(sd, f.algebra, b, cdouble(t, 0.0))));
        res.max_residual = std::max(res.max_residual, std::abs(f_t - phi(mul(a, sig_b))));
        // Upper line: the analytic continuation to t + i must land on
        // phi(sigma_t(B) A); this is the content of the modular condition.
        const cdouble f_ti = phi(mul(a, detail::flow_from_spectral(sd, f.algebra, b, cdouble(t, 1.0))));
        res.max_residual = std::max(res.max_residual, std::abs(f_ti - phi(mul(sig_b, a))));
    }
    res.holds = res.max_residual <= kResidualTol * (1.0 + operator_norm(a) * operator_norm(b));
    return res;
}

struct CentralizerData {
    std::vector<Element> basis;
    int dimension = 0;
};

// Commutant of the density inside M: within each block, all pairs of
// eigenvectors from one eigenvalue cluster of rho contribute a rank-one
// basis element. The trace-likeness phi(AB) = phi(BA) over M is verified on
// the matrix-unit basis before returning.
inline CentralizerData centralizer(const FunctionalSpec& f) {
    detail::require_faithful_bounded(f, "centralizer");
    const Element& rho = f.density;
    const double tol = kSpectralTol * (1.0 + operator_norm(rho));
    CentralizerData cd;
    for (std::size_t k = 0; k < rho.blocks.size(); ++k) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(rho.blocks[k]);
        const int n = int(rho.blocks[k].rows());
        int i = 0;
        while (i < n) {
            int j = i + 1;
            while (j < n && es.eigenvalues()(j) - es.eigenvalues()(j - 1) <= tol) ++j;
            for (int r = i; r < j; ++r)
                for (int c = i; c < j; ++c) {
                    Element e = zero_element(f.algebra);
                    e.blocks[k] = es.eigenvectors().col(r) * es.eigenvectors().col(c).adjoint();
                    cd.basis.push_back(std::move(e));
                }
            i = j;
        }
    }
    cd.dimension = int(cd.basis.size());
    for (const Element& x : cd.basis) {
        if (commutator_norm(x, rho) > 16.0 * tol)
            throw Error("centralizer: basis element drifts out of the commutant");
        for (const Element& b : matrix_unit_basis(f.algebra)) {
            const cdouble lhs = trace_eval(mul(f.density, mul(x, b)));
            const cdouble rhs = trace_eval(mul(f.density, mul(b, x)));
            if (std::abs(lhs - rhs) > 16.0 * tol)
                throw Error("centralizer: trace-likeness fails on a basis element");
        }
    }
    return cd;
}

namespace detail {

// Nodes and weights for integral e^{-x^2} g(x) dx via the Jacobi matrix of
// the Hermite recurrence.
inline void gauss_hermite(int points, std::vector<double>& nodes, std::vector<double>& weights) {
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(points, points);
    for (int k = 0; k + 1 < points; ++k) {
        const double off = std::sqrt(0.5 * (k + 1));
        jac(k, k + 1) = off;
        jac(k + 1, k) = off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
    nodes.resize(points);
    weights.resize(points);
    const double sqrt_pi = std::sqrt(M_PI);
    for (int i = 0; i < points; ++i) {
        nodes[i] = es.eigenvalues()(i);
        const double first = es.eigenvectors()(0, i);
        weights[i] = sqrt_pi * first * first;
    }
}

inline Element smoothed_at(const SpectralData& sd, const AlgebraSpec& spec, const Element& a,
                           double n, double z, const std::vector<double>& nodes,
                           const std::vector<double>& weights) {
    Element acc = zero_element(spec);
    const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double t = nodes[i] / std::sqrt(n) + z;
        acc = add(acc, scalar_mul(weights[i] * inv_sqrt_pi,
                                  flow_from_spectral(sd, spec, a, cdouble(t, 0.0))));
    }
    return acc;
}

} // namespace detail

// A_n at z = 0 by quadrature, verified against the eigenbasis closed form
// and the covariance identity alpha_y(A_n) = A_n(y); disagreement beyond the
// budget reports insufficient quadrature rather than a silently wrong value.
inline Element gaussian_regularization(const FunctionalSpec& f, const Element& a, double n,
                                       int quadrature_points) {
    detail::require_faithful_state(f, "gaussian_regularization");
    check_same_algebra(f.density, a, "gaussian_regularization");
    if (!(n > 0.0))
        throw PreconditionFailed("gaussian_regularization: n must be positive");
    if (quadrature_points < 32)
        throw PreconditionFailed("gaussian_regularization: need at least 32 quadrature points");

    std::vector<double> nodes, weights;
    detail::gauss_hermite(quadrature_points, nodes, weights);
    const SpectralData sd = spectral_decomposition(f.density);
    const Element quad = detail::smoothed_at(sd, f.algebra, a, n, 0.0, nodes, weights);

    Element closed = zero_element(f.algebra);
    for (std::size_t k = 0; k < a.blocks.size(); ++k) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(f.density.blocks[k]);
        const Matrix tilted = es.eigenvectors().adjoint() * a.blocks[k] * es.eigenvectors();
        Matrix damped = tilted;
        for (int i = 0; i < tilted.rows(); ++i)
            for (int j = 0; j < tilted.cols(); ++j) {
                const double w = std::log(es.eigenvalues()(i) / es.eigenvalues()(j));
                damped(i, j) *= std::exp(-w * w / (4.0 * n));
            }
        closed.blocks[k] = es.eigenvectors() * damped * es.eigenvectors().adjoint();
    }
    if (norm_distance(quad, closed) > kQuadratureTol * (1.0 + operator_norm(a)))
        throw QuadratureUnderflow("gaussian_regularization: quadrature misses the closed form");

    for (double y : {0.5, -1.0}) {
        const Element shifted = detail::smoothed_at(sd, f.algebra, a, n, y, nodes, weights);
        const Element flowed = detail::flow_from_spectral(sd, f.algebra, quad, cdouble(y, 0.0));
        if (norm_distance(shifted, flowed) > kQuadratureTol * (1.0 + operator_norm(a)))
            throw QuadratureUnderflow("gaussian_regularization: covariance check fails at shifted centers");
    }
    return quad;
}

} // namespace nclp
