#pragma once

// GNS construction for positive functionals and weights.
//
// The pre-Hilbert structure lives on N_phi = {A : phi(A*A) finite} with
// <[A],[B]> = phi(B*A). On a fixed basis {B_i} of N_phi the Gram matrix
// G(r,c) = phi(B_r* B_c) carries the whole construction: its null space is
// exactly the null ideal, removed by an eigendecomposition cut at
// 1e-10 * (top eigenvalue), and the surviving eigenpairs provide orthonormal
// GNS coordinates. The representation acts by left multiplication on
// representatives; the cyclic vector is the class of the identity, or of the
// support projection of the density when the identity has infinite mass.
//
// Every structural invariant (state reconstruction from the cyclic vector,
// *-homomorphism on sampled pairs, cyclicity rank) is verified before a
// GnsData leaves the constructor.

#include <string>
#include <vector>

#include "nclp/algebra.hpp"
#include "nclp/functionals.hpp"
#include "nclp/spectral.hpp"

namespace nclp {

struct GnsData {
    FunctionalSpec functional;
    std::vector<Element> domain_basis; // basis of N_phi
    Matrix gram;                       // G(r,c) = phi(B_r* B_c)
    Matrix basis_map;                  // T: domain coordinates -> GNS coordinates
    Matrix lift_map;                   // right inverse of basis_map
    Vector cyclic_vector;
    int dim = 0;

    // Coordinates of a in the domain basis. Rejects elements outside N_phi.
    Vector coords(const Element& a) const {
        const std::size_t m = domain_basis.size();
        Vector x = Vector::Zero(m);
        for (std::size_t j = 0; j < m; ++j) {
            cdouble v(0.0, 0.0);
            for (std::size_t k = 0; k < a.blocks.size(); ++k)
                v += (domain_basis[j].blocks[k].adjoint() * a.blocks[k]).trace();
            x(j) = v;
        }
        Element rec = zero_element(a.algebra);
        for (std::size_t j = 0; j < m; ++j)
            rec = add(rec, scalar_mul(x(j), domain_basis[j]));
        if (norm_distance(rec, a) > kSpectralTol * (1.0 + operator_norm(a)))
            throw Error("GnsData::coords: element lies outside N_phi");
        return x;
    }

    Vector embed(const Element& a) const { return basis_map * coords(a); }

    Element lift(const Vector& z) const {
        const Vector x = lift_map * z;
        Element rep = zero_element(functional.algebra);
        for (std::size_t j = 0; j < domain_basis.size(); ++j)
            rep = add(rep, scalar_mul(x(j), domain_basis[j]));
        return rep;
    }

    // pi(c) in GNS coordinates; left multiplication on representatives.
    Matrix represent(const Element& c) const {
        const std::size_t m = domain_basis.size();
        Matrix left = Matrix::Zero(m, m);
        for (std::size_t i = 0; i < m; ++i) {
            const Element cb = mul(c, domain_basis[i]);
            for (std::size_t j = 0; j < m; ++j) {
                cdouble v(0.0, 0.0);
                for (std::size_t k = 0; k < cb.blocks.size(); ++k)
                    v += (domain_basis[j].blocks[k].adjoint() * cb.blocks[k]).trace();
                left(j, i) = v;
            }
        }
        return basis_map * left * lift_map;
    }
};

inline GnsData gns_construct(const FunctionalSpec& f) {
    if (!f.is_positive_functional)
        throw NotPositive("gns_construct: functional must be positive");
    GnsData g;
    g.functional = f;
    g.domain_basis = weight_domains(f).n_phi_basis;
    const std::size_t m = g.domain_basis.size();

    g.gram = Matrix::Zero(m, m);
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < m; ++c)
            g.gram(r, c) = trace_eval(mul(f.density, mul(adjoint(g.domain_basis[r]), g.domain_basis[c])));

    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (g.gram + g.gram.adjoint()));
    const double top = m ? std::max(es.eigenvalues().maxCoeff(), 0.0) : 0.0;
    const double cut = kGramCutTol * top;
    std::vector<int> keep;
    for (int i = 0; i < int(m); ++i)
        if (es.eigenvalues()(i) > cut) keep.push_back(i);
    g.dim = int(keep.size());
    g.basis_map = Matrix::Zero(g.dim, m);
    g.lift_map = Matrix::Zero(m, g.dim);
    for (int a = 0; a < g.dim; ++a) {
        const double lam = es.eigenvalues()(keep[a]);
        g.basis_map.row(a) = std::sqrt(lam) * es.eigenvectors().col(keep[a]).adjoint();
        g.lift_map.col(a) = es.eigenvectors().col(keep[a]) / std::sqrt(lam);
    }

    const bool bounded = is_bounded(f);
    const Element origin = bounded ? identity_element(f.algebra) : support_projection(f.density);
    g.cyclic_vector = g.embed(origin);

    // Invariants: the vector state of xi reconstructs tau(F .), pi is a
    // *-homomorphism, and xi is cyclic.
    const double fid_tol = kFidelityTol * (1.0 + operator_norm(f.density));
    const auto units = matrix_unit_basis(f.algebra);
    std::vector<Matrix> unit_reps;
    unit_reps.reserve(units.size());
    for (const Element& e : units) unit_reps.push_back(g.represent(e));
    for (std::size_t i = 0; i < units.size(); ++i) {
        const cdouble got = g.cyclic_vector.adjoint() * unit_reps[i] * g.cyclic_vector;
        const cdouble want = trace_eval(mul(f.density, units[i]));
        if (std::abs(got - want) > fid_tol)
            throw Error("gns_construct: cyclic vector fails to reconstruct the functional");
    }
    const double hom_tol = 1e-8 * (1.0 + operator_norm(f.density));
    const std::size_t sample = std::min<std::size_t>(units.size(), 8);
    for (std::size_t i = 0; i < sample; ++i) {
        if ((g.represent(adjoint(units[i])) - unit_reps[i].adjoint()).norm() > hom_tol)
            throw Error("gns_construct: pi(A*) deviates from pi(A)*");
        for (std::size_t j = 0; j < sample; ++j)
            if ((g.represent(mul(units[i], units[j])) - unit_reps[i] * unit_reps[j]).norm() > hom_tol)
                throw Error("gns_construct: pi is not multiplicative");
    }
    if (g.dim > 0) {
        Matrix orbit(g.dim, int(units.size()));
        for (std::size_t i = 0; i < units.size(); ++i)
            orbit.col(int(i)) = unit_reps[i] * g.cyclic_vector;
        Eigen::ColPivHouseholderQR<Matrix> qr(orbit);
        qr.setThreshold(1e-10);
        if (int(qr.rank()) != g.dim)
            throw Error("gns_construct: cyclic vector does not generate the GNS space");
    }
    return g;
}

} // namespace nclp
