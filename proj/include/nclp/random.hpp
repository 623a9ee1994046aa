#pragma once

// Seeded generators for elements, projections and states. Tests and the CLI
// sweep share these so a fixed seed reproduces a run exactly on one platform.

#include <cstdint>
#include <random>

#include "nclp/algebra.hpp"
#include "nclp/functionals.hpp"
#include "nclp/spectral.hpp"

namespace nclp {

using Rng = std::mt19937_64;

inline Element random_element(const AlgebraSpec& spec, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Element a = zero_element(spec);
    for (Matrix& blk : a.blocks)
        for (int i = 0; i < blk.rows(); ++i)
            for (int j = 0; j < blk.cols(); ++j)
                blk(i, j) = cdouble(gauss(rng), gauss(rng));
    return a;
}

inline Element random_self_adjoint(const AlgebraSpec& spec, Rng& rng) {
    const Element g = random_element(spec, rng);
    return scalar_mul(0.5, add(g, adjoint(g)));
}

inline Element random_positive(const AlgebraSpec& spec, Rng& rng) {
    const Element g = random_element(spec, rng);
    return mul(adjoint(g), g);
}

inline Element random_unitary(const AlgebraSpec& spec, Rng& rng) {
    Element u = random_element(spec, rng);
    for (Matrix& blk : u.blocks) {
        Eigen::HouseholderQR<Matrix> qr(blk);
        Matrix q = qr.householderQ();
        // Fix the phase ambiguity so the output depends only on the seed.
        const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (int i = 0; i < q.cols(); ++i) {
            const cdouble d = r(i, i);
            if (std::abs(d) > 0.0) q.col(i) *= d / std::abs(d);
        }
        blk = q;
    }
    return u;
}

// Projection with a prescribed rank per block (rank chosen uniformly in
// [0, n_k] when not given).
inline Element random_projection(const AlgebraSpec& spec, Rng& rng,
                                 const std::vector<int>* ranks = nullptr) {
    const Element u = random_unitary(spec, rng);
    Element p = zero_element(spec);
    for (std::size_t k = 0; k < spec.block_count(); ++k) {
        const int n = spec.block_dims[k];
        int r;
        if (ranks) {
            r = (*ranks)[k];
        } else {
            std::uniform_int_distribution<int> pick(0, n);
            r = pick(rng);
        }
        Matrix d = Matrix::Zero(n, n);
        for (int i = 0; i < r; ++i) d(i, i) = 1.0;
        p.blocks[k] = u.blocks[k] * d * u.blocks[k].adjoint();
    }
    return p;
}

// Faithful state with condition number bounded by roughly (1 + 1/floor):
// density = (Wishart + floor * scale * 1) normalized to tau(rho) = 1.
inline FunctionalSpec random_faithful_state(const AlgebraSpec& spec, Rng& rng,
                                            double floor = 0.1) {
    Element w = random_positive(spec, rng);
    const double scale = operator_norm(w);
    Element rho = add(w, scalar_mul(floor * (scale + 1.0), identity_element(spec)));
    rho = scalar_mul(1.0 / trace_eval(rho).real(), rho);
    return make_bounded_functional(rho);
}

// Positive bounded functional with a kernel: the density is cut by a random
// non-full projection when possible.
inline FunctionalSpec random_degenerate_state(const AlgebraSpec& spec, Rng& rng) {
    Element w = random_positive(spec, rng);
    std::vector<int> ranks;
    for (int n : spec.block_dims) ranks.push_back(n > 1 ? n - 1 : 1);
    const Element p = random_projection(spec, rng, &ranks);
    Element rho = mul(p, mul(w, p));
    rho = scalar_mul(0.5, add(rho, adjoint(rho)));
    const double t = trace_eval(rho).real();
    if (t > 1e-8) rho = scalar_mul(1.0 / t, rho);
    return make_bounded_functional(rho);
}

} // namespace nclp
