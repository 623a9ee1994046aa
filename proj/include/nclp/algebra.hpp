#pragma once

// Finite-dimensional von Neumann algebras presented as direct sums of full
// matrix blocks  M = M_{n_1} + ... + M_{n_m}  carrying the weighted trace
//
//     tau(A) = sum_k c_k * Tr(A_k),      c_k > 0.
//
// tau is faithful, positive and tracial; every construction in this library
// funnels its trace evaluations through trace_eval so the block weights are
// applied in exactly one place.

#include <complex>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nclp/errors.hpp"

namespace nclp {

using cdouble = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Relative spectral tolerance. Eigenvalue clustering, self-adjointness and
// positivity checks all use kSpectralTol * (1 + scale of the operand).
inline constexpr double kSpectralTol = 1e-9;

// Rank decisions (kernel membership, projection cuts) in the lattice and in
// polar decompositions.
inline constexpr double kRankTol = 1e-9;

// Quotient cut in Gram eigendecompositions, relative to the top eigenvalue.
inline constexpr double kGramCutTol = 1e-10;

// Absolute slack on trace-mass comparisons against delta budgets.
inline constexpr double kDeltaSlack = 1e-12;

// Absolute tolerance on exponent arithmetic (Hoelder budgets).
inline constexpr double kExponentTol = 1e-12;

// Residual budget for reconstruction identities (KMS lines, Radon-Nikodym).
inline constexpr double kResidualTol = 1e-8;

// Relative fidelity budget for GNS reconstructions.
inline constexpr double kFidelityTol = 1e-10;

// Agreement budget between quadrature and closed-form regularizations.
inline constexpr double kQuadratureTol = 1e-6;

struct AlgebraSpec {
    std::vector<int> block_dims;
    std::vector<double> trace_weights;

    AlgebraSpec() = default;
    AlgebraSpec(std::vector<int> dims, std::vector<double> weights)
        : block_dims(std::move(dims)), trace_weights(std::move(weights)) {
        validate();
    }

    void validate() const {
        if (block_dims.empty())
            throw Error("AlgebraSpec: at least one block required");
        if (block_dims.size() != trace_weights.size())
            throw Error("AlgebraSpec: block_dims and trace_weights must have equal length");
        for (int d : block_dims)
            if (d < 1) throw Error("AlgebraSpec: block dimensions must be >= 1");
        for (double c : trace_weights)
            if (!(c > 0.0)) throw Error("AlgebraSpec: trace weights must be > 0");
    }

    std::size_t block_count() const { return block_dims.size(); }

    // Complex dimension of the underlying vector space sum_k n_k^2.
    int total_dim() const {
        int n = 0;
        for (int d : block_dims) n += d * d;
        return n;
    }

    // tau(1) = sum_k c_k * n_k.
    double trace_of_identity() const {
        double t = 0.0;
        for (std::size_t k = 0; k < block_dims.size(); ++k)
            t += trace_weights[k] * block_dims[k];
        return t;
    }

    bool operator==(const AlgebraSpec& o) const {
        return block_dims == o.block_dims && trace_weights == o.trace_weights;
    }
    bool operator!=(const AlgebraSpec& o) const { return !(*this == o); }
};

// An element of the algebra: one dense matrix per block. Elements are value
// types; operations return fresh elements and never mutate operands.
struct Element {
    AlgebraSpec algebra;
    std::vector<Matrix> blocks;

    Element() = default;

    Element(AlgebraSpec spec, std::vector<Matrix> blks)
        : algebra(std::move(spec)), blocks(std::move(blks)) {
        if (blocks.size() != algebra.block_count())
            throw Error("Element: block count mismatch");
        for (std::size_t k = 0; k < blocks.size(); ++k) {
            if (blocks[k].rows() != algebra.block_dims[k] ||
                blocks[k].cols() != algebra.block_dims[k])
                throw Error("Element: block " + std::to_string(k) + " has wrong shape");
        }
    }
};

inline void check_same_algebra(const Element& a, const Element& b, const char* op) {
    if (a.algebra != b.algebra)
        throw AlgebraMismatch(std::string(op) + " requires operands over the same algebra");
}

inline Element zero_element(const AlgebraSpec& spec) {
    std::vector<Matrix> blocks;
    blocks.reserve(spec.block_count());
    for (int d : spec.block_dims) blocks.push_back(Matrix::Zero(d, d));
    return Element(spec, std::move(blocks));
}

inline Element identity_element(const AlgebraSpec& spec) {
    std::vector<Matrix> blocks;
    blocks.reserve(spec.block_count());
    for (int d : spec.block_dims) blocks.push_back(Matrix::Identity(d, d));
    return Element(spec, std::move(blocks));
}

// Matrix unit e_{ij} in block k, zero elsewhere. Indices are 0-based.
inline Element matrix_unit(const AlgebraSpec& spec, std::size_t block, int i, int j) {
    if (block >= spec.block_count())
        throw Error("matrix_unit: block index out of range");
    const int d = spec.block_dims[block];
    if (i < 0 || j < 0 || i >= d || j >= d)
        throw Error("matrix_unit: entry index out of range");
    Element e = zero_element(spec);
    e.blocks[block](i, j) = 1.0;
    return e;
}

// The matrix units of every block, enumerated block by block in row-major
// order. They form a basis of M as a complex vector space.
inline std::vector<Element> matrix_unit_basis(const AlgebraSpec& spec) {
    std::vector<Element> basis;
    basis.reserve(spec.total_dim());
    for (std::size_t k = 0; k < spec.block_count(); ++k)
        for (int i = 0; i < spec.block_dims[k]; ++i)
            for (int j = 0; j < spec.block_dims[k]; ++j)
                basis.push_back(matrix_unit(spec, k, i, j));
    return basis;
}

inline Element add(const Element& a, const Element& b) {
    check_same_algebra(a, b, "add");
    std::vector<Matrix> blocks;
    blocks.reserve(a.blocks.size());
    for (std::size_t k = 0; k < a.blocks.size(); ++k)
        blocks.push_back(a.blocks[k] + b.blocks[k]);
    return Element(a.algebra, std::move(blocks));
}

inline Element sub(const Element& a, const Element& b) {
    check_same_algebra(a, b, "sub");
    std::vector<Matrix> blocks;
    blocks.reserve(a.blocks.size());
    for (std::size_t k = 0; k < a.blocks.size(); ++k)
        blocks.push_back(a.blocks[k] - b.blocks[k]);
    return Element(a.algebra, std::move(blocks));
}

inline Element mul(const Element& a, const Element& b) {
    check_same_algebra(a, b, "mul");
    std::vector<Matrix> blocks;
    blocks.reserve(a.blocks.size());
    for (std::size_t k = 0; k < a.blocks.size(); ++k)
        blocks.push_back(a.blocks[k] * b.blocks[k]);
    return Element(a.algebra, std::move(blocks));
}

inline Element scalar_mul(cdouble s, const Element& a) {
    std::vector<Matrix> blocks;
    blocks.reserve(a.blocks.size());
    for (const Matrix& m : a.blocks) blocks.push_back(s * m);
    return Element(a.algebra, std::move(blocks));
}

inline Element adjoint(const Element& a) {
    std::vector<Matrix> blocks;
    blocks.reserve(a.blocks.size());
    for (const Matrix& m : a.blocks) blocks.push_back(m.adjoint());
    return Element(a.algebra, std::move(blocks));
}

inline Element operator+(const Element& a, const Element& b) { return add(a, b); }
inline Element operator-(const Element& a, const Element& b) { return sub(a, b); }
inline Element operator*(const Element& a, const Element& b) { return mul(a, b); }
inline Element operator*(cdouble s, const Element& a) { return scalar_mul(s, a); }
inline Element operator*(double s, const Element& a) { return scalar_mul(cdouble(s, 0.0), a); }
inline Element operator-(const Element& a) { return scalar_mul(cdouble(-1.0, 0.0), a); }

// Weighted trace tau(A) = sum_k c_k Tr(A_k). Complex-valued on general
// elements, real on self-adjoint ones up to roundoff.
inline cdouble trace_eval(const Element& a) {
    cdouble t(0.0, 0.0);
    for (std::size_t k = 0; k < a.blocks.size(); ++k)
        t += a.algebra.trace_weights[k] * a.blocks[k].trace();
    return t;
}

inline cdouble trace_eval(const AlgebraSpec& spec, const Element& a) {
    if (a.algebra != spec)
        throw AlgebraMismatch("trace_eval: element does not belong to the given algebra");
    return trace_eval(a);
}

// Operator norm: the largest singular value over all blocks. This is the
// C*-norm, independent of the trace weights.
inline double operator_norm(const Element& a) {
    double n = 0.0;
    for (const Matrix& m : a.blocks) {
        if (m.rows() == 1) {
            n = std::max(n, std::abs(m(0, 0)));
            continue;
        }
        Eigen::JacobiSVD<Matrix> svd(m);
        n = std::max(n, svd.singularValues()(0));
    }
    return n;
}

// Operator-norm distance ||a - b||, the metric behind every approximate
// equality check in the library.
inline double norm_distance(const Element& a, const Element& b) {
    check_same_algebra(a, b, "norm_distance");
    return operator_norm(sub(a, b));
}

inline bool approx_equal(const Element& a, const Element& b, double tol) {
    return norm_distance(a, b) <= tol;
}

inline bool is_zero(const Element& a, double tol) { return operator_norm(a) <= tol; }

// Defect from self-adjointness, ||a - a*|| in operator norm.
inline double herm_defect(const Element& a) {
    return operator_norm(sub(a, adjoint(a)));
}

inline bool is_self_adjoint(const Element& a, double tol) { return herm_defect(a) <= tol; }

inline void require_self_adjoint(const Element& a, const char* who) {
    const double tol = kSpectralTol * (1.0 + operator_norm(a));
    if (!is_self_adjoint(a, tol))
        throw NotSelfAdjoint(std::string(who) + ": defect " + std::to_string(herm_defect(a)));
}

inline double commutator_norm(const Element& a, const Element& b) {
    return operator_norm(sub(mul(a, b), mul(b, a)));
}

inline std::string describe(const AlgebraSpec& spec) {
    std::ostringstream os;
    os << "M = ";
    for (std::size_t k = 0; k < spec.block_count(); ++k) {
        if (k) os << " + ";
        os << "M_" << spec.block_dims[k] << "(c=" << spec.trace_weights[k] << ")";
    }
    return os.str();
}

} // namespace nclp
