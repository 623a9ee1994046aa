#pragma once

#include <nclp/algebra.hpp>
#include <nclp/random.hpp>

#include <vector>

// Shared input builders for the test suite. Oracles live in the individual
// test files next to the checks they back; this header only constructs data.
namespace th {

using nclp::AlgebraSpec;
using nclp::cdouble;
using nclp::Element;
using nclp::Matrix;
using nclp::Vector;

inline AlgebraSpec m2() { return AlgebraSpec({2}, {1.0}); }
inline AlgebraSpec m3() { return AlgebraSpec({3}, {1.0}); }
inline AlgebraSpec two_blocks() { return AlgebraSpec({2, 3}, {1.0, 2.0}); }
inline AlgebraSpec weighted_blocks() { return AlgebraSpec({1, 2}, {2.0, 0.7}); }

inline std::vector<AlgebraSpec> sample_algebras() {
    return {m2(), m3(), two_blocks(), weighted_blocks()};
}

inline Matrix mat2(cdouble a00, cdouble a01, cdouble a10, cdouble a11) {
    Matrix m(2, 2);
    m << a00, a01, a10, a11;
    return m;
}

inline Element el2(cdouble a00, cdouble a01, cdouble a10, cdouble a11) {
    return Element(m2(), {mat2(a00, a01, a10, a11)});
}

inline Element diag(const AlgebraSpec& spec, const std::vector<double>& entries) {
    Element e = nclp::zero_element(spec);
    std::size_t idx = 0;
    for (Matrix& blk : e.blocks)
        for (Eigen::Index i = 0; i < blk.rows(); ++i) blk(i, i) = entries.at(idx++);
    return e;
}

inline Element diag2(double a, double b) { return diag(m2(), {a, b}); }
inline Element diag3(double a, double b, double c) { return diag(m3(), {a, b, c}); }

} // namespace th
