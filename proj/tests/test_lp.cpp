#include "helpers.hpp"

#include <nclp/algebra.hpp>
#include <nclp/errors.hpp>
#include <nclp/lp.hpp>
#include <nclp/random.hpp>
#include <nclp/spectral.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

using namespace nclp;

namespace {

// Classical weighted ell_p norm of explicitly supplied diagonal entries:
// (sum_k c_k sum_i |d_i|^p)^{1/p}, max |d_i| at p = infinity. Scalar
// arithmetic only; the oracle for the commutative reduction.
double scalar_lp(const std::vector<std::pair<double, double>>& entries, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (const auto& [d, c] : entries) m = std::max(m, std::abs(d));
        return m;
    }
    double acc = 0.0;
    for (const auto& [d, c] : entries) acc += c * std::pow(std::abs(d), p);
    return std::pow(acc, 1.0 / p);
}

} // namespace

TEST_CASE("lp norm on pinned instances", "[lp]") {
    CHECK(lp_norm(th::diag2(1, -2), 1.0).value == Catch::Approx(3.0).margin(1e-12));
    CHECK(lp_norm(identity_element(th::m2()), 2.0).value ==
          Catch::Approx(std::sqrt(2.0)).margin(1e-12));
    CHECK(lp_norm(th::el2(0, 2, 0, 0), kInfiniteP).value == Catch::Approx(2.0).margin(1e-12));

    CHECK_THROWS_AS(lp_norm(th::diag2(1, 1), 0.5), BadExponent);
    CHECK_THROWS_AS(lp_norm(th::diag2(1, 1), 0.0), BadExponent);
}

TEST_CASE("Holder bound on pinned instances", "[lp]") {
    const Element a = th::diag2(1, 2);
    const Element b = th::diag2(3, 4);
    const HolderResult h = holder_bound({{a, 2.0}, {b, 2.0}});
    CHECK(h.lhs == Catch::Approx(11.0).margin(1e-10));
    CHECK(h.rhs == Catch::Approx(std::sqrt(5.0) * 5.0).margin(1e-10));
    CHECK(h.holds);

    Rng rng(601);
    const Element arb = random_element(th::m2(), rng);
    const HolderResult hi = holder_bound({{identity_element(th::m2()), 2.0}, {arb, 2.0}});
    CHECK(hi.lhs == Catch::Approx(trace_eval(absolute_value(arb)).real()).margin(1e-9));
    CHECK(hi.rhs ==
          Catch::Approx(std::sqrt(2.0) * lp_norm(arb, 2.0).value).margin(1e-9));
    CHECK(hi.holds);

    // Three identical commuting factors saturate the k-factor bound.
    const HolderResult h3 = holder_bound({{a, 3.0}, {a, 3.0}, {a, 3.0}});
    CHECK(h3.lhs == Catch::Approx(9.0).margin(1e-10));
    CHECK(h3.rhs == Catch::Approx(9.0).margin(1e-10));
    CHECK(h3.holds);

    CHECK_THROWS_AS(holder_bound({{a, 2.0}, {b, 3.0}}), ExponentMismatch);
    CHECK_THROWS_AS(holder_bound({}), PreconditionFailed);
}

TEST_CASE("Holder with general target exponent", "[lp]") {
    Rng rng(602);
    for (int trial = 0; trial < 50; ++trial) {
        const Element a = random_element(th::two_blocks(), rng);
        const Element b = random_element(th::two_blocks(), rng);
        // 1/2 + 1/6 = 2/3 = 1/1.5.
        const HolderResult h = holder_bound({{a, 2.0}, {b, 6.0}}, 1.5);
        CHECK(h.holds);
        CHECK(h.lhs <= h.rhs + 1e-9 * (1.0 + h.rhs));
    }
    // p = inf contributes nothing to the exponent budget.
    const HolderResult hinf =
        holder_bound({{th::diag2(1, 2), kInfiniteP}, {th::diag2(3, 4), 2.0}}, 2.0);
    CHECK(hinf.holds);
}

TEST_CASE("Holder inequality and saturation on random instances", "[lp]") {
    Rng rng(603);
    const std::vector<std::pair<double, double>> pairs = {
        {1.0, kInfiniteP}, {1.5, 3.0}, {2.0, 2.0}, {3.0, 1.5}, {4.0, 4.0 / 3.0}};
    for (const AlgebraSpec& spec : th::sample_algebras()) {
        for (int trial = 0; trial < 75; ++trial) {
            const auto& [p, q] = pairs[std::size_t(trial) % pairs.size()];
            const Element a = random_element(spec, rng);
            const Element b = random_element(spec, rng);
            const HolderResult h = holder_bound({{a, p}, {b, q}});
            CHECK(h.holds);
        }
        // Saturation witnesses: commuting positive factors with proportional
        // powers, A = C^{1/p}, B = C^{1/q}, give equality with ||C||_1.
        for (int trial = 0; trial < 20; ++trial) {
            const Element c = random_positive(spec, rng);
            const auto& [p, q] = pairs[1 + std::size_t(trial) % (pairs.size() - 1)];
            const Element a = element_pow(c, 1.0 / p);
            const Element b = element_pow(c, 1.0 / q);
            const HolderResult h = holder_bound({{a, p}, {b, q}});
            CHECK(std::abs(h.lhs - h.rhs) <= 1e-9 * (1.0 + h.rhs));
        }
    }
}

TEST_CASE("dual norm witness on pinned instances", "[lp]") {
    const DualWitness w = dual_norm_witness(th::diag2(1, 2), 2.0);
    CHECK(norm_distance(w.witness, th::diag2(1.0 / std::sqrt(5.0), 2.0 / std::sqrt(5.0))) <
          1e-10);
    CHECK(w.pairing == Catch::Approx(std::sqrt(5.0)).margin(1e-10));

    const DualWitness wp = dual_norm_witness(th::diag2(1, 0), 2.0);
    CHECK(norm_distance(wp.witness, th::diag2(1, 0)) < 1e-10);
    CHECK(wp.pairing == Catch::Approx(1.0).margin(1e-10));

    Rng rng(604);
    const Element u = random_unitary(th::m2(), rng);
    const DualWitness wu = dual_norm_witness(u, 2.0);
    CHECK(norm_distance(wu.witness, scalar_mul(1.0 / std::sqrt(2.0), adjoint(u))) < 1e-9);
    CHECK(wu.pairing == Catch::Approx(std::sqrt(2.0)).margin(1e-9));

    CHECK_THROWS_AS(dual_norm_witness(th::diag2(1, 2), kInfiniteP), BadExponent);
    CHECK_THROWS_AS(dual_norm_witness(zero_element(th::m2()), 2.0), ZeroElement);
}

TEST_CASE("dual attainment on random inputs", "[lp]") {
    Rng rng(605);
    for (const AlgebraSpec& spec : th::sample_algebras()) {
        for (int trial = 0; trial < 40; ++trial) {
            const double p = std::vector<double>{1.0, 1.5, 2.0, 3.0}[std::size_t(trial) % 4];
            const Element a = random_element(spec, rng);
            if (operator_norm(a) <= 1e-14) continue;
            const DualWitness w = dual_norm_witness(a, p);
            const double np = lp_norm(a, p).value;
            const double q = p > 1.0 ? p / (p - 1.0) : kInfiniteP;
            CHECK(lp_norm(w.witness, q).value == Catch::Approx(1.0).margin(1e-9));
            CHECK(std::abs(w.pairing - np) <= 1e-9 * (1.0 + np));
        }
    }
}

TEST_CASE("duality pairing on pinned instances", "[lp]") {
    const AlgebraSpec m2 = th::m2();
    const Element e12 = matrix_unit(m2, 0, 0, 1);
    const Element e21 = matrix_unit(m2, 0, 1, 0);
    CHECK(duality_pairing(e12, e21).real() == Catch::Approx(1.0).margin(1e-12));
    CHECK(std::abs(duality_pairing(e12, zero_element(m2))) == 0.0);
    CHECK(duality_pairing(identity_element(m2), identity_element(m2)).real() ==
          Catch::Approx(2.0).margin(1e-12));
}

TEST_CASE("trace norm chain on pinned instances", "[lp]") {
    const AlgebraSpec m2 = th::m2();
    const TraceNormBound t1 =
        trace_norm_bound_check(identity_element(m2), identity_element(m2));
    CHECK(t1.lhs1 == Catch::Approx(2.0).margin(1e-10));
    CHECK(t1.lhs2 == Catch::Approx(2.0).margin(1e-10));
    CHECK(t1.rhs == Catch::Approx(2.0).margin(1e-10));
    CHECK(t1.holds);

    const TraceNormBound t2 = trace_norm_bound_check(th::diag2(1, -1), th::diag2(1, 1));
    CHECK(t2.lhs1 == Catch::Approx(0.0).margin(1e-10));
    CHECK(t2.lhs2 == Catch::Approx(2.0).margin(1e-10));
    CHECK(t2.rhs == Catch::Approx(2.0).margin(1e-10));
    CHECK(t2.holds);

    const TraceNormBound t3 =
        trace_norm_bound_check(matrix_unit(m2, 0, 0, 1), matrix_unit(m2, 0, 1, 0));
    CHECK(t3.lhs1 == Catch::Approx(1.0).margin(1e-10));
    CHECK(t3.lhs2 == Catch::Approx(1.0).margin(1e-10));
    CHECK(t3.rhs == Catch::Approx(1.0).margin(1e-10));
    CHECK(t3.holds);
}

TEST_CASE("Minkowski inequality across exponents", "[lp]") {
    Rng rng(606);
    const std::vector<double> ps = {1.0, 1.5, 2.0, 3.0, kInfiniteP};
    for (const AlgebraSpec& spec : th::sample_algebras()) {
        for (int trial = 0; trial < 50; ++trial) {
            const Element a = random_element(spec, rng);
            const Element b = random_element(spec, rng);
            for (double p : ps) {
                const double lhs = lp_norm(add(a, b), p).value;
                const double rhs = lp_norm(a, p).value + lp_norm(b, p).value;
                CHECK(lhs <= rhs + 1e-9 * (1.0 + rhs));
            }
        }
    }
}

TEST_CASE("commutative reduction matches the scalar formula exactly", "[lp]") {
    Rng rng(607);
    const std::vector<double> ps = {1.0, 1.5, 2.0, 3.0, kInfiniteP};
    for (const AlgebraSpec& spec : th::sample_algebras()) {
        for (int trial = 0; trial < 30; ++trial) {
            std::vector<std::pair<double, double>> entries;
            Element d = zero_element(spec);
            std::uniform_real_distribution<double> dist(-2.0, 2.0);
            for (std::size_t k = 0; k < spec.block_count(); ++k)
                for (int i = 0; i < spec.block_dims[k]; ++i) {
                    const double v = dist(rng);
                    d.blocks[k](i, i) = v;
                    entries.emplace_back(v, spec.trace_weights[k]);
                }
            for (double p : ps)
                CHECK(std::abs(lp_norm(d, p).value - scalar_lp(entries, p)) <= 1e-12);
        }
    }
}

TEST_CASE("homogeneity and unitary invariance", "[lp]") {
    Rng rng(608);
    const std::vector<double> ps = {1.0, 1.5, 2.0, 3.0, kInfiniteP};
    for (const AlgebraSpec& spec : th::sample_algebras()) {
        for (int trial = 0; trial < 25; ++trial) {
            const Element a = random_element(spec, rng);
            const Element u = random_unitary(spec, rng);
            const Element v = random_unitary(spec, rng);
            const cdouble lambda(1.7, -0.4);
            for (double p : ps) {
                const double base = lp_norm(a, p).value;
                CHECK(lp_norm(scalar_mul(lambda, a), p).value ==
                      Catch::Approx(std::abs(lambda) * base).margin(1e-9 * (1.0 + base)));
                CHECK(lp_norm(mul(mul(u, a), v), p).value ==
                      Catch::Approx(base).margin(1e-9 * (1.0 + base)));
            }
        }
    }
}

TEST_CASE("lp norms are faithful", "[lp]") {
    Rng rng(609);
    for (double p : {1.0, 2.0, kInfiniteP}) {
        for (int trial = 0; trial < 20; ++trial) {
            Element a = random_element(th::two_blocks(), rng);
            a = scalar_mul(1e-8 / (1e-12 + operator_norm(a)), a);
            // Max entry 1e-8 forces the norm above the 1e-12 faithfulness cut.
            CHECK(lp_norm(a, p).value > 1e-12);
        }
    }
    for (double p : {1.0, 2.0, kInfiniteP})
        CHECK(lp_norm(zero_element(th::m2()), p).value == 0.0);
}

TEST_CASE("trace norm chain on random inputs", "[lp]") {
    Rng rng(610);
    for (const AlgebraSpec& spec : th::sample_algebras()) {
        for (int trial = 0; trial < 40; ++trial) {
            const TraceNormBound t =
                trace_norm_bound_check(random_element(spec, rng), random_element(spec, rng));
            CHECK(t.holds);
            CHECK(t.lhs1 <= t.lhs2 + 1e-9 * (1.0 + t.lhs2));
            CHECK(t.lhs2 <= t.rhs + 1e-9 * (1.0 + t.rhs));
        }
    }
}
