#include "helpers.hpp"

#include <nclp/algebra.hpp>
#include <nclp/errors.hpp>
#include <nclp/functionals.hpp>
#include <nclp/gns.hpp>
#include <nclp/modular.hpp>
#include <nclp/random.hpp>
#include <nclp/rn.hpp>
#include <nclp/spectral.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

using namespace nclp;

namespace {

// Independent solver for H rho H = sigma: Newton iteration from a perturbed
// Hermitian start, each step solving the Sylvester linearization through
// Kronecker vectorization per block, with step halving if the residual grows.
// Exercises the uniqueness of the positive solution without touching the
// closed-form path under test.
Element newton_sakai(const Element& rho, const Element& sigma, Rng& rng) {
    Element out = zero_element(rho.algebra);
    std::normal_distribution<double> gauss(0.0, 0.05);
    for (std::size_t k = 0; k < rho.blocks.size(); ++k) {
        const Matrix& R = rho.blocks[k];
        const Matrix& S = sigma.blocks[k];
        const int n = int(R.rows());
        Matrix pert(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) pert(i, j) = cdouble(gauss(rng), gauss(rng));
        Matrix H = Matrix::Identity(n, n) + 0.5 * (pert + pert.adjoint());
        const auto vec_index = [n](int r, int c) { return c * n + r; };
        double res_norm = (S - H * R * H).norm();
        for (int iter = 0; iter < 100 && res_norm > 1e-14 * (1.0 + S.norm()); ++iter) {
            const Matrix resid = S - H * R * H;
            const Matrix A = H * R;
            const Matrix B = R * H;
            Matrix big = Matrix::Zero(n * n, n * n);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) {
                    for (int m = 0; m < n; ++m) {
                        big(vec_index(r, c), vec_index(m, c)) += A(r, m);
                        big(vec_index(r, c), vec_index(r, m)) += B(m, c);
                    }
                }
            Vector rhs(n * n);
            for (int c = 0; c < n; ++c)
                for (int r = 0; r < n; ++r) rhs(vec_index(r, c)) = resid(r, c);
            const Vector x = big.colPivHouseholderQr().solve(rhs);
            Matrix step(n, n);
            for (int c = 0; c < n; ++c)
                for (int r = 0; r < n; ++r) step(r, c) = x(vec_index(r, c));
            double scale = 1.0;
            for (int halve = 0; halve < 30; ++halve) {
                Matrix cand = H + scale * step;
                cand = 0.5 * (cand + cand.adjoint()).eval();
                const double cand_res = (S - cand * R * cand).norm();
                if (cand_res < res_norm || scale < 1e-6) {
                    H = cand;
                    res_norm = cand_res;
                    break;
                }
                scale *= 0.5;
            }
        }
        REQUIRE(res_norm <= 1e-10 * (1.0 + S.norm()));
        out.blocks[k] = H;
    }
    return out;
}

// sigma = rho^{1/2} C rho^{1/2} with 0.1 <= C <= 0.9: strictly positive,
// dominated by rho, and generically non-commuting with it.
FunctionalSpec dominated_partner(const FunctionalSpec& f, Rng& rng) {
    const Element root = element_sqrt(f.density);
    Element c = random_positive(f.algebra, rng);
    c = scalar_mul(0.8 / (1e-12 + operator_norm(c)), c);
    c = add(c, scalar_mul(0.1, identity_element(f.algebra)));
    return make_bounded_functional(mul(mul(root, c), root));
}

} // namespace

TEST_CASE("commutant derivative on pinned instances", "[rn]") {
    Rng rng(1101);

    // g = lambda f: the commutant operator is the scalar lambda.
    const FunctionalSpec f = random_faithful_state(th::m2(), rng);
    const FunctionalSpec g = make_bounded_functional(scalar_mul(0.6, f.density));
    const CommutantRnResult r = commutant_rn(f, g);
    CHECK(norm_distance(r.right_multiplier, scalar_mul(0.6, identity_element(th::m2()))) <
          1e-8);
    CHECK((r.gns_operator - 0.6 * Matrix::Identity(4, 4)).norm() < 1e-8);

    // Trace state against sigma' = diag(0.25, 0.15): right multiplication by
    // 2 sigma' = diag(0.5, 0.3) on Hilbert-Schmidt space.
    const FunctionalSpec tr = make_bounded_functional(th::diag2(0.5, 0.5));
    const FunctionalSpec gs = make_bounded_functional(th::diag2(0.25, 0.15));
    const CommutantRnResult rt = commutant_rn(tr, gs);
    CHECK(norm_distance(rt.right_multiplier, th::diag2(0.5, 0.3)) < 1e-8);

    // g = f gives the identity.
    const CommutantRnResult ri = commutant_rn(f, f);
    CHECK(norm_distance(ri.right_multiplier, identity_element(th::m2())) < 1e-8);

    CHECK_THROWS_AS(
        commutant_rn(tr, make_bounded_functional(th::diag2(2.0, 0.0))), DominationFailed);
    CHECK_THROWS_AS(
        commutant_rn(tr, make_bounded_functional(th::diag2(-0.1, 0.1))), NotPositive);
}

TEST_CASE("commutant derivative reproduces the functional", "[rn]") {
    Rng rng(1102);
    for (const AlgebraSpec& spec : {th::m2(), th::two_blocks()}) {
        for (int trial = 0; trial < 8; ++trial) {
            const FunctionalSpec f = random_faithful_state(spec, rng);
            Element c = random_positive(spec, rng);
            c = scalar_mul(0.9 / (1e-12 + operator_norm(c)), c);
            const Element root = element_sqrt(f.density);
            const FunctionalSpec g = make_bounded_functional(mul(mul(root, c), root));

            const CommutantRnResult r = commutant_rn(f, g);
            const GnsData gns = gns_construct(f);

            // 0 <= H' <= 1 on the GNS space.
            Eigen::SelfAdjointEigenSolver<Matrix> es(r.gns_operator);
            CHECK(es.eigenvalues().minCoeff() > -1e-8);
            CHECK(es.eigenvalues().maxCoeff() < 1.0 + 1e-8);

            // psi(A) = <H' pi(A) xi, xi> for arbitrary A, adjoints included.
            for (int probe = 0; probe < 10; ++probe) {
                const Element a = random_element(spec, rng);
                const cdouble got = gns.cyclic_vector.dot(
                    r.gns_operator * gns.represent(a) * gns.cyclic_vector);
                const cdouble want = trace_eval(mul(g.density, a));
                CHECK(std::abs(got - want) <= 1e-8 * (1.0 + std::abs(want)));
                const cdouble got_star = gns.cyclic_vector.dot(
                    r.gns_operator * gns.represent(adjoint(a)) * gns.cyclic_vector);
                CHECK(std::abs(got_star - std::conj(want)) <=
                      1e-8 * (1.0 + std::abs(want)));
            }

            // H' acts by right multiplication with the returned element.
            for (int probe = 0; probe < 5; ++probe) {
                const Element b = random_element(spec, rng);
                const Vector lhs = r.gns_operator * gns.embed(b);
                const Vector rhs = gns.embed(mul(b, r.right_multiplier));
                CHECK((lhs - rhs).norm() <= 1e-7 * (1.0 + rhs.norm()));
            }
        }
    }
}

TEST_CASE("commutant derivative closed form for commuting densities", "[rn]") {
    Rng rng(1103);
    std::uniform_real_distribution<double> dr(0.2, 0.8);
    std::uniform_real_distribution<double> ds(0.05, 0.95);
    for (int trial = 0; trial < 20; ++trial) {
        const double r1 = dr(rng);
        const double r2 = 1.0 - r1;
        const double s1 = ds(rng), s2 = ds(rng);
        const FunctionalSpec f = make_bounded_functional(th::diag2(r1, r2));
        const FunctionalSpec g = make_bounded_functional(th::diag2(r1 * s1, r2 * s2));
        // sigma rho^{-1} = diag(s1, s2), computed by hand.
        const CommutantRnResult r = commutant_rn(f, g);
        CHECK(norm_distance(r.right_multiplier, th::diag2(s1, s2)) < 1e-8);
    }
}

TEST_CASE("quadratic derivative on pinned instances", "[rn]") {
    Rng rng(1104);

    // Scaling: g = lambda f gives H = sqrt(lambda) identity.
    const FunctionalSpec f = random_faithful_state(th::m2(), rng);
    const FunctionalSpec g = make_bounded_functional(scalar_mul(0.49, f.density));
    CHECK(norm_distance(sakai_rn(f, g), scalar_mul(0.7, identity_element(th::m2()))) < 1e-9);

    // Commuting diagonal case: H_i = sqrt(sigma_i / rho_i).
    const FunctionalSpec rho = make_bounded_functional(th::diag2(0.75, 0.25));
    const FunctionalSpec sigma = make_bounded_functional(th::diag2(0.5, 0.1));
    const Element h = sakai_rn(rho, sigma);
    CHECK(norm_distance(h, th::diag2(std::sqrt(2.0 / 3.0), std::sqrt(0.4))) < 1e-9);

    CHECK_THROWS_AS(sakai_rn(rho, make_bounded_functional(th::diag2(-0.1, 0.1))),
                    NotPositive);
    CHECK_THROWS_AS(sakai_rn(rho, make_bounded_functional(th::diag2(0.9, 0.1))),
                    DominationFailed);
}

TEST_CASE("quadratic derivative solves the defining identity", "[rn]") {
    Rng rng(1105);
    for (const AlgebraSpec& spec : {th::m2(), th::m3(), th::two_blocks()}) {
        for (int trial = 0; trial < 10; ++trial) {
            const FunctionalSpec f = random_faithful_state(spec, rng);
            const FunctionalSpec g = dominated_partner(f, rng);
            const Element h = sakai_rn(f, g);

            CHECK(is_self_adjoint(h, 1e-9));
            CHECK(is_positive(h));
            CHECK(operator_norm(h) <= 1.0 + 1e-9);

            // psi(E) = phi(H E H) over all matrix units.
            double worst = 0.0;
            for (const Element& e : matrix_unit_basis(spec)) {
                const cdouble lhs = trace_eval(mul(g.density, e));
                const cdouble rhs = trace_eval(mul(f.density, mul(h, mul(e, h))));
                worst = std::max(worst, std::abs(lhs - rhs));
            }
            CHECK(worst <= 1e-8);
        }
    }
}

TEST_CASE("quadratic derivative agrees with an independent Newton solver", "[rn]") {
    Rng rng(1106);
    for (const AlgebraSpec& spec : {th::m2(), th::m3(), th::weighted_blocks()}) {
        for (int trial = 0; trial < 8; ++trial) {
            const FunctionalSpec f = random_faithful_state(spec, rng);
            const FunctionalSpec g = dominated_partner(f, rng);
            const Element via_library = sakai_rn(f, g);
            const Element via_newton = newton_sakai(f.density, g.density, rng);
            CHECK(norm_distance(via_library, via_newton) <= 1e-8);
        }
    }
}

TEST_CASE("linear derivative on pinned instances", "[rn]") {
    const FunctionalSpec rho = make_bounded_functional(th::diag2(0.75, 0.25));

    const Element h = pt_rn(rho, make_bounded_functional(th::diag2(0.3, 0.2)));
    CHECK(norm_distance(h, th::diag2(0.4, 0.8)) < 1e-9);

    CHECK(norm_distance(pt_rn(rho, rho), identity_element(th::m2())) < 1e-9);

    // sigma = 3 rho: norm above one is allowed since domination is not assumed.
    const Element h3 = pt_rn(rho, make_bounded_functional(th::diag2(2.25, 0.75)));
    CHECK(norm_distance(h3, scalar_mul(3.0, identity_element(th::m2()))) < 1e-9);
    CHECK(operator_norm(h3) == Catch::Approx(3.0).margin(1e-9));
}

TEST_CASE("linear derivative requires flow invariance", "[rn]") {
    Rng rng(1107);
    int rejected = 0, built = 0;
    for (int trial = 0; trial < 30; ++trial) {
        const FunctionalSpec f = random_faithful_state(th::m2(), rng);
        Element s = random_positive(th::m2(), rng);
        s = scalar_mul(1.0 / trace_eval(s).real(), s);
        if (commutator_norm(s, f.density) > 1e-4) {
            CHECK_THROWS_AS(pt_rn(f, make_bounded_functional(s)), NotInvariant);
            ++rejected;
        }
        // Invariant partner built from a polynomial in the density.
        const Element sig = functional_calculus(
            [](double t) { return 0.4 * t + 0.5 * t * t; }, f.density);
        const Element h = pt_rn(f, make_bounded_functional(sig));
        CHECK(commutator_norm(h, f.density) <= 1e-9);
        double worst = 0.0;
        for (const Element& e : matrix_unit_basis(th::m2())) {
            const cdouble lhs = trace_eval(mul(sig, e));
            const cdouble rhs = trace_eval(mul(f.density, mul(h, e)));
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        CHECK(worst <= 1e-8);
        ++built;
    }
    CHECK(rejected > 0);
    CHECK(built == 30);
}

TEST_CASE("linear derivative is contractive under domination", "[rn]") {
    Rng rng(1108);
    for (int trial = 0; trial < 20; ++trial) {
        const FunctionalSpec f = random_faithful_state(th::m3(), rng);
        // Commuting and dominated: an eigenvalue-wise factor in [0.2, 0.8].
        const Element sig = functional_calculus(
            [](double t) { return t * (0.2 + 0.6 * t); }, f.density);
        const Element h = pt_rn(f, make_bounded_functional(sig));
        CHECK(operator_norm(h) <= 1.0 + 1e-9);
        CHECK(is_positive(h));
    }
}

TEST_CASE("weight from density on pinned instances", "[rn]") {
    const FunctionalSpec tr = trace_functional(th::m2());

    // h = identity reproduces the input functional.
    const FunctionalSpec same = weight_from_density(tr, identity_element(th::m2()));
    CHECK(norm_distance(same.density, tr.density) < 1e-12);
    CHECK(norm_distance(same.infinite_part, tr.infinite_part) < 1e-12);

    // h = diag(2,0): phi_H reads 2 on E11, 0 on E22, and loses faithfulness.
    const FunctionalSpec scaled = weight_from_density(tr, th::diag2(2, 0));
    CHECK(functional_eval(scaled, matrix_unit(th::m2(), 0, 0, 0)).value.real() ==
          Catch::Approx(2.0).margin(1e-12));
    CHECK(std::abs(functional_eval(scaled, matrix_unit(th::m2(), 0, 1, 1)).value) <
          1e-12);
    CHECK(!is_faithful(scaled));
    CHECK(is_faithful(weight_from_density(tr, th::diag2(2, 1))));

    // Non-commuting h is rejected.
    const FunctionalSpec phi = make_bounded_functional(th::diag2(0.75, 0.25));
    CHECK_THROWS_AS(weight_from_density(phi, th::el2(1, 0.5, 0.5, 1)), NotCommuting);
}

TEST_CASE("weight from a cap ladder stabilizes", "[rn]") {
    const FunctionalSpec tr = trace_functional(th::m2());
    const Element h = th::diag2(1, 2);

    // Caps at 1, 2, 3: the ladder saturates once the cap clears ||h||.
    const FunctionalSpec ladder = weight_from_caps(tr, h, {1.0, 2.0, 3.0});
    const FunctionalSpec full = weight_from_density(tr, h);
    CHECK(norm_distance(ladder.density, full.density) < 1e-10);

    // Truncated ladders are genuinely below the full weight.
    const FunctionalSpec partial = weight_from_caps(tr, h, {1.0, 2.0});
    CHECK(norm_distance(partial.density, th::diag2(1, 0)) < 1e-10);
    CHECK(is_positive(sub(full.density, partial.density)));

    CHECK_THROWS_AS(weight_from_caps(tr, h, {}), PreconditionFailed);
    CHECK_THROWS_AS(weight_from_caps(tr, h, {2.0, 1.0}), NotIncreasing);
}

TEST_CASE("flow commutation equivalence on pinned instances", "[rn]") {
    const std::vector<double> ts = {0.9, -0.4};
    const FunctionalSpec f = make_bounded_functional(th::diag2(0.75, 0.25));

    const FlowCommutation all_true =
        flow_commutation_check(f, make_bounded_functional(th::diag2(0.6, 0.4)), ts);
    CHECK(all_true.invariance_fg);
    CHECK(all_true.invariance_gf);
    CHECK(all_true.flows_commute);

    // Rotated second density: every condition fails together.
    const double c = std::cos(0.5), s = std::sin(0.5);
    Matrix u(2, 2);
    u << c, -s, s, c;
    const Matrix rotated = u * th::diag2(0.6, 0.4).blocks[0] * u.adjoint();
    const FunctionalSpec g = make_bounded_functional(Element(th::m2(), {rotated}));
    REQUIRE(commutator_norm(f.density, g.density) > 1e-3);
    const FlowCommutation all_false = flow_commutation_check(f, g, ts);
    CHECK(!all_false.invariance_fg);
    CHECK(!all_false.invariance_gf);
    CHECK(!all_false.flows_commute);

    const FlowCommutation self = flow_commutation_check(f, f, ts);
    CHECK(self.invariance_fg);
    CHECK(self.invariance_gf);
    CHECK(self.flows_commute);
}

TEST_CASE("flow commutation equivalence on random pairs", "[rn]") {
    Rng rng(1109);
    const std::vector<double> ts = {0.9, -0.4, 2.3};
    for (int trial = 0; trial < 15; ++trial) {
        const FunctionalSpec f = random_faithful_state(th::m2(), rng);
        // Commuting partner from functional calculus must come out all-true.
        Element sig = functional_calculus([](double t) { return 0.2 + t * t; }, f.density);
        sig = scalar_mul(1.0 / trace_eval(sig).real(), sig);
        const FlowCommutation fc = flow_commutation_check(f, make_bounded_functional(sig), ts);
        CHECK(fc.invariance_fg);
        CHECK(fc.invariance_gf);
        CHECK(fc.flows_commute);

        // Generic second state must come out all-false (equivalence intact).
        const FunctionalSpec g = random_faithful_state(th::m2(), rng);
        if (commutator_norm(f.density, g.density) > 1e-4) {
            const FlowCommutation nc = flow_commutation_check(f, g, ts);
            CHECK(!nc.invariance_fg);
            CHECK(!nc.invariance_gf);
            CHECK(!nc.flows_commute);
        }
    }
}
