// nclp: command line surface over the library. Each subcommand loads a JSON
// manifest, delegates to one library operation, and emits a deterministic
// JSON report on stdout (or --out): inputs echoed, outputs, residuals, the
// tolerance used, and a pass verdict. Exit codes: 0 all checks pass, 1 a
// mathematical check failed, 2 input or usage error. Timing goes to stderr
// so reports stay byte-identical across runs.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "nclp/algebra.hpp"
#include "nclp/functionals.hpp"
#include "nclp/gns.hpp"
#include "nclp/io.hpp"
#include "nclp/lp.hpp"
#include "nclp/measure.hpp"
#include "nclp/modular.hpp"
#include "nclp/random.hpp"
#include "nclp/rn.hpp"
#include "nclp/spectral.hpp"

using nclp::io::Manifest;
using nclp::io::ojson;

namespace {

struct Options {
    std::string manifest_path;
    std::string out_path;
    std::vector<std::string> element_names;
    std::vector<std::string> functional_names;
    std::vector<std::string> p_raw;
    std::string r_raw = "1";
    double epsilon = 0.0;
    double delta = 0.0;
    std::vector<double> t_samples;
    double n = 1.0;
    std::uint64_t seed = 20260823u;
    double tol = -1.0; // negative: use the command's default
};

double parse_exponent(const std::string& s) {
    if (s == "inf" || s == "Inf" || s == "INF" || s == "infinity")
        return nclp::kInfiniteP;
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw nclp::SchemaError("/flags/p", "exponent must be a real or 'inf', got '" + s + "'");
    }
}

ojson exponent_repr(double p) {
    if (std::isinf(p)) return "inf";
    return p;
}

double effective_tol(const Options& opt, double fallback) {
    return opt.tol >= 0.0 ? opt.tol : fallback;
}

// Selected (name, element) pairs: explicit --element flags, or the whole
// manifest in order. `need` pins an exact count when nonzero.
std::vector<std::pair<std::string, nclp::Element>>
pick_elements(const Manifest& m, const Options& opt, std::size_t need) {
    std::vector<std::pair<std::string, nclp::Element>> out;
    if (opt.element_names.empty()) {
        out = m.elements;
    } else {
        for (const std::string& n : opt.element_names) out.emplace_back(n, m.element(n));
    }
    if (need > 0 && out.size() != need)
        throw nclp::SchemaError("/elements", "command needs exactly " + std::to_string(need) +
                                                 " elements; select with --element NAME");
    if (out.empty())
        throw nclp::SchemaError("/elements", "manifest has no elements");
    return out;
}

std::vector<std::pair<std::string, nclp::FunctionalSpec>>
pick_functionals(const Manifest& m, const Options& opt, std::size_t need) {
    std::vector<std::pair<std::string, nclp::FunctionalSpec>> out;
    if (opt.functional_names.empty()) {
        out = m.functionals;
    } else {
        for (const std::string& n : opt.functional_names) out.emplace_back(n, m.functional(n));
    }
    if (need > 0 && out.size() != need)
        throw nclp::SchemaError("/functionals",
                                "command needs exactly " + std::to_string(need) +
                                    " functionals; select with --functional NAME");
    if (out.empty())
        throw nclp::SchemaError("/functionals", "manifest has no functionals");
    return out;
}

ojson report_skeleton(const std::string& command, const std::string& theorem) {
    ojson r;
    r["schema_version"] = "1";
    r["command"] = command;
    r["theorem"] = theorem;
    r["inputs"] = ojson::object();
    r["outputs"] = ojson::object();
    r["residuals"] = ojson::object();
    r["tolerance"] = 0.0;
    r["pass"] = false;
    return r;
}

// ----------------------------------------------------------------- commands

ojson run_norm(const Manifest& m, const Options& opt) {
    ojson r = report_skeleton("norm", "lp_norm");
    const auto picked = pick_elements(m, opt, 1);
    const double p = opt.p_raw.empty() ? nclp::kInfiniteP : parse_exponent(opt.p_raw.front());
    r["inputs"]["algebra"] = nclp::io::to_json(m.algebra);
    r["inputs"]["element"] = picked.front().first;
    r["inputs"]["p"] = exponent_repr(p);
    r["outputs"]["value"] = nclp::lp_norm(picked.front().second, p).value;
    r["tolerance"] = effective_tol(opt, nclp::kSpectralTol);
    r["pass"] = true;
    return r;
}

ojson run_holder(const Manifest& m, const Options& opt) {
    ojson r = report_skeleton("holder", "holder_inequality");
    const auto picked = pick_elements(m, opt, 0);
    if (opt.p_raw.size() != picked.size())
        throw nclp::SchemaError("/flags/p", "pass one --p per factor (" +
                                                std::to_string(picked.size()) + " factors)");
    std::vector<std::pair<nclp::Element, double>> factors;
    ojson names = ojson::array(), ps = ojson::array();
    for (std::size_t i = 0; i < picked.size(); ++i) {
        const double p = parse_exponent(opt.p_raw[i]);
        factors.emplace_back(picked[i].second, p);
        names.push_back(picked[i].first);
        ps.push_back(exponent_repr(p));
    }
    const double target = parse_exponent(opt.r_raw);
    r["inputs"]["algebra"] = nclp::io::to_json(m.algebra);
    r["inputs"]["elements"] = names;
    r["inputs"]["p"] = ps;
    r["inputs"]["r"] = exponent_repr(target);
    const nclp::HolderResult hr = nclp::holder_bound(factors, target);
    const double tol = effective_tol(opt, nclp::kSpectralTol);
    r["outputs"]["lhs"] = hr.lhs;
    r["outputs"]["rhs"] = hr.rhs;
    r["residuals"]["excess"] = std::max(0.0, hr.lhs - hr.rhs);
    r["tolerance"] = tol;
    r["pass"] = hr.lhs <= hr.rhs + tol * (1.0 + hr.rhs);
    return r;
}

ojson run_minkowski(const Manifest& m, const Options& opt) {
    ojson r = report_skeleton("minkowski", "minkowski_inequality");
    const auto picked = pick_elements(m, opt, 2);
    const double p = opt.p_raw.empty() ? 2.0 : parse_exponent(opt.p_raw.front());
    const nclp::Element& a = picked[0].second;
    const nclp::Element& b = picked[1].second;
    r["inputs"]["algebra"] = nclp::io::to_json(m.algebra);
    r["inputs"]["elements"] = ojson::array({picked[0].first, picked[1].first});
    r["inputs"]["p"] = exponent_repr(p);
    const double lhs = nclp::lp_norm(nclp::add(a, b), p).value;
    const double na = nclp::lp_norm(a, p).value;
    const double nb = nclp::lp_norm(b, p).value;
    const double tol = effective_tol(opt, nclp::kSpectralTol);
    r["outputs"]["lhs"] = lhs;
    r["outputs"]["rhs"] = na + nb;
    r["outputs"]["norm_a"] = na;
    r["outputs"]["norm_b"] = nb;
    r["residuals"]["excess"] = std::max(0.0, lhs - (na + nb));
    r["tolerance"] = tol;
    r["pass"] = lhs <= na + nb + tol * (1.0 + na + nb);
    return r;
}

ojson run_dual_witness(const Manifest& m, const Options& opt) {
    ojson r = report_skeleton("dual-witness", "dual_norm_attainment");
    const auto picked = pick_elements(m, opt, 1);
    const double p = opt.p_raw.empty() ? 2.0 : parse_exponent(opt.p_raw.front());
    const nclp::Element& a = picked.front().second;
    r["inputs"]["algebra"] = nclp::io::to_json(m.algebra);
    r["inputs"]["element"] = picked.front().first;
    r["inputs"]["p"] = exponent_repr(p);
    const nclp::DualWitness dw = nclp::dual_norm_witness(a, p);
    const double q = p > 1.0 + nclp::kExponentTol ? p / (p - 1.0) : nclp::kInfiniteP;
    const double np = nclp::lp_norm(a, p).value;
    const double nq = nclp::lp_norm(dw.witness, q).value;
    const double tol = effective_tol(opt, nclp::kSpectralTol);
    r["inputs"]["q"] = exponent_repr(q);
    r["outputs"]["witness"] = nclp::io::to_json(dw.witness);
    r["outputs"]["pairing"] = dw.pairing;
    r["outputs"]["p_norm"] = np;
    r["outputs"]["witness_dual_norm"] = nq;
    r["residuals"]["attainment"] = std::abs(dw.pairing - np);
    r["residuals"]["normalization"] = std::abs(nq - 1.0);
    r["tolerance"] = tol;
    r["pass"] = std::abs(dw.pairing - np) <= tol * (1.0 + np) &&
                std::abs(nq - 1.0) <= tol;
    return r;
}

ojson run_d_membership(const Manifest& m, const Options& opt) {
    ojson r = report_skeleton("d-membership", "measure_topology_neighborhood");
    const auto picked = pick_elements(m, opt, 1);
    const nclp::Element& a = picked.front().second;
    const nclp::DNeighborhood nbhd(opt.epsilon, opt.delta, m.algebra);
    r["inputs"]["algebra"] = nclp::io::to_json(m.algebra);
    r["inputs"]["element"] = picked.front().first;
    r["inputs"]["epsilon"] = opt.epsilon;
    r["inputs"]["delta"] = opt.delta;
    const nclp::DMembership dm = nclp::d_membership(a, nbhd);
    r["outputs"]["member"] = dm.member;
    r["outputs"]["witness"] = dm.witness ? nclp::io::to_json(*dm.witness) : ojson(nullptr);
    r["outputs"]["adjoint_symmetric"] = nclp::adjoint_symmetry_check(a, nbhd);
    r["tolerance"] = effective_tol(opt, nclp::kDeltaSlack);
    r["pass"] = true;
    return r;
}

ojson run_min_epsilon(const Manifest& m, const Options& opt) {
    ojson r = report_skeleton("min-epsilon", "distribution_function_inversion");
    const auto picked = pick_elements(m, opt, 1);
    const nclp::Element& a = picked.front().second;
    r["inputs"]["algebra"] = nclp::io::to_json(m.algebra);
    r["inputs"]["element"] = picked.front().first;
    r["inputs"]["delta"] = opt.delta;
    const double value = nclp::minimal_epsilon(a, opt.delta);
    r["outputs"]["value"] = value;
    bool attained = true;
    if (value > 0.0)
        attained = nclp::d_membership(a, nclp::DNeighborhood(value, opt.delta, m.algebra)).member;
    r["outputs"]["attained"] = attained;
    r["tolerance"] = effective_tol(opt, nclp::kDeltaSlack);
    r["pass"] = attained;
    return r;
}

ojson run_gns(const Manifest& m, const Options& opt) {
    ojson r = report_skeleton("gns", "gns_representation");
    const auto picked = pick_functionals(m, opt, 1);
    const nclp::FunctionalSpec& f = picked.front().second;
    r["inputs"]["algebra"] = nclp::io::to_json(m.algebra);
    r["inputs"]["functional"] = picked.front().first;
    const nclp::GnsData g = nclp::gns_construct(f);
    double fid = 0.0;
    for (const nclp::Element& e : nclp::matrix_unit_basis(f.algebra)) {
        const nclp::cdouble lhs =
            g.cyclic_vector.adjoint() * (g.represent(e) * g.cyclic_vector);
        fid = std::max(fid, std::abs(lhs - nclp::trace_eval(nclp::mul(f.density, e))));
    }
    const double tol = effective_tol(opt, nclp::kFidelityTol);
    r["outputs"]["dimension"] = g.dim;
    r["outputs"]["domain_dimension"] = int(g.domain_basis.size());
    r["residuals"]["fidelity"] = fid;
    r["tolerance"] = tol;
    r["pass"] = fid <= tol * (1.0 + nclp::operator_norm(f.density));
    return r;
}

ojson run_modular_flow(const Manifest& m, const Options& opt) {
    ojson r = report_skeleton("modular-flow", "modular_automorphism_group");
    const auto pf = pick_functionals(m, opt, 1);
    const auto pe = pick_elements(m, opt, 1);
    const nclp::FunctionalSpec& f = pf.front().second;
    const nclp::Element& a = pe.front().second;
    const std::vector<double> ts = opt.t_samples.empty() ? std::vector<double>{1.0} : opt.t_samples;
    r["inputs"]["algebra"] = nclp::io::to_json(m.algebra);
    r["inputs"]["functional"] = pf.front().first;
    r["inputs"]["element"] = pe.front().first;
    r["inputs"]["t"] = ts;
    const double tol = effective_tol(opt, nclp::kResidualTol);
    double worst = 0.0;
    ojson flows = ojson::array();
    for (double t : ts) {
        const nclp::Element flowed = nclp::modular_flow(f, a, t);
        const double inv = std::abs(nclp::trace_eval(nclp::mul(f.density, flowed)) -
                                    nclp::trace_eval(nclp::mul(f.density, a)));
        const double iso = std::abs(nclp::operator_norm(flowed) - nclp::operator_norm(a));
        worst = std::max(worst, std::max(inv, iso));
        ojson entry;
        entry["t"] = t;
        entry["element"] = nclp::io::to_json(flowed);
        entry["invariance_residual"] = inv;
        entry["isometry_residual"] = iso;
        flows.push_back(std::move(entry));
    }
    r["outputs"]["flows"] = std::move(flows);
    r["residuals"]["worst"] = worst;
    r["tolerance"] = tol;
    r["pass"] = worst <= tol * (1.0 + nclp::operator_norm(a));
    return r;
}

ojson run_kms(const Manifest& m, const Options& opt) {
    ojson r = report_skeleton("kms", "modular_condition");
    const auto pf = pick_functionals(m, opt, 1);
    const auto pe = pick_elements(m, opt, 2);
    const nclp::FunctionalSpec& f = pf.front().second;
    const nclp::Element& a = pe[0].second;
    const nclp::Element& b = pe[1].second;
    const std::vector<double> ts =
        opt.t_samples.empty() ? std::vector<double>{-2.0, -1.0, 0.0, 1.0, 2.0} : opt.t_samples;
    r["inputs"]["algebra"] = nclp::io::to_json(m.algebra);
    r["inputs"]["functional"] = pf.front().first;
    r["inputs"]["elements"] = ojson::array({pe[0].first, pe[1].first});
    r["inputs"]["t"] = ts;
    const nclp::KmsResult kr = nclp::kms_check(f, a, b, ts);
    const double tol = effective_tol(opt, nclp::kResidualTol);
    r["outputs"]["max_residual"] = kr.max_residual;
    r["residuals"]["boundary"] = kr.max_residual;
    r["tolerance"] = tol;
    r["pass"] =
        kr.max_residual <= tol * (1.0 + nclp::operator_norm(a) * nclp::operator_norm(b));
    return r;
}

ojson run_centralizer(const Manifest& m, const Options& opt) {
    ojson r = report_skeleton("centralizer", "centralizer_structure");
    const auto picked = pick_functionals(m, opt, 1);
    const nclp::FunctionalSpec& f = picked.front().second;
    r["inputs"]["algebra"] = nclp::io::to_json(m.algebra);
    r["inputs"]["functional"] = picked.front().first;
    const nclp::CentralizerData cd = nclp::centralizer(f);
    r["outputs"]["dimension"] = cd.dimension;
    r["tolerance"] = effective_tol(opt, nclp::kSpectralTol);
    r["pass"] = true;
    return r;
}

ojson run_rn_sakai(const Manifest& m, const Options& opt) {
    ojson r = report_skeleton("rn-sakai", "radon_nikodym_sakai");
    const auto picked = pick_functionals(m, opt, 2);
    const nclp::FunctionalSpec& f = picked[0].second;
    const nclp::FunctionalSpec& g = picked[1].second;
    r["inputs"]["algebra"] = nclp::io::to_json(m.algebra);
    r["inputs"]["functionals"] = ojson::array({picked[0].first, picked[1].first});
    const nclp::Element h = nclp::sakai_rn(f, g);
    double worst = 0.0;
    for (const nclp::Element& e : nclp::matrix_unit_basis(m.algebra))
        worst = std::max(worst, std::abs(nclp::trace_eval(nclp::mul(g.density, e)) -
                                         nclp::trace_eval(nclp::mul(
                                             f.density, nclp::mul(h, nclp::mul(e, h))))));
    const double tol = effective_tol(opt, nclp::kResidualTol);
    r["outputs"]["derivative"] = nclp::io::to_json(h);
    r["outputs"]["derivative_norm"] = nclp::operator_norm(h);
    r["residuals"]["reproduction"] = worst;
    r["tolerance"] = tol;
    r["pass"] = worst <= tol * (1.0 + nclp::operator_norm(g.density));
    return r;
}

ojson run_rn_pt(const Manifest& m, const Options& opt) {
    ojson r = report_skeleton("rn-pt", "radon_nikodym_pedersen_takesaki");
    const auto picked = pick_functionals(m, opt, 2);
    const nclp::FunctionalSpec& f = picked[0].second;
    const nclp::FunctionalSpec& g = picked[1].second;
    r["inputs"]["algebra"] = nclp::io::to_json(m.algebra);
    r["inputs"]["functionals"] = ojson::array({picked[0].first, picked[1].first});
    const nclp::Element h = nclp::pt_rn(f, g);
    double worst = 0.0;
    for (const nclp::Element& e : nclp::matrix_unit_basis(m.algebra))
        worst = std::max(worst,
                         std::abs(nclp::trace_eval(nclp::mul(g.density, e)) -
                                  nclp::trace_eval(nclp::mul(f.density, nclp::mul(h, e)))));
    const double tol = effective_tol(opt, nclp::kResidualTol);
    r["outputs"]["derivative"] = nclp::io::to_json(h);
    r["outputs"]["derivative_norm"] = nclp::operator_norm(h);
    r["residuals"]["reproduction"] = worst;
    r["tolerance"] = tol;
    r["pass"] = worst <= tol * (1.0 + nclp::operator_norm(g.density));
    return r;
}

ojson run_rn_commutant(const Manifest& m, const Options& opt) {
    ojson r = report_skeleton("rn-commutant", "radon_nikodym_commutant");
    const auto picked = pick_functionals(m, opt, 2);
    const nclp::FunctionalSpec& f = picked[0].second;
    const nclp::FunctionalSpec& g = picked[1].second;
    r["inputs"]["algebra"] = nclp::io::to_json(m.algebra);
    r["inputs"]["functionals"] = ojson::array({picked[0].first, picked[1].first});
    const nclp::CommutantRnResult crn = nclp::commutant_rn(f, g);
    const nclp::GnsData gns = nclp::gns_construct(f);
    double worst = 0.0;
    for (const nclp::Element& e : nclp::matrix_unit_basis(m.algebra)) {
        const nclp::cdouble got =
            gns.cyclic_vector.adjoint() *
            (crn.gns_operator * (gns.represent(e) * gns.cyclic_vector));
        worst = std::max(worst,
                         std::abs(got - nclp::trace_eval(nclp::mul(g.density, e))));
    }
    const double tol = effective_tol(opt, nclp::kResidualTol);
    r["outputs"]["right_multiplier"] = nclp::io::to_json(crn.right_multiplier);
    r["outputs"]["gns_operator"] = nclp::io::to_json(crn.gns_operator);
    r["residuals"]["reproduction"] = worst;
    r["tolerance"] = tol;
    r["pass"] = worst <= tol * (1.0 + nclp::operator_norm(g.density));
    return r;
}

ojson run_polar_functional(const Manifest& m, const Options& opt) {
    ojson r = report_skeleton("polar-functional", "functional_polar_decomposition");
    const auto picked = pick_functionals(m, opt, 1);
    const nclp::FunctionalSpec& f = picked.front().second;
    r["inputs"]["algebra"] = nclp::io::to_json(m.algebra);
    r["inputs"]["functional"] = picked.front().first;
    const nclp::FunctionalPolarData fp = nclp::functional_polar(f);
    double worst = 0.0;
    for (const nclp::Element& e : nclp::matrix_unit_basis(m.algebra)) {
        const nclp::cdouble lhs = nclp::trace_eval(nclp::mul(f.density, e));
        const nclp::cdouble rhs =
            nclp::trace_eval(nclp::mul(fp.modulus.density, nclp::mul(e, fp.u)));
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    const double tol = effective_tol(opt, nclp::kSpectralTol);
    r["outputs"]["partial_isometry"] = nclp::io::to_json(fp.u);
    r["outputs"]["modulus_density"] = nclp::io::to_json(fp.modulus.density);
    r["outputs"]["modulus_norm"] = nclp::functional_norm(fp.modulus);
    r["residuals"]["reconstruction"] = worst;
    r["tolerance"] = tol;
    r["pass"] = worst <= tol * (1.0 + nclp::operator_norm(f.density));
    return r;
}

ojson run_regularize(const Manifest& m, const Options& opt) {
    ojson r = report_skeleton("regularize", "gaussian_regularization");
    const auto pf = pick_functionals(m, opt, 1);
    const auto pe = pick_elements(m, opt, 1);
    const nclp::FunctionalSpec& f = pf.front().second;
    const nclp::Element& a = pe.front().second;
    r["inputs"]["algebra"] = nclp::io::to_json(m.algebra);
    r["inputs"]["functional"] = pf.front().first;
    r["inputs"]["element"] = pe.front().first;
    r["inputs"]["n"] = opt.n;
    const nclp::Element an = nclp::gaussian_regularization(f, a, opt.n, 64);
    r["outputs"]["regularized"] = nclp::io::to_json(an);
    r["outputs"]["distance_to_input"] = nclp::norm_distance(an, a);
    r["tolerance"] = effective_tol(opt, nclp::kQuadratureTol);
    r["pass"] = true;
    return r;
}

ojson run_weight_domains(const Manifest& m, const Options& opt) {
    ojson r = report_skeleton("weight-domains", "weight_domain_structure");
    const auto picked = pick_functionals(m, opt, 1);
    const nclp::FunctionalSpec& f = picked.front().second;
    r["inputs"]["algebra"] = nclp::io::to_json(m.algebra);
    r["inputs"]["functional"] = picked.front().first;
    const nclp::WeightDomains wd = nclp::weight_domains(f);
    r["outputs"]["n_phi_dimension"] = int(wd.n_phi_basis.size());
    r["outputs"]["m_phi_dimension"] = int(wd.m_phi_basis.size());
    r["outputs"]["null_ideal_dimension"] = int(wd.null_ideal_basis.size());
    r["outputs"]["corner_projection"] = nclp::io::to_json(wd.corner_projection);
    r["outputs"]["f_phi"] = wd.f_phi_description;
    r["tolerance"] = effective_tol(opt, nclp::kSpectralTol);
    r["pass"] = true;
    return r;
}

ojson run_flow_commute(const Manifest& m, const Options& opt) {
    ojson r = report_skeleton("flow-commute", "flow_commutation_equivalence");
    const auto picked = pick_functionals(m, opt, 2);
    const nclp::FunctionalSpec& f = picked[0].second;
    const nclp::FunctionalSpec& g = picked[1].second;
    const std::vector<double> ts =
        opt.t_samples.empty() ? std::vector<double>{0.9, -0.4} : opt.t_samples;
    r["inputs"]["algebra"] = nclp::io::to_json(m.algebra);
    r["inputs"]["functionals"] = ojson::array({picked[0].first, picked[1].first});
    r["inputs"]["t"] = ts;
    const nclp::FlowCommutation fc = nclp::flow_commutation_check(f, g, ts);
    r["outputs"]["invariance_fg"] = fc.invariance_fg;
    r["outputs"]["invariance_gf"] = fc.invariance_gf;
    r["outputs"]["flows_commute"] = fc.flows_commute;
    r["residuals"]["invariance_fg"] = fc.residual_fg;
    r["residuals"]["invariance_gf"] = fc.residual_gf;
    r["residuals"]["commutation"] = fc.residual_comm;
    r["tolerance"] = effective_tol(opt, nclp::kSpectralTol);
    r["pass"] = true;
    return r;
}

// -------------------------------------------------------------------- sweep

struct SuiteOutcome {
    std::string name;
    int trials = 0;
    double max_residual = 0.0;
    bool pass = true;

    void feed(double residual, double budget) {
        ++trials;
        max_residual = std::max(max_residual, residual);
        if (residual > budget) pass = false;
    }
};

std::vector<nclp::AlgebraSpec> sweep_algebras() {
    return {nclp::AlgebraSpec({2}, {1.0}), nclp::AlgebraSpec({3}, {0.5}),
            nclp::AlgebraSpec({1, 2}, {2.0, 0.7}), nclp::AlgebraSpec({2, 3}, {1.0, 0.3})};
}

ojson run_sweep(const Options& opt) {
    ojson r = report_skeleton("sweep", "property_sweep");
    r["inputs"]["seed"] = opt.seed;
    nclp::Rng rng(opt.seed);
    const auto algebras = sweep_algebras();
    std::vector<SuiteOutcome> suites;

    {
        SuiteOutcome s{"holder_pair"};
        for (const auto& alg : algebras)
            for (int trial = 0; trial < 75; ++trial) {
                const double ps[] = {1.0, 1.5, 2.0, 3.0};
                const double p = ps[trial % 4];
                const double q = p > 1.0 ? p / (p - 1.0) : nclp::kInfiniteP;
                const auto hr = nclp::holder_bound({{nclp::random_element(alg, rng), p},
                                                    {nclp::random_element(alg, rng), q}});
                s.feed(std::max(0.0, hr.lhs - hr.rhs) / (1.0 + hr.rhs), nclp::kSpectralTol);
            }
        suites.push_back(s);
    }
    {
        SuiteOutcome s{"holder_three_factor"};
        for (const auto& alg : algebras)
            for (int trial = 0; trial < 50; ++trial) {
                const auto hr = nclp::holder_bound({{nclp::random_element(alg, rng), 3.0},
                                                    {nclp::random_element(alg, rng), 3.0},
                                                    {nclp::random_element(alg, rng), 3.0}});
                s.feed(std::max(0.0, hr.lhs - hr.rhs) / (1.0 + hr.rhs), nclp::kSpectralTol);
            }
        suites.push_back(s);
    }
    {
        SuiteOutcome s{"holder_target_r"};
        for (const auto& alg : algebras)
            for (int trial = 0; trial < 50; ++trial) {
                // 1/2 + 1/6 = 2/3 = 1/1.5
                const auto hr = nclp::holder_bound({{nclp::random_element(alg, rng), 2.0},
                                                    {nclp::random_element(alg, rng), 6.0}},
                                                   1.5);
                s.feed(std::max(0.0, hr.lhs - hr.rhs) / (1.0 + hr.rhs), nclp::kSpectralTol);
            }
        suites.push_back(s);
    }
    {
        SuiteOutcome s{"minkowski"};
        for (const auto& alg : algebras)
            for (int trial = 0; trial < 50; ++trial) {
                const double ps[] = {1.0, 1.5, 2.0, 3.0, nclp::kInfiniteP};
                const double p = ps[trial % 5];
                const nclp::Element a = nclp::random_element(alg, rng);
                const nclp::Element b = nclp::random_element(alg, rng);
                const double lhs = nclp::lp_norm(nclp::add(a, b), p).value;
                const double rhs = nclp::lp_norm(a, p).value + nclp::lp_norm(b, p).value;
                s.feed(std::max(0.0, lhs - rhs) / (1.0 + rhs), nclp::kSpectralTol);
            }
        suites.push_back(s);
    }
    {
        SuiteOutcome s{"dual_witness"};
        for (const auto& alg : algebras)
            for (int trial = 0; trial < 40; ++trial) {
                const double ps[] = {1.0, 1.5, 2.0, 3.0};
                const double p = ps[trial % 4];
                const nclp::Element a = nclp::random_element(alg, rng);
                const auto dw = nclp::dual_norm_witness(a, p);
                const double q = p > 1.0 ? p / (p - 1.0) : nclp::kInfiniteP;
                const double np = nclp::lp_norm(a, p).value;
                const double res = std::max(std::abs(dw.pairing - np) / (1.0 + np),
                                            std::abs(nclp::lp_norm(dw.witness, q).value - 1.0));
                s.feed(res, nclp::kSpectralTol);
            }
        suites.push_back(s);
    }
    {
        SuiteOutcome s{"trace_norm_chain"};
        for (const auto& alg : algebras)
            for (int trial = 0; trial < 40; ++trial) {
                const auto tb = nclp::trace_norm_bound_check(nclp::random_element(alg, rng),
                                                             nclp::random_element(alg, rng));
                const double res = std::max(std::max(0.0, tb.lhs1 - tb.lhs2),
                                            std::max(0.0, tb.lhs2 - tb.rhs)) /
                                   (1.0 + tb.rhs);
                s.feed(res, nclp::kSpectralTol);
            }
        suites.push_back(s);
    }
    {
        SuiteOutcome s{"d_arithmetic"};
        for (const auto& alg : algebras)
            for (int trial = 0; trial < 40; ++trial) {
                const nclp::Element a = nclp::random_element(alg, rng);
                const nclp::Element b = nclp::random_element(alg, rng);
                const double tau1 = alg.trace_of_identity();
                std::uniform_real_distribution<double> cut(0.2, 0.9);
                const double e1 = std::max(1e-6, cut(rng) * nclp::operator_norm(a));
                const double e2 = std::max(1e-6, cut(rng) * nclp::operator_norm(b));
                const auto w1 = nclp::d_membership(a, nclp::DNeighborhood(e1, tau1, alg));
                const auto w2 = nclp::d_membership(b, nclp::DNeighborhood(e2, tau1, alg));
                const double d1 =
                    tau1 - nclp::trace_eval(*w1.witness).real() + nclp::kDeltaSlack;
                const double d2 =
                    tau1 - nclp::trace_eval(*w2.witness).real() + nclp::kDeltaSlack;
                const auto da = nclp::d_arithmetic_check(a, b, e1, d1, e2, d2);
                s.feed((da.sum_ok && da.prod_ok) ? 0.0 : 1.0, 0.5);
                if (!nclp::adjoint_symmetry_check(a, nclp::DNeighborhood(e1, d1, alg)))
                    s.feed(1.0, 0.5);
            }
        suites.push_back(s);
    }
    {
        SuiteOutcome s{"min_epsilon"};
        for (const auto& alg : algebras)
            for (int trial = 0; trial < 40; ++trial) {
                const nclp::Element a = nclp::random_element(alg, rng);
                std::uniform_real_distribution<double> frac(0.0, 1.0);
                const double delta = frac(rng) * alg.trace_of_identity();
                const double v = nclp::minimal_epsilon(a, delta);
                double res = 0.0;
                if (v > 0.0 &&
                    !nclp::d_membership(a, nclp::DNeighborhood(v, delta, alg)).member)
                    res = 1.0;
                if (v > nclp::operator_norm(a) + nclp::kSpectralTol * (1.0 + v)) res = 1.0;
                s.feed(res, 0.5);
            }
        suites.push_back(s);
    }
    {
        SuiteOutcome s{"gns_fidelity"};
        for (const auto& alg : algebras)
            for (int trial = 0; trial < 6; ++trial) {
                const nclp::FunctionalSpec f = (trial % 2 == 0)
                                                   ? nclp::random_faithful_state(alg, rng)
                                                   : nclp::random_degenerate_state(alg, rng);
                const nclp::GnsData g = nclp::gns_construct(f);
                double fid = 0.0;
                for (const nclp::Element& e : nclp::matrix_unit_basis(alg)) {
                    const nclp::cdouble lhs =
                        g.cyclic_vector.adjoint() * (g.represent(e) * g.cyclic_vector);
                    fid = std::max(fid,
                                   std::abs(lhs - nclp::trace_eval(nclp::mul(f.density, e))));
                }
                s.feed(fid / (1.0 + nclp::operator_norm(f.density)), nclp::kFidelityTol);
            }
        suites.push_back(s);
    }
    {
        SuiteOutcome s{"kms_boundary"};
        for (const auto& alg : algebras)
            for (int trial = 0; trial < 5; ++trial) {
                const nclp::FunctionalSpec f = nclp::random_faithful_state(alg, rng);
                const nclp::Element a = nclp::random_element(alg, rng);
                const nclp::Element b = nclp::random_element(alg, rng);
                const auto kr = nclp::kms_check(f, a, b, {-2.0, -1.0, 0.0, 1.0, 2.0});
                s.feed(kr.max_residual /
                           (1.0 + nclp::operator_norm(a) * nclp::operator_norm(b)),
                       nclp::kResidualTol);
            }
        suites.push_back(s);
    }
    {
        SuiteOutcome s{"rn_sakai"};
        for (const auto& alg : algebras)
            for (int trial = 0; trial < 6; ++trial) {
                const nclp::FunctionalSpec f = nclp::random_faithful_state(alg, rng);
                nclp::Element c = nclp::random_positive(alg, rng);
                c = nclp::scalar_mul(0.9 / (nclp::operator_norm(c) + 1e-12), c);
                const nclp::Element root = nclp::element_sqrt(f.density);
                nclp::Element sigma = nclp::mul(root, nclp::mul(c, root));
                sigma = nclp::scalar_mul(0.5, nclp::add(sigma, nclp::adjoint(sigma)));
                const nclp::FunctionalSpec g = nclp::make_bounded_functional(sigma);
                const nclp::Element h = nclp::sakai_rn(f, g);
                double worst = 0.0;
                for (const nclp::Element& e : nclp::matrix_unit_basis(alg))
                    worst = std::max(
                        worst, std::abs(nclp::trace_eval(nclp::mul(g.density, e)) -
                                        nclp::trace_eval(nclp::mul(
                                            f.density, nclp::mul(h, nclp::mul(e, h))))));
                s.feed(worst / (1.0 + nclp::operator_norm(sigma)), nclp::kResidualTol);
            }
        suites.push_back(s);
    }
    {
        SuiteOutcome s{"rn_pt"};
        for (const auto& alg : algebras)
            for (int trial = 0; trial < 6; ++trial) {
                const nclp::FunctionalSpec f = nclp::random_faithful_state(alg, rng);
                // Commuting sigma: a positive polynomial in rho, rescaled
                // under the identity so psi <= phi.
                std::uniform_real_distribution<double> coef(0.1, 1.0);
                const double c0 = coef(rng), c1 = coef(rng);
                nclp::Element sigma =
                    nclp::add(nclp::scalar_mul(c0, f.density),
                              nclp::scalar_mul(c1, nclp::mul(f.density, f.density)));
                sigma = nclp::scalar_mul(
                    0.8 / (c0 + c1 * nclp::operator_norm(f.density)), sigma);
                const nclp::FunctionalSpec g = nclp::make_bounded_functional(sigma);
                const nclp::Element h = nclp::pt_rn(f, g);
                double worst = 0.0;
                for (const nclp::Element& e : nclp::matrix_unit_basis(alg))
                    worst = std::max(worst,
                                     std::abs(nclp::trace_eval(nclp::mul(g.density, e)) -
                                              nclp::trace_eval(nclp::mul(
                                                  f.density, nclp::mul(h, e)))));
                s.feed(worst / (1.0 + nclp::operator_norm(sigma)), nclp::kResidualTol);
                if (nclp::operator_norm(h) > 1.0 + nclp::kResidualTol) s.feed(1.0, 0.5);
            }
        suites.push_back(s);
    }
    {
        SuiteOutcome s{"rn_pt_noncommuting_rejected"};
        for (const auto& alg : algebras)
            for (int trial = 0; trial < 4; ++trial) {
                const nclp::FunctionalSpec f = nclp::random_faithful_state(alg, rng);
                const nclp::FunctionalSpec g = nclp::random_faithful_state(alg, rng);
                if (nclp::commutator_norm(f.density, g.density) < 1e-6) continue;
                bool raised = false;
                try {
                    (void)nclp::pt_rn(f, g);
                } catch (const nclp::NotInvariant&) {
                    raised = true;
                }
                s.feed(raised ? 0.0 : 1.0, 0.5);
            }
        suites.push_back(s);
    }
    {
        SuiteOutcome s{"rn_commutant"};
        for (const auto& alg : algebras)
            for (int trial = 0; trial < 3; ++trial) {
                const nclp::FunctionalSpec f = nclp::random_faithful_state(alg, rng);
                nclp::Element c = nclp::random_positive(alg, rng);
                c = nclp::scalar_mul(0.9 / (nclp::operator_norm(c) + 1e-12), c);
                const nclp::Element root = nclp::element_sqrt(f.density);
                nclp::Element sigma = nclp::mul(root, nclp::mul(c, root));
                sigma = nclp::scalar_mul(0.5, nclp::add(sigma, nclp::adjoint(sigma)));
                const nclp::FunctionalSpec g = nclp::make_bounded_functional(sigma);
                const nclp::CommutantRnResult crn = nclp::commutant_rn(f, g);
                const nclp::GnsData gns = nclp::gns_construct(f);
                double worst = 0.0;
                for (const nclp::Element& e : nclp::matrix_unit_basis(alg)) {
                    const nclp::cdouble got =
                        gns.cyclic_vector.adjoint() *
                        (crn.gns_operator * (gns.represent(e) * gns.cyclic_vector));
                    worst = std::max(
                        worst, std::abs(got - nclp::trace_eval(nclp::mul(g.density, e))));
                }
                s.feed(worst / (1.0 + nclp::operator_norm(sigma)), nclp::kResidualTol);
            }
        suites.push_back(s);
    }
    {
        SuiteOutcome s{"regularization"};
        for (const auto& alg : algebras)
            for (int trial = 0; trial < 2; ++trial) {
                const nclp::FunctionalSpec f = nclp::random_faithful_state(alg, rng);
                const nclp::Element a = nclp::random_self_adjoint(alg, rng);
                double prev = -1.0;
                double res = 0.0;
                for (double n : {1.0, 10.0, 100.0}) {
                    const nclp::Element an = nclp::gaussian_regularization(f, a, n, 64);
                    const double dist = nclp::norm_distance(an, a);
                    if (prev >= 0.0 && dist > prev + nclp::kSpectralTol * (1.0 + prev))
                        res = 1.0;
                    prev = dist;
                }
                s.feed(res, 0.5);
            }
        suites.push_back(s);
    }
    {
        SuiteOutcome s{"flow_commutation"};
        for (const auto& alg : algebras)
            for (int trial = 0; trial < 2; ++trial) {
                const nclp::FunctionalSpec f = nclp::random_faithful_state(alg, rng);
                // Commuting partner: functional calculus of the same density.
                const nclp::Element mapped = nclp::functional_calculus(
                    [](double t) { return 0.2 + t * t; }, f.density);
                const nclp::FunctionalSpec g = nclp::make_bounded_functional(
                    nclp::scalar_mul(1.0 / nclp::trace_eval(mapped).real(), mapped));
                const auto fc = nclp::flow_commutation_check(f, g, {0.9, -0.4});
                double res = fc.flows_commute ? 0.0 : 1.0;
                const nclp::FunctionalSpec h = nclp::random_faithful_state(alg, rng);
                if (nclp::commutator_norm(f.density, h.density) > 1e-6) {
                    const auto fc2 = nclp::flow_commutation_check(f, h, {0.9, -0.4});
                    if (fc2.flows_commute) res = 1.0;
                }
                s.feed(res, 0.5);
            }
        suites.push_back(s);
    }
    {
        SuiteOutcome s{"weight_domains"};
        for (const auto& alg : algebras)
            for (int trial = 0; trial < 3; ++trial) {
                std::vector<int> ranks;
                for (int n : alg.block_dims) ranks.push_back(n > 1 ? 1 : 0);
                const nclp::Element pinf = nclp::random_projection(alg, rng, &ranks);
                const nclp::Element corner =
                    nclp::sub(nclp::identity_element(alg), pinf);
                nclp::Element dens =
                    nclp::mul(corner, nclp::mul(nclp::random_positive(alg, rng), corner));
                dens = nclp::scalar_mul(0.5, nclp::add(dens, nclp::adjoint(dens)));
                const nclp::FunctionalSpec f = nclp::make_functional(dens, pinf);
                const auto wd = nclp::weight_domains(f);
                int expected = 0;
                for (std::size_t k = 0; k < alg.block_count(); ++k)
                    expected += alg.block_dims[k] * (alg.block_dims[k] - ranks[k]);
                s.feed(int(wd.n_phi_basis.size()) == expected ? 0.0 : 1.0, 0.5);
                const auto ev = nclp::functional_eval(f, nclp::identity_element(alg));
                s.feed(ev.is_infinite == (nclp::operator_norm(pinf) > 0.5) ? 0.0 : 1.0, 0.5);
            }
        suites.push_back(s);
    }

    ojson out = ojson::array();
    bool all = true;
    int total = 0;
    for (const SuiteOutcome& s : suites) {
        ojson e;
        e["suite"] = s.name;
        e["trials"] = s.trials;
        e["max_residual"] = s.max_residual;
        e["pass"] = s.pass;
        out.push_back(std::move(e));
        all = all && s.pass;
        total += s.trials;
    }
    r["outputs"]["suites"] = std::move(out);
    r["outputs"]["total_trials"] = total;
    r["tolerance"] = effective_tol(opt, nclp::kResidualTol);
    r["pass"] = all;
    return r;
}

// ----------------------------------------------------------------- plumbing

using Runner = ojson (*)(const Manifest&, const Options&);

struct CommandEntry {
    const char* name;
    Runner runner;
    bool needs_manifest;
};

constexpr CommandEntry kCommands[] = {
    {"norm", run_norm, true},
    {"holder", run_holder, true},
    {"minkowski", run_minkowski, true},
    {"dual-witness", run_dual_witness, true},
    {"d-membership", run_d_membership, true},
    {"min-epsilon", run_min_epsilon, true},
    {"gns", run_gns, true},
    {"modular-flow", run_modular_flow, true},
    {"kms", run_kms, true},
    {"centralizer", run_centralizer, true},
    {"rn-sakai", run_rn_sakai, true},
    {"rn-pt", run_rn_pt, true},
    {"rn-commutant", run_rn_commutant, true},
    {"polar-functional", run_polar_functional, true},
    {"regularize", run_regularize, true},
    {"weight-domains", run_weight_domains, true},
    {"flow-commute", run_flow_commute, true},
    {"sweep", nullptr, false},
};

void emit(const ojson& report, const Options& opt) {
    const std::string text = report.dump(2) + "\n";
    if (!opt.out_path.empty())
        nclp::io::write_file(opt.out_path, text);
    else
        std::cout << text;
}

std::string error_name(const std::exception& e) {
    const std::string what = e.what();
    const auto colon = what.find(':');
    return colon == std::string::npos ? what : what.substr(0, colon);
}

} // namespace

int main(int argc, char** argv) {
    const auto start = std::chrono::steady_clock::now();
    Options opt;
    std::string command;

    CLI::App app{"noncommutative L_p spaces on finite-dimensional von Neumann algebras"};
    app.require_subcommand(1);
    for (const CommandEntry& entry : kCommands) {
        CLI::App* sub = app.add_subcommand(entry.name);
        sub->callback([&command, name = std::string(entry.name)]() { command = name; });
        if (entry.needs_manifest)
            sub->add_option("--manifest", opt.manifest_path, "input manifest (JSON)")
                ->required();
        else
            sub->add_option("--manifest", opt.manifest_path, "ignored by sweep");
        sub->add_option("--element", opt.element_names, "element name (repeatable)");
        sub->add_option("--functional", opt.functional_names, "functional name (repeatable)");
        sub->add_option("--p", opt.p_raw, "exponent, real >= 1 or 'inf' (repeatable)");
        sub->add_option("--r", opt.r_raw, "target exponent for holder");
        sub->add_option("--epsilon", opt.epsilon, "norm cut of D(epsilon, delta)");
        sub->add_option("--delta", opt.delta, "trace-mass allowance");
        sub->add_option("--t", opt.t_samples, "flow time (repeatable)");
        sub->add_option("--n", opt.n, "Gaussian regularization parameter");
        sub->add_option("--seed", opt.seed, "seed for the sweep generators");
        sub->add_option("--tol", opt.tol, "override the pass tolerance");
        sub->add_option("--out", opt.out_path, "write the report to a file");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        const std::string first = argc > 1 ? argv[1] : "";
        bool known = false;
        for (const CommandEntry& entry : kCommands)
            if (first == entry.name) known = true;
        ojson err;
        err["schema_version"] = "1";
        if (!known && !first.empty() && first[0] != '-') {
            err["error"] = "UnknownCommand";
            err["detail"] = "no command named '" + first + "'";
        } else {
            err["error"] = "UsageError";
            err["detail"] = e.what();
        }
        std::cout << err.dump(2) << "\n";
        return 2;
    }

    int code = 0;
    try {
        ojson report;
        if (command == "sweep") {
            report = run_sweep(opt);
        } else {
            const Manifest manifest = nclp::io::parse_manifest(nclp::io::read_file(opt.manifest_path));
            for (const CommandEntry& entry : kCommands)
                if (command == entry.name) report = entry.runner(manifest, opt);
        }
        code = report["pass"].get<bool>() ? 0 : 1;
        emit(report, opt);
    } catch (const nclp::SchemaError& e) {
        ojson err;
        err["schema_version"] = "1";
        err["command"] = command;
        err["error"] = "SchemaError";
        err["path"] = e.path;
        err["detail"] = e.what();
        std::cout << err.dump(2) << "\n";
        code = 2;
    } catch (const nclp::Error& e) {
        ojson err;
        err["schema_version"] = "1";
        err["command"] = command;
        err["error"] = error_name(e);
        err["detail"] = e.what();
        std::cout << err.dump(2) << "\n";
        code = 1;
    }

    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    std::fprintf(stderr, "wall_clock_seconds %.6f\n", elapsed.count());
    return code;
}
