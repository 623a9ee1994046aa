#pragma once

// JSON interchange for algebras, elements and functionals.
//
// Wire conventions, chosen so fixtures stay hand-writable:
//   complex     -> [re, im]; a bare number is accepted on input as a real
//   matrix      -> row-major nested arrays
//   element     -> list of per-block matrices; for single-block algebras a
//                  bare matrix is accepted on input
//   functional  -> {"density": element, "infinite_part": element|null,
//                   "positive": bool}
//   manifest    -> {"schema_version": "1", "algebra": {...},
//                   "elements": {...}, "functionals": {...}}
//
// Serialization always emits the canonical long forms, so
// parse(serialize(x)) round-trips bit-exactly with the shortest round-trip
// float formatting of the JSON writer. Structural problems raise SchemaError
// with a JSON-pointer path; flags claimed by the input (such as "positive")
// are recomputed, never trusted, and a lie raises InvariantError naming the
// violated invariant.

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "nclp/algebra.hpp"
#include "nclp/functionals.hpp"
#include "nclp/spectral.hpp"

namespace nclp::io {

using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------- serialize

inline ojson to_json(cdouble z) { return ojson::array({z.real(), z.imag()}); }

inline ojson to_json(const Matrix& m) {
    ojson rows = ojson::array();
    for (int i = 0; i < m.rows(); ++i) {
        ojson row = ojson::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline ojson to_json(const Element& a) {
    ojson blocks = ojson::array();
    for (const Matrix& b : a.blocks) blocks.push_back(to_json(b));
    return blocks;
}

inline ojson to_json(const AlgebraSpec& spec) {
    ojson j;
    j["blocks"] = spec.block_dims;
    j["trace_weights"] = spec.trace_weights;
    return j;
}

inline ojson to_json(const FunctionalSpec& f) {
    ojson j;
    j["density"] = to_json(f.density);
    if (is_bounded(f))
        j["infinite_part"] = nullptr;
    else
        j["infinite_part"] = to_json(f.infinite_part);
    j["positive"] = f.is_positive_functional;
    return j;
}

// ------------------------------------------------------------------- parse

namespace detail {

inline const ojson& expect(const ojson& j, const std::string& path, ojson::value_t t,
                           const char* what) {
    if (j.type() != t) throw SchemaError(path, std::string("expected ") + what);
    return j;
}

inline double expect_number(const ojson& j, const std::string& path) {
    if (!j.is_number()) throw SchemaError(path, "expected a number");
    return j.get<double>();
}

} // namespace detail

inline cdouble parse_complex(const ojson& j, const std::string& path) {
    if (j.is_number()) return cdouble(j.get<double>(), 0.0);
    if (!j.is_array() || j.size() != 2)
        throw SchemaError(path, "expected [re, im] or a bare real");
    return cdouble(detail::expect_number(j[0], path + "/0"),
                   detail::expect_number(j[1], path + "/1"));
}

inline Matrix parse_matrix(const ojson& j, const std::string& path, int dim) {
    detail::expect(j, path, ojson::value_t::array, "a matrix (array of rows)");
    if (int(j.size()) != dim)
        throw SchemaError(path, "expected " + std::to_string(dim) + " rows, got " +
                                    std::to_string(j.size()));
    Matrix m(dim, dim);
    for (int i = 0; i < dim; ++i) {
        const std::string rpath = path + "/" + std::to_string(i);
        detail::expect(j[i], rpath, ojson::value_t::array, "a row (array of entries)");
        if (int(j[i].size()) != dim)
            throw SchemaError(rpath, "expected " + std::to_string(dim) + " entries, got " +
                                         std::to_string(j[i].size()));
        for (int c = 0; c < dim; ++c)
            m(i, c) = parse_complex(j[i][c], rpath + "/" + std::to_string(c));
    }
    return m;
}

inline Element parse_element(const ojson& j, const std::string& path, const AlgebraSpec& spec) {
    const auto strict = [&]() {
        detail::expect(j, path, ojson::value_t::array, "a list of blocks");
        if (j.size() != spec.block_count())
            throw SchemaError(path, "expected " + std::to_string(spec.block_count()) +
                                        " blocks, got " + std::to_string(j.size()));
        std::vector<Matrix> blocks;
        blocks.reserve(spec.block_count());
        for (std::size_t k = 0; k < spec.block_count(); ++k)
            blocks.push_back(
                parse_matrix(j[k], path + "/" + std::to_string(k), spec.block_dims[k]));
        return Element(spec, std::move(blocks));
    };
    if (spec.block_count() != 1) return strict();
    try {
        return strict();
    } catch (const SchemaError&) {
        // Single-block convenience: accept a bare matrix. If that fails too,
        // surface the bare-matrix diagnostic since the short form is the one
        // fixtures use.
        return Element(spec, {parse_matrix(j, path, spec.block_dims[0])});
    }
}

inline AlgebraSpec parse_algebra(const ojson& j, const std::string& path) {
    detail::expect(j, path, ojson::value_t::object, "an object");
    if (!j.contains("blocks")) throw SchemaError(path + "/blocks", "missing");
    if (!j.contains("trace_weights")) throw SchemaError(path + "/trace_weights", "missing");
    const ojson& jb = j["blocks"];
    const ojson& jw = j["trace_weights"];
    detail::expect(jb, path + "/blocks", ojson::value_t::array, "an array of dimensions");
    detail::expect(jw, path + "/trace_weights", ojson::value_t::array, "an array of weights");
    std::vector<int> dims;
    for (std::size_t k = 0; k < jb.size(); ++k) {
        const std::string p = path + "/blocks/" + std::to_string(k);
        if (!jb[k].is_number_integer() || jb[k].get<int>() < 1)
            throw SchemaError(p, "block dimension must be an integer >= 1");
        dims.push_back(jb[k].get<int>());
    }
    std::vector<double> weights;
    for (std::size_t k = 0; k < jw.size(); ++k) {
        const std::string p = path + "/trace_weights/" + std::to_string(k);
        const double w = detail::expect_number(jw[k], p);
        if (!(w > 0.0)) throw SchemaError(p, "trace weight must be > 0");
        weights.push_back(w);
    }
    if (dims.empty()) throw SchemaError(path + "/blocks", "at least one block required");
    if (dims.size() != weights.size())
        throw SchemaError(path + "/trace_weights",
                          "expected " + std::to_string(dims.size()) + " weights, got " +
                              std::to_string(weights.size()));
    return AlgebraSpec(std::move(dims), std::move(weights));
}

inline FunctionalSpec parse_functional(const ojson& j, const std::string& path,
                                       const AlgebraSpec& spec) {
    detail::expect(j, path, ojson::value_t::object, "an object");
    if (!j.contains("density")) throw SchemaError(path + "/density", "missing");
    const Element density = parse_element(j["density"], path + "/density", spec);
    Element infinite = zero_element(spec);
    if (j.contains("infinite_part") && !j["infinite_part"].is_null())
        infinite = parse_element(j["infinite_part"], path + "/infinite_part", spec);

    // Recompute every structural invariant instead of trusting the input.
    const double ptol = kSpectralTol * (1.0 + operator_norm(infinite));
    if (!is_projection(infinite, ptol))
        throw InvariantError("is_projection", path + "/infinite_part is not a projection");
    const double otol = kSpectralTol * (1.0 + operator_norm(density));
    if (operator_norm(mul(density, infinite)) > otol ||
        operator_norm(mul(infinite, density)) > otol)
        throw InvariantError("density_infinite_orthogonality",
                             path + ": density does not vanish on the infinite part");
    FunctionalSpec f = make_functional(density, infinite);
    if (j.contains("positive")) {
        detail::expect(j["positive"], path + "/positive", ojson::value_t::boolean, "a bool");
        if (j["positive"].get<bool>() != f.is_positive_functional)
            throw InvariantError("is_positive",
                                 path + "/positive contradicts the recomputed sign");
    }
    return f;
}

// ---------------------------------------------------------------- manifest

struct Manifest {
    std::string schema_version;
    AlgebraSpec algebra;
    std::vector<std::pair<std::string, Element>> elements;
    std::vector<std::pair<std::string, FunctionalSpec>> functionals;

    const Element& element(const std::string& name) const {
        for (const auto& [n, e] : elements)
            if (n == name) return e;
        throw SchemaError("/elements/" + name, "no such element");
    }
    const FunctionalSpec& functional(const std::string& name) const {
        for (const auto& [n, f] : functionals)
            if (n == name) return f;
        throw SchemaError("/functionals/" + name, "no such functional");
    }
    // Selector defaults: a command that needs one element (functional) and
    // got no --element (--functional) flag takes the sole entry.
    const std::pair<std::string, Element>& sole_element() const {
        if (elements.size() != 1)
            throw SchemaError("/elements",
                              "manifest has " + std::to_string(elements.size()) +
                                  " elements; pass --element NAME");
        return elements.front();
    }
    const std::pair<std::string, FunctionalSpec>& sole_functional() const {
        if (functionals.size() != 1)
            throw SchemaError("/functionals",
                              "manifest has " + std::to_string(functionals.size()) +
                                  " functionals; pass --functional NAME");
        return functionals.front();
    }
};

inline Manifest parse_manifest(const std::string& text) {
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("/", std::string("not valid JSON: ") + e.what());
    }
    detail::expect(j, "/", ojson::value_t::object, "an object");
    Manifest m;
    if (!j.contains("schema_version")) throw SchemaError("/schema_version", "missing");
    detail::expect(j["schema_version"], "/schema_version", ojson::value_t::string, "a string");
    m.schema_version = j["schema_version"].get<std::string>();
    if (m.schema_version != "1")
        throw SchemaError("/schema_version", "unsupported version '" + m.schema_version + "'");
    if (!j.contains("algebra")) throw SchemaError("/algebra", "missing");
    m.algebra = parse_algebra(j["algebra"], "/algebra");
    if (j.contains("elements")) {
        detail::expect(j["elements"], "/elements", ojson::value_t::object, "an object");
        for (const auto& [name, je] : j["elements"].items())
            m.elements.emplace_back(name, parse_element(je, "/elements/" + name, m.algebra));
    }
    if (j.contains("functionals")) {
        detail::expect(j["functionals"], "/functionals", ojson::value_t::object, "an object");
        for (const auto& [name, jf] : j["functionals"].items())
            m.functionals.emplace_back(name,
                                       parse_functional(jf, "/functionals/" + name, m.algebra));
    }
    return m;
}

inline ojson to_json(const Manifest& m) {
    ojson j;
    j["schema_version"] = m.schema_version;
    j["algebra"] = to_json(m.algebra);
    ojson je = ojson::object();
    for (const auto& [name, e] : m.elements) je[name] = to_json(e);
    j["elements"] = std::move(je);
    ojson jf = ojson::object();
    for (const auto& [name, f] : m.functionals) jf[name] = to_json(f);
    j["functionals"] = std::move(jf);
    return j;
}

inline std::string serialize_manifest(const Manifest& m) { return to_json(m).dump(2) + "\n"; }

// ------------------------------------------------------------------- files

inline std::string read_file(const std::string& filename) {
    std::ifstream in(filename, std::ios::binary);
    if (!in) throw SchemaError("/", "cannot read file '" + filename + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline void write_file(const std::string& filename, const std::string& content) {
    std::ofstream out(filename, std::ios::binary);
    if (!out) throw SchemaError("/", "cannot write file '" + filename + "'");
    out << content;
}

} // namespace nclp::io
