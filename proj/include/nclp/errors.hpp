#pragma once

#include <stdexcept>
#include <string>

namespace nclp {

// Base class for every failure the library reports. Each subclass names the
// violated precondition or invariant; the what() string carries the detail.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct AlgebraMismatch : Error {
    explicit AlgebraMismatch(const std::string& msg) : Error("AlgebraMismatch: " + msg) {}
};

struct NotSelfAdjoint : Error {
    explicit NotSelfAdjoint(const std::string& msg) : Error("NotSelfAdjoint: " + msg) {}
};

struct NotAProjection : Error {
    explicit NotAProjection(const std::string& msg) : Error("NotAProjection: " + msg) {}
};

struct NotPositive : Error {
    explicit NotPositive(const std::string& msg) : Error("NotPositive: " + msg) {}
};

struct NotFaithful : Error {
    explicit NotFaithful(const std::string& msg) : Error("NotFaithful: " + msg) {}
};

struct NotAState : Error {
    explicit NotAState(const std::string& msg) : Error("NotAState: " + msg) {}
};

struct UnboundedWeight : Error {
    explicit UnboundedWeight(const std::string& msg) : Error("UnboundedWeight: " + msg) {}
};

struct UndefinedEvaluation : Error {
    explicit UndefinedEvaluation(const std::string& msg) : Error("UndefinedEvaluation: " + msg) {}
};

struct DominationFailed : Error {
    explicit DominationFailed(const std::string& msg) : Error("DominationFailed: " + msg) {}
};

struct NotInvariant : Error {
    explicit NotInvariant(const std::string& msg) : Error("NotInvariant: " + msg) {}
};

struct NotCommuting : Error {
    explicit NotCommuting(const std::string& msg) : Error("NotCommuting: " + msg) {}
};

struct NotIncreasing : Error {
    explicit NotIncreasing(const std::string& msg) : Error("NotIncreasing: " + msg) {}
};

struct PreconditionFailed : Error {
    explicit PreconditionFailed(const std::string& msg) : Error("PreconditionFailed: " + msg) {}
};

struct BadExponent : Error {
    explicit BadExponent(const std::string& msg) : Error("BadExponent: " + msg) {}
};

struct ExponentMismatch : Error {
    explicit ExponentMismatch(const std::string& msg) : Error("ExponentMismatch: " + msg) {}
};

struct ZeroElement : Error {
    explicit ZeroElement(const std::string& msg) : Error("ZeroElement: " + msg) {}
};

struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error("DomainError: " + msg) {}
};

struct QuadratureUnderflow : Error {
    explicit QuadratureUnderflow(const std::string& msg) : Error("QuadratureUnderflow: " + msg) {}
};

// IO-side failures. SchemaError carries a JSON-pointer style path to the
// offending field; InvariantError names the recomputed invariant that failed.
struct SchemaError : Error {
    std::string path;
    SchemaError(const std::string& p, const std::string& msg)
        : Error("SchemaError at " + p + ": " + msg), path(p) {}
};

struct InvariantError : Error {
    std::string invariant;
    InvariantError(const std::string& name, const std::string& msg)
        : Error("InvariantError [" + name + "]: " + msg), invariant(name) {}
};

struct UnknownCommand : Error {
    explicit UnknownCommand(const std::string& msg) : Error("UnknownCommand: " + msg) {}
};

} // namespace nclp
