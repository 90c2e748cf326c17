#pragma once

#include <stdexcept>
#include <string>

namespace rank2geo {

// Root of everything the library throws on purpose. The three direct
// subclasses below partition failures by who is at fault: the caller's
// input shape (ValidationError), the mathematics of a well-formed input
// (MathDegeneracy), or insufficient jet order (TruncationExceeded).
// The CLI maps them to exit codes 2, 3 and 4 respectively.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : Error {
    using Error::Error;
};

struct MathDegeneracy : Error {
    using Error::Error;
};

// A requested coefficient lies beyond the honestly computed order of a
// jet. Operations never zero-pad silently; they raise this instead.
struct TruncationExceeded : Error {
    using Error::Error;
};

// ---- input-domain violations -------------------------------------------

struct DivisionByZeroSeries : ValidationError {
    explicit DivisionByZeroSeries(const std::string& m = "series division needs a unit constant term")
        : ValidationError(m) {}
};

struct NonCompositionalArgument : ValidationError {
    explicit NonCompositionalArgument(const std::string& m = "series composition needs a zero constant term in the inner jet")
        : ValidationError(m) {}
};

struct NonInvertibleSeries : ValidationError {
    explicit NonInvertibleSeries(const std::string& m = "series inversion needs a zero constant term and a unit linear term")
        : ValidationError(m) {}
};

struct SingularReparametrization : ValidationError {
    explicit SingularReparametrization(const std::string& m = "reparametrization jet has vanishing derivative at 0")
        : ValidationError(m) {}
};

struct DimensionMismatch : ValidationError {
    explicit DimensionMismatch(const std::string& m = "operands live in different dimensions")
        : ValidationError(m) {}
};

struct InconsistentSystem : ValidationError {
    explicit InconsistentSystem(const std::string& m = "linear system has no solution")
        : ValidationError(m) {}
};

struct WrongGauge : ValidationError {
    explicit WrongGauge(const std::string& m = "operation needs a different parametrization gauge")
        : ValidationError(m) {}
};

struct BadDimension : ValidationError {
    explicit BadDimension(const std::string& m = "model dimension out of range")
        : ValidationError(m) {}
};

// The exact backend cannot represent an irrational scale factor. The
// float backend accepts the same input.
struct NotAPerfectPower : ValidationError {
    explicit NotAPerfectPower(const std::string& m = "exact backend needs a perfect power here")
        : ValidationError(m) {}
};

// ---- mathematical degeneracies -----------------------------------------

struct NotSelfDual : MathDegeneracy {
    explicit NotSelfDual(const std::string& m = "curve is not self-dual")
        : MathDegeneracy(m) {}
};

struct DegenerateForm : MathDegeneracy {
    explicit DegenerateForm(const std::string& m = "no nondegenerate invariant symplectic form to jet order")
        : MathDegeneracy(m) {}
};

struct AllInvariantsVanish : MathDegeneracy {
    explicit AllInvariantsVanish(const std::string& m = "all fundamental invariants vanish; canonical parametrization undefined")
        : MathDegeneracy(m) {}
};

struct ExceptionalTuple : MathDegeneracy {
    explicit ExceptionalTuple(const std::string& m = "tuple is exceptional; no compatible rescaling exists")
        : MathDegeneracy(m) {}
};

struct DegenerateDistribution : MathDegeneracy {
    explicit DegenerateDistribution(const std::string& m = "distribution has dim D^2 < 3 at the working point")
        : MathDegeneracy(m) {}
};

struct EmptyIntersection : MathDegeneracy {
    explicit EmptyIntersection(const std::string& m = "line misses the affine velocity set")
        : MathDegeneracy(m) {}
};

struct OnD3Annihilator : MathDegeneracy {
    explicit OnD3Annihilator(const std::string& m = "covector annihilates the third power of the distribution")
        : MathDegeneracy(m) {}
};

struct NotRegularPoint : MathDegeneracy {
    explicit NotRegularPoint(const std::string& m = "osculation chain does not reach full dimension")
        : MathDegeneracy(m) {}
};

struct RankDropAlongCurve : MathDegeneracy {
    explicit RankDropAlongCurve(const std::string& m = "moving frame loses rank within jet order")
        : MathDegeneracy(m) {}
};

struct DegenerateOsculation : MathDegeneracy {
    explicit DegenerateOsculation(const std::string& m = "jet derivatives of the curve fail to be independent")
        : MathDegeneracy(m) {}
};

}  // namespace rank2geo
