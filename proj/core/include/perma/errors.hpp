#ifndef PERMA_ERRORS_HPP
#define PERMA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace perma {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Input could not be parsed (matrix files, CLI payloads).
class ParseError : public Error {
public:
    using Error::Error;
};

class SingularMatrix : public Error {
public:
    using Error::Error;
};

class NotMMatrix : public Error {
public:
    enum class Reason { OffDiagPositive, InverseNegative, Singular };

    NotMMatrix(Reason reason, int i, int j, const std::string& what)
        : Error(what), reason(reason), i(i), j(j) {}

    Reason reason;
    int i;  // offending row, -1 when not applicable
    int j;  // offending column, -1 when not applicable
};

class NonPositiveDiagonal : public Error {
public:
    NonPositiveDiagonal(int index, const std::string& what) : Error(what), index(index) {}
    int index;
};

class NoConvergence : public Error {
public:
    using Error::Error;
};

class InvalidPermutation : public Error {
public:
    using Error::Error;
};

class DimensionTooLarge : public Error {
public:
    DimensionTooLarge(int dim, const std::string& what) : Error(what), dim(dim) {}
    int dim;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

class NonPositiveAlpha : public Error {
public:
    using Error::Error;
};

class TruncationCapExceeded : public Error {
public:
    using Error::Error;
};

class ModelMismatch : public Error {
public:
    using Error::Error;
};

class DeficitTooLarge : public Error {
public:
    using Error::Error;
};

class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

class DiagonalCovarianceUnsupported : public Error {
public:
    DiagonalCovarianceUnsupported(int index, const std::string& what)
        : Error(what), index(index) {}
    int index;
};

class NotSymmetric : public Error {
public:
    using Error::Error;
};

class HypothesisViolated : public Error {
public:
    using Error::Error;
};

class NegativeEntry : public Error {
public:
    NegativeEntry(int i, int j, const std::string& what) : Error(what), i(i), j(j) {}
    int i;
    int j;
};

/// A symmetrized M-matrix failed certification.  This is reported loudly:
/// it would contradict an identity the library is built to verify.
class CertificationFailed : public Error {
public:
    using Error::Error;
};

}  // namespace perma

#endif
