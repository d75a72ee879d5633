#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sqg {

/// Base of every error raised by the library. Each subclass corresponds to one
/// failure mode a caller may want to react to separately.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define SQG_DEFINE_ERROR(Name)                    \
    class Name : public Error {                   \
    public:                                       \
        using Error::Error;                       \
    }

SQG_DEFINE_ERROR(InvalidGrid);
SQG_DEFINE_ERROR(NonHermitianInput);
SQG_DEFINE_ERROR(NonFiniteSymbol);
SQG_DEFINE_ERROR(NonFiniteField);
SQG_DEFINE_ERROR(DomainTooSmall);
SQG_DEFINE_ERROR(DomainError);
SQG_DEFINE_ERROR(InsufficientSamples);
SQG_DEFINE_ERROR(Instability);
SQG_DEFINE_ERROR(BoundaryMass);
SQG_DEFINE_ERROR(QuadratureNotConverged);
SQG_DEFINE_ERROR(OutOfBand);
SQG_DEFINE_ERROR(ConeViolated);
SQG_DEFINE_ERROR(SingularPoint);
SQG_DEFINE_ERROR(UnresolvedBall);
SQG_DEFINE_ERROR(ConfigInvalid);

#undef SQG_DEFINE_ERROR

/// Malformed field dump. Carries the byte offset where parsing stopped.
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::size_t offset)
        : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

}  // namespace sqg
