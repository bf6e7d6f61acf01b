#pragma once

#include <stdexcept>
#include <string>

namespace duelbatch {

// Common base so the CLI can map any library failure to one exit code.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Preference-matrix validation.
struct RangeError : Error { using Error::Error; };      // entry outside [0,1]
struct AsymmetryError : Error { using Error::Error; };  // p(i,j) + p(j,i) != 1
struct DiagonalError : Error { using Error::Error; };   // p(i,i) != 1/2

// File ingestion.
struct ParseError : Error { using Error::Error; };

// Bad caller-supplied parameters (generators, formulas, configs).
struct ParamError : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct EmptySetError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

// Harness I/O and option handling.
struct UsageError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace duelbatch
