#pragma once

#include <stdexcept>
#include <string>

namespace lucanon {

/// Base class for all library errors. Messages use 1-based party/mode
/// indices to match the conventions of the accompanying documentation.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// tensor construction / bookkeeping
struct LengthMismatch : Error { using Error::Error; };
struct EmptyDims : Error { using Error::Error; };
struct ModeOutOfRange : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct DimsMismatch : Error { using Error::Error; };
struct NotUnitary : Error { using Error::Error; };
struct BadDim : Error { using Error::Error; };

// decomposition
struct SvdFailure : Error { using Error::Error; };
struct NotSorted : Error { using Error::Error; };

// density matrices
struct NotHermitian : Error { using Error::Error; };
struct NotTraceOne : Error { using Error::Error; };
struct NotPSD : Error { using Error::Error; };
struct RankZero : Error { using Error::Error; };
struct SingleParty : Error { using Error::Error; };

// equivalence machinery
struct StructureMismatch : Error { using Error::Error; };
struct DegenerateInput : Error { using Error::Error; };

// linearization
struct NotFullyDegenerate : Error { using Error::Error; };
struct ScaleExceeded : Error { using Error::Error; };
struct Overflow : Error { using Error::Error; };

// file I/O
struct ParseError : Error { using Error::Error; };

} // namespace lucanon
