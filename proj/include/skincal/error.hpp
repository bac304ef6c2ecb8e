#pragma once

#include <stdexcept>

namespace skincal {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidGeometryError : Error { using Error::Error; };
struct InvalidDataError : Error { using Error::Error; };      // bad counts, shapes, non-finite values
struct DegenerateRangeError : Error { using Error::Error; };  // c_min >= c_max
struct RankDeficientError : Error { using Error::Error; };    // fewer than 6 usable abscissae
struct EmptyDataError : Error { using Error::Error; };
struct IndexError : Error { using Error::Error; };
struct InsufficientDataError : Error { using Error::Error; };
struct EmptyModelError : Error { using Error::Error; };       // every taxel excluded
struct ExcludedTaxelError : Error { using Error::Error; };
struct FrameShapeError : Error { using Error::Error; };
struct InvalidPatchError : Error { using Error::Error; };
struct FormatError : Error { using Error::Error; };           // malformed or truncated file
struct ValueError : Error { using Error::Error; };            // field out of range; names the cell
struct ProtocolError : Error { using Error::Error; };         // sweep violates the loading-branch rule
struct IncompatibleModelError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace skincal
