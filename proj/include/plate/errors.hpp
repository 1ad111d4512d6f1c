// SPDX-License-Identifier: Apache-2.0

#ifndef PLATE_ERRORS_HPP
#define PLATE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace plate {

/// Base class of all library errors. `code()` is a stable machine-readable
/// tag; the CLI prints it verbatim on failure.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define PLATE_ERROR_TYPE(Name, tag)                                  \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& what) : Error(tag, what) {}     \
  }

PLATE_ERROR_TYPE(NoClampedEdge, "NO_CLAMPED_EDGE");
PLATE_ERROR_TYPE(ShapeMismatch, "SHAPE_MISMATCH");
PLATE_ERROR_TYPE(PointOutsideElement, "POINT_OUTSIDE_ELEMENT");
PLATE_ERROR_TYPE(SingularMaterial, "SINGULAR_MATERIAL");
PLATE_ERROR_TYPE(InvalidMaterial, "INVALID_MATERIAL");
PLATE_ERROR_TYPE(NotPositiveDefinite, "NOT_POSITIVE_DEFINITE");
PLATE_ERROR_TYPE(SingularSaddle, "SINGULAR_SADDLE");
PLATE_ERROR_TYPE(NotCoercive, "NOT_COERCIVE");
PLATE_ERROR_TYPE(DegenerateComponent, "DEGENERATE_COMPONENT");
PLATE_ERROR_TYPE(NonpositivePenalty, "NONPOSITIVE_PENALTY");
PLATE_ERROR_TYPE(MissingReference, "MISSING_REFERENCE");
PLATE_ERROR_TYPE(SingularSystem, "SINGULAR_SYSTEM");
PLATE_ERROR_TYPE(InvalidConfig, "INVALID_CONFIG");
PLATE_ERROR_TYPE(IoError, "IO_ERROR");

#undef PLATE_ERROR_TYPE

}  // namespace plate

#endif
