#pragma once
#include <stdexcept>
#include <string>

namespace riglid {

enum class ErrorKind {
  Configuration = 1,
  Shape,
  Precondition,
  Solver,
  Admissibility,
  Geometry,
  Context,
  Quadrature,
  Singularity,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind k, const std::string& msg) : std::runtime_error(msg), kind_(k) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define RIGLID_ERROR_TYPE(Name, Kind)                                   \
  struct Name : Error {                                                 \
    explicit Name(const std::string& m) : Error(ErrorKind::Kind, m) {} \
  }

RIGLID_ERROR_TYPE(ConfigurationError, Configuration);
RIGLID_ERROR_TYPE(ShapeError, Shape);
RIGLID_ERROR_TYPE(PreconditionError, Precondition);
RIGLID_ERROR_TYPE(SolverError, Solver);
RIGLID_ERROR_TYPE(AdmissibilityError, Admissibility);
RIGLID_ERROR_TYPE(GeometryError, Geometry);
RIGLID_ERROR_TYPE(ContextError, Context);
RIGLID_ERROR_TYPE(QuadratureError, Quadrature);
RIGLID_ERROR_TYPE(SingularityError, Singularity);
RIGLID_ERROR_TYPE(IoError, Io);

#undef RIGLID_ERROR_TYPE

}  // namespace riglid
