#pragma once

#include <stdexcept>
#include <string>

namespace imopt {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct InvalidArgument : Error {
  using Error::Error;
};
struct UnsupportedSet : Error {
  using Error::Error;
};
struct UnsupportedCombination : Error {
  using Error::Error;
};
struct InnerSolveFailure : Error {
  using Error::Error;
};
struct LineSearchDiverged : Error {
  using Error::Error;
};
struct NotOneStronglyConvex : Error {
  using Error::Error;
};
struct GapOracleUnavailable : Error {
  using Error::Error;
};
struct ScaleError : Error {
  using Error::Error;
};
struct MaxOuterExceeded : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

inline void require(bool cond, const char* what) {
  if (!cond) throw InvalidArgument(what);
}

}  // namespace imopt
