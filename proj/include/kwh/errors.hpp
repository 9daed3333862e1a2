#pragma once

#include <stdexcept>
#include <string>

namespace kwh {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonSquareError : Error {
  using Error::Error;
};
struct NotHermitianError : Error {
  using Error::Error;
};
struct EmptyMatrixError : Error {
  using Error::Error;
};
struct ZeroDenominatorError : Error {
  using Error::Error;
};
struct DimensionMismatchError : Error {
  using Error::Error;
};
struct GridMismatchError : Error {
  using Error::Error;
};
struct LengthMismatchError : Error {
  using Error::Error;
};
struct SingularGeneratorError : Error {
  using Error::Error;
};
struct NonClosingLatticeError : Error {
  using Error::Error;
};
struct EmptySequenceError : Error {
  using Error::Error;
};
struct EmptyShiftsError : Error {
  using Error::Error;
};
struct InconsistentVerdictsError : Error {
  using Error::Error;
};
struct NotAFrameError : Error {
  using Error::Error;
};
struct NotAKFrameError : Error {
  using Error::Error;
};
struct NonCommutingError : Error {
  using Error::Error;
};
struct NotInvertibleError : Error {
  using Error::Error;
};
struct NonDividingError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace kwh
