#pragma once

#include <stdexcept>
#include <string>

namespace capindex {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParamOutOfRange : Error {
  using Error::Error;
};

struct NoBoundary : Error {
  using Error::Error;
};

struct EmptyRange : Error {
  using Error::Error;
};

struct NoRootInRange : Error {
  using Error::Error;
};

struct GridTooCoarse : Error {
  using Error::Error;
};

struct IllConditioned : Error {
  using Error::Error;
};

struct IndeterminateMode : Error {
  using Error::Error;
};

struct DecompositionMismatch : Error {
  using Error::Error;
};

struct NotMinimal : Error {
  using Error::Error;
};

struct QuadTooCoarse : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace capindex
