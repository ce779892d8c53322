#pragma once

#include <stdexcept>
#include <string>

namespace trail {

// Base class for every error this library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfBounds : public Error {
 public:
  using Error::Error;
};

class DegenerateSpeed : public Error {
 public:
  using Error::Error;
};

class RegionOutOfBounds : public Error {
 public:
  using Error::Error;
};

class EmptyRegion : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class OutOfGrid : public Error {
 public:
  using Error::Error;
};

class NoPath : public Error {
 public:
  using Error::Error;
};

class TooFewPoints : public Error {
 public:
  using Error::Error;
};

class DegenerateControl : public Error {
 public:
  using Error::Error;
};

class InfeasibleBoundary : public Error {
 public:
  using Error::Error;
};

class ConfigInvalid : public Error {
 public:
  using Error::Error;
};

class EmptyLog : public Error {
 public:
  using Error::Error;
};

}  // namespace trail
