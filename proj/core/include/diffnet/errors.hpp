#pragma once

#include <stdexcept>
#include <string>

namespace diffnet {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define DIFFNET_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

DIFFNET_DEFINE_ERROR(NotPositiveDefinite);
DIFFNET_DEFINE_ERROR(NoConvergence);
DIFFNET_DEFINE_ERROR(EmptySample);
DIFFNET_DEFINE_ERROR(InvalidConfig);
DIFFNET_DEFINE_ERROR(SizeMismatch);
DIFFNET_DEFINE_ERROR(SeparationDetected);
DIFFNET_DEFINE_ERROR(SingularHessian);
DIFFNET_DEFINE_ERROR(RankDeficientX);
DIFFNET_DEFINE_ERROR(DegenerateVariance);
DIFFNET_DEFINE_ERROR(DegenerateSigma);
DIFFNET_DEFINE_ERROR(IoError);

#undef DIFFNET_DEFINE_ERROR

}  // namespace diffnet
