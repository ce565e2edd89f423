#pragma once

#include <stdexcept>
#include <string>

namespace hsseg {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define HSSEG_DEFINE_ERROR(NAME)                                  \
  struct NAME : Error {                                           \
    explicit NAME(const std::string& msg) : Error(#NAME ": " + msg) {} \
  }

HSSEG_DEFINE_ERROR(NonPowerOfTwoSide);
HSSEG_DEFINE_ERROR(ShapeMismatch);
HSSEG_DEFINE_ERROR(NonFiniteValue);
HSSEG_DEFINE_ERROR(IndexOutOfRange);
HSSEG_DEFINE_ERROR(GeometryMismatch);
HSSEG_DEFINE_ERROR(NegativeInput);
HSSEG_DEFINE_ERROR(DimensionMismatch);
HSSEG_DEFINE_ERROR(NonPositiveVariance);
HSSEG_DEFINE_ERROR(DegenerateVariance);
HSSEG_DEFINE_ERROR(CovarianceMismatch);
HSSEG_DEFINE_ERROR(InvalidDimensions);
HSSEG_DEFINE_ERROR(ClassOutOfRange);
HSSEG_DEFINE_ERROR(EmptyCell);
HSSEG_DEFINE_ERROR(InvalidArguments);
HSSEG_DEFINE_ERROR(UnsupportedK);
HSSEG_DEFINE_ERROR(UnsupportedDimension);
HSSEG_DEFINE_ERROR(InvalidCounts);
HSSEG_DEFINE_ERROR(ConfigParse);
HSSEG_DEFINE_ERROR(IoError);

#undef HSSEG_DEFINE_ERROR

}  // namespace hsseg
