#pragma once

#include <stdexcept>
#include <string>

namespace road {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define ROAD_DEFINE_ERROR(Name) \
  struct Name : Error {          \
    using Error::Error;          \
  }

ROAD_DEFINE_ERROR(FormatError);
ROAD_DEFINE_ERROR(UnsupportedDtype);
ROAD_DEFINE_ERROR(IoError);
ROAD_DEFINE_ERROR(GridMismatch);
ROAD_DEFINE_ERROR(InvalidSaliency);
ROAD_DEFINE_ERROR(InvalidK);
ROAD_DEFINE_ERROR(ShapeMismatch);
ROAD_DEFINE_ERROR(LengthMismatch);
ROAD_DEFINE_ERROR(SolverDiverged);
ROAD_DEFINE_ERROR(InvalidAxes);
ROAD_DEFINE_ERROR(DomainError);
ROAD_DEFINE_ERROR(SingularCovariance);
ROAD_DEFINE_ERROR(EmptyPartition);
ROAD_DEFINE_ERROR(TrainingDiverged);
ROAD_DEFINE_ERROR(InvalidGamma);
ROAD_DEFINE_ERROR(UndefinedCorrelation);
ROAD_DEFINE_ERROR(InvalidConfig);

#undef ROAD_DEFINE_ERROR

}  // namespace road
