#pragma once

#include <stdexcept>
#include <string>

namespace delone {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define DELONE_ERROR(Name)                 \
  struct Name : Error {                    \
    using Error::Error;                    \
  }

DELONE_ERROR(Degenerate);
DELONE_ERROR(InvalidBudget);
DELONE_ERROR(OutOfChart);
DELONE_ERROR(IllConditioned);
DELONE_ERROR(RegionExhausted);
DELONE_ERROR(SelectionFailed);
DELONE_ERROR(CoverageGap);
DELONE_ERROR(NoSolution);
DELONE_ERROR(UnsupportedDim);
DELONE_ERROR(ValidationError);
DELONE_ERROR(IoError);

#undef DELONE_ERROR

}  // namespace delone
