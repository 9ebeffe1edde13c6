#pragma once

#include <stdexcept>
#include <string>

namespace vudetect {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define VUDETECT_DEFINE_ERROR(Name)        \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

VUDETECT_DEFINE_ERROR(LexError);
VUDETECT_DEFINE_ERROR(ConfigError);
VUDETECT_DEFINE_ERROR(NetworkError);
VUDETECT_DEFINE_ERROR(DumpFormatError);
VUDETECT_DEFINE_ERROR(HunkOutOfBounds);
VUDETECT_DEFINE_ERROR(SourceTooShort);
VUDETECT_DEFINE_ERROR(EmptyDataset);
VUDETECT_DEFINE_ERROR(EmptyVocab);
VUDETECT_DEFINE_ERROR(UnknownToken);
VUDETECT_DEFINE_ERROR(EmptySequence);
VUDETECT_DEFINE_ERROR(EmptyBatch);
VUDETECT_DEFINE_ERROR(ShapeMismatch);
VUDETECT_DEFINE_ERROR(UnknownOptimizer);
VUDETECT_DEFINE_ERROR(EmptyEvaluation);
VUDETECT_DEFINE_ERROR(LeakageDetected);
VUDETECT_DEFINE_ERROR(EmptyFile);
VUDETECT_DEFINE_ERROR(UnknownFormat);
VUDETECT_DEFINE_ERROR(ModelFormatError);
VUDETECT_DEFINE_ERROR(IoError);

#undef VUDETECT_DEFINE_ERROR

}  // namespace vudetect
