// Copyright 2026 The QMLC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace qmlc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define QMLC_DEFINE_ERROR(Name)         \
  class Name : public Error {           \
   public:                              \
    using Error::Error;                 \
  }

QMLC_DEFINE_ERROR(VocabError);
QMLC_DEFINE_ERROR(LengthError);
QMLC_DEFINE_ERROR(StructureError);
QMLC_DEFINE_ERROR(DimensionError);
QMLC_DEFINE_ERROR(ParseError);
QMLC_DEFINE_ERROR(ScaleError);
QMLC_DEFINE_ERROR(GateError);
QMLC_DEFINE_ERROR(ProbabilityError);
QMLC_DEFINE_ERROR(EmptyCountsError);
QMLC_DEFINE_ERROR(NumericError);
QMLC_DEFINE_ERROR(TrainingError);
QMLC_DEFINE_ERROR(SetError);
QMLC_DEFINE_ERROR(EmptySetError);
QMLC_DEFINE_ERROR(DomainError);
QMLC_DEFINE_ERROR(CovarianceError);
QMLC_DEFINE_ERROR(ValidationError);
QMLC_DEFINE_ERROR(IoError);

#undef QMLC_DEFINE_ERROR

}  // namespace qmlc
