// Copyright 2026 The ICV Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ICV_ERRORS_H_
#define ICV_ERRORS_H_

#include <stdexcept>
#include <string>

namespace icv {

// Error categories surfaced through the C API as status codes.
enum class ErrorCode {
  kValidation = 1,
  kSupport,
  kAction,
  kSequenceComplete,
  kUnsupported,
  kParse,
  kVersion,
  kConfig,
  kTraining,
  kLookup,
  kExcludedOrder,
  kIo,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

#define ICV_DEFINE_ERROR(Name, Code)                                   \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& message) : Error(Code, message) {} \
  }

ICV_DEFINE_ERROR(ValidationError, ErrorCode::kValidation);
ICV_DEFINE_ERROR(SupportError, ErrorCode::kSupport);
ICV_DEFINE_ERROR(ActionError, ErrorCode::kAction);
ICV_DEFINE_ERROR(SequenceCompleteError, ErrorCode::kSequenceComplete);
ICV_DEFINE_ERROR(UnsupportedError, ErrorCode::kUnsupported);
ICV_DEFINE_ERROR(VersionError, ErrorCode::kVersion);
ICV_DEFINE_ERROR(ConfigError, ErrorCode::kConfig);
ICV_DEFINE_ERROR(TrainingError, ErrorCode::kTraining);
ICV_DEFINE_ERROR(LookupError, ErrorCode::kLookup);
ICV_DEFINE_ERROR(ExcludedOrderError, ErrorCode::kExcludedOrder);
ICV_DEFINE_ERROR(IoError, ErrorCode::kIo);

#undef ICV_DEFINE_ERROR

// Parse failures carry the 1-based line number of the offending record.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& message)
      : Error(ErrorCode::kParse,
              "line " + std::to_string(line) + ": " + message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace icv

#endif  // ICV_ERRORS_H_
