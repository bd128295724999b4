// Copyright 2026 The JPPF Authors.
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

#include "core/error.hpp"

namespace jppf {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInvalidTaxonomy: return "InvalidTaxonomy";
    case ErrorCode::kUnknownGroupForClass: return "UnknownGroupForClass";
    case ErrorCode::kFieldOverflow: return "FieldOverflow";
    case ErrorCode::kBoxOutOfCanvas: return "BoxOutOfCanvas";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNotAThingClass: return "NotAThingClass";
    case ErrorCode::kMissingBackgroundChannel: return "MissingBackgroundChannel";
    case ErrorCode::kValueOutOfRange: return "ValueOutOfRange";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kUnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::kTruncatedPayload: return "TruncatedPayload";
    case ErrorCode::kDecodeError: return "DecodeError";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kInternal: return "InternalError";
  }
  return "Unknown";
}

}  // namespace jppf
