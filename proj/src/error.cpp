/* Copyright 2026 The SmartHand Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "smarthand/error.hpp"

namespace smarthand {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io: return "Io";
    case ErrorKind::FileFormat: return "FileFormat";
    case ErrorKind::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorKind::MaskCountMismatch: return "MaskCountMismatch";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::NotEnoughValidFrames: return "NotEnoughValidFrames";
    case ErrorKind::NegativeForce: return "NegativeForce";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::SingularNetwork: return "SingularNetwork";
    case ErrorKind::FrameSourceExhausted: return "FrameSourceExhausted";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::WeightMismatch: return "WeightMismatch";
    case ErrorKind::NonPositiveVariance: return "NonPositiveVariance";
    case ErrorKind::ScaleOverflow: return "ScaleOverflow";
    case ErrorKind::Usage: return "Usage";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

MaskCountMismatch::MaskCountMismatch(std::size_t actual)
    : Error(ErrorKind::MaskCountMismatch,
            "hand mask has " + std::to_string(actual) + " active taxels"),
      actual_(actual) {}

NotEnoughValidFrames::NotEnoughValidFrames(std::size_t available, std::size_t requested)
    : Error(ErrorKind::NotEnoughValidFrames,
            std::to_string(available) + " valid frames available, " +
                std::to_string(requested) + " requested"),
      available_(available),
      requested_(requested) {}

}  // namespace smarthand
