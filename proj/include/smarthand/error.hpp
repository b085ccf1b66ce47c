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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace smarthand {

enum class ErrorKind {
  Io,
  FileFormat,
  ChecksumMismatch,
  MaskCountMismatch,
  EmptyInput,
  NotEnoughValidFrames,
  NegativeForce,
  OutOfRange,
  SingularNetwork,
  FrameSourceExhausted,
  ShapeMismatch,
  WeightMismatch,
  NonPositiveVariance,
  ScaleOverflow,
  Usage,
};

std::string_view to_string(ErrorKind kind);

// Every failure surfaced by the library is an Error carrying its kind, so
// callers (the CLI in particular) can map failures onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class MaskCountMismatch : public Error {
 public:
  explicit MaskCountMismatch(std::size_t actual);
  std::size_t actual() const noexcept { return actual_; }

 private:
  std::size_t actual_;
};

class NotEnoughValidFrames : public Error {
 public:
  NotEnoughValidFrames(std::size_t available, std::size_t requested);
  std::size_t available() const noexcept { return available_; }
  std::size_t requested() const noexcept { return requested_; }

 private:
  std::size_t available_;
  std::size_t requested_;
};

}  // namespace smarthand
