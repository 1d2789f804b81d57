// Copyright 2026 The darklab Authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace darklab {

enum class ErrorKind {
  DimensionMismatch,
  DegenerateSubspace,
  OddDimension,
  NotSymplectic,
  NotInvariant,
  InsufficientDarkCapacity,
  NonSymmetricTarget,
  InvalidTarget,
  MethodKernelMismatch,
  StepTooLarge,
  UnsupportedKernel,
  MalformedInput,
  MalformedCertificate,
  InvalidArgument,
  Io,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DegenerateSubspace: return "DegenerateSubspace";
    case ErrorKind::OddDimension: return "OddDimension";
    case ErrorKind::NotSymplectic: return "NotSymplectic";
    case ErrorKind::NotInvariant: return "NotInvariant";
    case ErrorKind::InsufficientDarkCapacity: return "InsufficientDarkCapacity";
    case ErrorKind::NonSymmetricTarget: return "NonSymmetricTarget";
    case ErrorKind::InvalidTarget: return "InvalidTarget";
    case ErrorKind::MethodKernelMismatch: return "MethodKernelMismatch";
    case ErrorKind::StepTooLarge: return "StepTooLarge";
    case ErrorKind::UnsupportedKernel: return "UnsupportedKernel";
    case ErrorKind::MalformedInput: return "MalformedInput";
    case ErrorKind::MalformedCertificate: return "MalformedCertificate";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library carries an ErrorKind so front ends can
/// map it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace darklab
