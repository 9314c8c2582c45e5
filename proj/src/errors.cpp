// Copyright 2026 The ebflow Authors
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

#include "ebflow/errors.hpp"

namespace ebflow {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::Defective: return "Defective";
    case ErrorKind::TraceNotOne: return "TraceNotOne";
    case ErrorKind::InvalidState: return "InvalidState";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::NonHermitianHamiltonian: return "NonHermitianHamiltonian";
    case ErrorKind::CovarianceViolation: return "CovarianceViolation";
    case ErrorKind::InvalidRateMatrix: return "InvalidRateMatrix";
    case ErrorKind::IntegrationFailure: return "IntegrationFailure";
    case ErrorKind::SingularMap: return "SingularMap";
    case ErrorKind::NoLimit: return "NoLimit";
    case ErrorKind::InvalidInterval: return "InvalidInterval";
    case ErrorKind::NotAProbabilityVector: return "NotAProbabilityVector";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace ebflow
