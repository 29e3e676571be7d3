// Copyright 2026 The spinframe Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace spinframe {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// An angular-momentum label or tensor index outside its admissible range.
class InvalidIndex : public Error {
  public:
    using Error::Error;
};

/// An iterative solver hit its iteration cap.
class NonConvergence : public Error {
  public:
    using Error::Error;
};

/// A j-block of a signal has (numerically) zero norm, so the per-block
/// normalisation of the fiducial vector is undefined there.
class DegenerateBlock : public Error {
  public:
    DegenerateBlock(int j, const std::string &what)
        : Error(what), block_(j) {}
    [[nodiscard]] int block() const noexcept { return block_; }

  private:
    int block_;
};

/// Axis weights for which no analytic merit tensor exists.
class UnsupportedWeights : public Error {
  public:
    using Error::Error;
};

class EmptySample : public Error {
  public:
    using Error::Error;
};

/// The rejection-sampling envelope was exceeded. This is a bug, not a data
/// condition.
class EnvelopeViolation : public Error {
  public:
    using Error::Error;
};

} // namespace spinframe
