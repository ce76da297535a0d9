/*
 * Copyright 2026 The treecf Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef TREECF_ERRORS_H_
#define TREECF_ERRORS_H_

#include <stdexcept>

namespace treecf {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A tree or ensemble violates its structural invariants.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// A model, dataset, schema or result file could not be parsed.
class LoadError : public Error {
 public:
  using Error::Error;
};

// A caller passed an argument outside the documented domain.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// A computation produced a non-finite value or a factorization failed.
class NumericError : public Error {
 public:
  using Error::Error;
};

// An object was used before being initialized (e.g. scaler before fit).
class StateError : public Error {
 public:
  using Error::Error;
};

}  // namespace treecf

#endif  // TREECF_ERRORS_H_
