/*
 * Copyright 2026 The fpga-fabric Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace fabric {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad cluster description, grid file, or user-supplied parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Task graph, placement, or route construction failed.
class PlanError : public Error {
 public:
  using Error::Error;
};

/// The simulation could not make progress or hit an internal limit.
class SimError : public Error {
 public:
  using Error::Error;
};

}  // namespace fabric
