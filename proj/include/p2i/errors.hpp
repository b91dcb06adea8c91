// Copyright 2026 The pose2inst Authors.
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

#ifndef P2I_ERRORS_HPP_
#define P2I_ERRORS_HPP_

#include <stdexcept>

namespace p2i {

// Malformed annotation or results document.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Well-formed document whose content violates a schema rule.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Mask codec and binary file format failures.
class CodecError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Problem size above a configured limit.
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace p2i

#endif  // P2I_ERRORS_HPP_
