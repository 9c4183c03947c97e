// Copyright 2026 the manuscriptor authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you
// may not use this file except in compliance with the License. You may
// obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// File: error.hpp
// Purpose: exception taxonomy shared by all modules

#ifndef MANUSCRIPT_ERROR_HPP
#define MANUSCRIPT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace manuscript {

// Base for everything this library throws.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem trouble: missing input, unwritable output.
struct io_error : error {
    using error::error;
};

// Input bytes do not parse (truncated PNG, bad JSON, invalid UTF-8).
struct decode_error : error {
    using error::error;
};

// Input parses but is outside the supported subset (16-bit PNG, palette
// where gray/RGB is required, ...).
struct unsupported_error : error {
    using error::error;
};

// Caller violated a documented precondition or supplied a bad config value.
struct validation_error : error {
    using error::error;
};

} // namespace manuscript

#endif
