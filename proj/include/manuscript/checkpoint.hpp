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
// File: checkpoint.hpp
// Purpose: versioned model persistence: "MSCRv1" magic, JSON header,
//          little-endian f64 parameter blobs in header-declared order

#ifndef MANUSCRIPT_CHECKPOINT_HPP
#define MANUSCRIPT_CHECKPOINT_HPP

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "manuscript/net.hpp"

namespace manuscript::ckpt {

inline constexpr char kMagic[] = "MSCRv1";

struct Checkpoint {
    nlohmann::json header; // config, shapes, metric history; "params" is
                           // rewritten from the tensor list on save
    std::vector<std::pair<std::string, net::Tensor>> params;

    const net::Tensor& tensor(const std::string& name) const;
};

void save(const Checkpoint& c, const std::filesystem::path& path);
Checkpoint load(const std::filesystem::path& path);

} // namespace manuscript::ckpt

#endif
