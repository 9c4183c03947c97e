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
// File: metrics.hpp
// Purpose: Levenshtein distance and ratio, CER, WER

#ifndef MANUSCRIPT_METRICS_HPP
#define MANUSCRIPT_METRICS_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace manuscript::metrics {

struct EditCosts {
    std::uint64_t insert = 1;
    std::uint64_t del = 1;
    std::uint64_t substitute = 1;
};

// Minimal edit cost between the two strings, DP over unicode scalar values.
std::uint64_t levenshtein(std::string_view a, std::string_view b,
                          const EditCosts& costs = EditCosts{});

// Same DP over an arbitrary token sequence.
std::uint64_t levenshtein_tokens(const std::vector<std::string>& a,
                                 const std::vector<std::string>& b,
                                 const EditCosts& costs = EditCosts{});

enum class RatioMode {
    max_len, // 1 - d / max(|a|, |b|), unit costs
    indel    // (|a| + |b| - d2) / (|a| + |b|) with substitution cost 2
};

// Normalized similarity in [0, 1]; two empty strings compare as 1.
double lev_ratio(std::string_view a, std::string_view b,
                 RatioMode mode = RatioMode::max_len);

// levenshtein(pred, gt) / |gt|; may exceed 1. Throws on empty ground truth.
double cer(std::string_view pred, std::string_view gt);

// Token-level levenshtein / gt token count; tokens split on whitespace runs.
// Throws when the ground truth has no tokens.
double wer(std::string_view pred, std::string_view gt);

std::vector<std::string> tokenize(std::string_view s);

} // namespace manuscript::metrics

#endif
