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
// File: metrics.cpp
// Purpose: edit-distance evaluation primitives

#include "manuscript/metrics.hpp"

#include <algorithm>

#include "manuscript/error.hpp"
#include "manuscript/utf8.hpp"

namespace manuscript::metrics {

namespace {

// Two-row DP. Works for any element type with operator==.
template <class Seq>
std::uint64_t edit_distance(const Seq& a, const Seq& b, const EditCosts& c) {
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    std::vector<std::uint64_t> prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = j * c.insert;
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = i * c.del;
        for (std::size_t j = 1; j <= m; ++j) {
            const std::uint64_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : c.substitute);
            cur[j] = std::min({prev[j] + c.del, cur[j - 1] + c.insert, sub});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

} // namespace

std::uint64_t levenshtein(std::string_view a, std::string_view b, const EditCosts& costs) {
    return edit_distance(utf8_decode(a), utf8_decode(b), costs);
}

std::uint64_t levenshtein_tokens(const std::vector<std::string>& a,
                                 const std::vector<std::string>& b, const EditCosts& costs) {
    return edit_distance(a, b, costs);
}

double lev_ratio(std::string_view a, std::string_view b, RatioMode mode) {
    const std::u32string ua = utf8_decode(a);
    const std::u32string ub = utf8_decode(b);
    if (ua.empty() && ub.empty()) return 1.0;
    if (mode == RatioMode::max_len) {
        const std::uint64_t d = edit_distance(ua, ub, EditCosts{});
        return 1.0 - static_cast<double>(d) / static_cast<double>(std::max(ua.size(), ub.size()));
    }
    const std::uint64_t d2 = edit_distance(ua, ub, EditCosts{1, 1, 2});
    return static_cast<double>(ua.size() + ub.size() - d2) /
           static_cast<double>(ua.size() + ub.size());
}

double cer(std::string_view pred, std::string_view gt) {
    const std::u32string ugt = utf8_decode(gt);
    if (ugt.empty())
        throw validation_error("cer: empty ground truth");
    const std::uint64_t d = edit_distance(utf8_decode(pred), ugt, EditCosts{});
    return static_cast<double>(d) / static_cast<double>(ugt.size());
}

std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char ch : s) {
        if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\f' || ch == '\v') {
            if (!cur.empty()) tokens.push_back(std::move(cur)), cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

double wer(std::string_view pred, std::string_view gt) {
    const std::vector<std::string> gt_tokens = tokenize(gt);
    if (gt_tokens.empty())
        throw validation_error("wer: ground truth has no tokens");
    const std::uint64_t d = levenshtein_tokens(tokenize(pred), gt_tokens, EditCosts{});
    return static_cast<double>(d) / static_cast<double>(gt_tokens.size());
}

} // namespace manuscript::metrics
