// Copyright 2026 The OTDRO Authors
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

#pragma once

// Minimal XML well-formedness check for the SVG outputs: balanced tags,
// matching names, quoted attributes closed before '>'.

#include <cctype>
#include <string>
#include <vector>

namespace test_support {

inline bool xml_well_formed(const std::string& text) {
    std::vector<std::string> stack;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        if (text[i] != '<') {
            ++i;
            continue;
        }
        if (text.compare(i, 2, "<?") == 0) { // declaration
            const std::size_t end = text.find("?>", i);
            if (end == std::string::npos) return false;
            i = end + 2;
            continue;
        }
        if (text.compare(i, 4, "<!--") == 0) {
            const std::size_t end = text.find("-->", i);
            if (end == std::string::npos) return false;
            i = end + 3;
            continue;
        }
        const bool closing = i + 1 < n && text[i + 1] == '/';
        std::size_t j = i + (closing ? 2 : 1);
        std::size_t name_begin = j;
        while (j < n && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '-' ||
                         text[j] == ':'))
            ++j;
        const std::string name = text.substr(name_begin, j - name_begin);
        if (name.empty()) return false;
        // scan to the closing '>', skipping quoted attribute values
        bool self_closing = false;
        while (j < n && text[j] != '>') {
            if (text[j] == '"') {
                j = text.find('"', j + 1);
                if (j == std::string::npos) return false;
            }
            if (text[j] == '/' && j + 1 < n && text[j + 1] == '>') self_closing = true;
            ++j;
        }
        if (j >= n) return false;
        if (closing) {
            if (stack.empty() || stack.back() != name) return false;
            stack.pop_back();
        } else if (!self_closing) {
            stack.push_back(name);
        }
        i = j + 1;
    }
    return stack.empty();
}

} // namespace test_support
