#pragma once

#include <cctype>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace testutil {

// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        std::random_device rd;
        path_ = base / ("warcast_test_" + std::to_string(rd()) + "_" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline std::string write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Minimal XML well-formedness check: balanced quoted attributes, matching
// open/close tags, exactly one root element, legal comments. Enough to catch
// a malformed figure without pulling in a parser dependency.
inline bool well_formed_xml(const std::string& text) {
    std::vector<std::string> stack;
    bool root_closed = false;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] != '<') {
            ++i;
            continue;
        }
        if (text.compare(i, 4, "<!--") == 0) {
            const auto end = text.find("-->", i + 4);
            if (end == std::string::npos) return false;
            if (text.substr(i + 4, end - (i + 4)).find("--") != std::string::npos) return false;
            i = end + 3;
            continue;
        }
        if (text.compare(i, 2, "<?") == 0) {
            const auto end = text.find("?>", i);
            if (end == std::string::npos) return false;
            i = end + 2;
            continue;
        }
        if (text.compare(i, 2, "</") == 0) {
            const auto end = text.find('>', i);
            if (end == std::string::npos) return false;
            std::string name = text.substr(i + 2, end - i - 2);
            while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back())))
                name.pop_back();
            if (stack.empty() || stack.back() != name) return false;
            stack.pop_back();
            if (stack.empty()) root_closed = true;
            i = end + 1;
            continue;
        }
        // Opening or self-closing tag; scan for '>' outside quotes.
        std::size_t j = i + 1;
        char quote = 0;
        while (j < text.size()) {
            const char c = text[j];
            if (quote != 0) {
                if (c == quote) quote = 0;
            } else if (c == '"' || c == '\'') {
                quote = c;
            } else if (c == '>') {
                break;
            }
            ++j;
        }
        if (j >= text.size()) return false;
        std::size_t k = i + 1;
        while (k < j && !std::isspace(static_cast<unsigned char>(text[k])) && text[k] != '/') ++k;
        if (k == i + 1) return false;  // empty tag name
        if (root_closed) return false;  // second root element
        if (text[j - 1] == '/') {
            if (stack.empty()) root_closed = true;
        } else {
            stack.push_back(text.substr(i + 1, k - i - 1));
        }
        i = j + 1;
    }
    return stack.empty() && root_closed;
}

}  // namespace testutil
