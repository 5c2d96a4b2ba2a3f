#include "modernize/util.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace modernize {

double round1(double value) {
    return std::floor(value * 10.0 + 0.5) / 10.0;
}

std::string to_field_name(const std::string& cobol_name) {
    std::string out;
    out.reserve(cobol_name.size());
    for (char c : cobol_name) {
        if (c == '-') {
            out.push_back('_');
        } else {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    return out;
}

std::string to_operation_name(const std::string& paragraph_name) {
    std::string out;
    bool upper_next = true;
    for (char c : paragraph_name) {
        if (c == '-' || c == '_') {
            upper_next = true;
            continue;
        }
        unsigned char uc = static_cast<unsigned char>(c);
        out.push_back(static_cast<char>(upper_next ? std::toupper(uc) : std::tolower(uc)));
        upper_next = false;
    }
    return out;
}

std::string to_error_class(const std::string& operation_name) {
    std::string out;
    for (size_t i = 0; i < operation_name.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(operation_name[i]);
        if (std::isupper(c) && i > 0) out.push_back('-');
        out.push_back(static_cast<char>(std::toupper(c)));
    }
    return out;
}

std::string normalize_text(const std::string& text) {
    std::string out;
    bool in_space = true;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!in_space) out.push_back(' ');
            in_space = true;
        } else {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
            in_space = false;
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

std::string to_upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string trim(const std::string& s) {
    size_t b = 0;
    size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

bool starts_with(const std::string& s, const std::string& prefix) {
    return s.size() >= prefix.size() && s.compare(0, prefix.size(), prefix) == 0;
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace modernize
