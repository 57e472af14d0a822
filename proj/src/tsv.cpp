#include "instrank/tsv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace instrank::tsv {

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return fields;
}

bool parse_int(std::string_view field, long long& out) {
    if (field.empty()) return false;
    char buf[32];
    if (field.size() >= sizeof(buf)) return false;
    std::memcpy(buf, field.data(), field.size());
    buf[field.size()] = '\0';
    char* end = nullptr;
    errno = 0;
    long long v = std::strtoll(buf, &end, 10);
    if (errno != 0 || end != buf + field.size()) return false;
    out = v;
    return true;
}

bool parse_double(std::string_view field, double& out) {
    if (field.empty()) return false;
    char buf[64];
    if (field.size() >= sizeof(buf)) return false;
    std::memcpy(buf, field.data(), field.size());
    buf[field.size()] = '\0';
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(buf, &end);
    if (errno != 0 || end != buf + field.size()) return false;
    out = v;
    return true;
}

std::string format_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    return buf;
}

std::string format_sig12(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

}  // namespace instrank::tsv
