#include "fkea/alpha.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace fkea {

std::string Alpha::format_value(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

Alpha Alpha::parse(const std::string& text) {
    std::string lowered = text;
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (lowered == "inf" || lowered == "infinity") {
        return infinity();
    }

    double v = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end) {
        raise(errc::invalid_input, "cannot parse alpha '" + text + "'");
    }

    Alpha a;
    a.value = v;
    a.token = text;
    a.validate();
    return a;
}

}  // namespace fkea
