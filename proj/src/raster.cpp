#include "xylokit/raster.hpp"

#include <charconv>
#include <sstream>
#include <vector>

namespace xylokit {

std::string write_raster_csv(const InputRaster& raster) {
    std::string out = "t,channel,count\n";
    for (int t = 0; t < raster.steps(); ++t)
        for (int c = 0; c < raster.channels(); ++c) {
            out += std::to_string(t);
            out += ',';
            out += std::to_string(c);
            out += ',';
            out += std::to_string(raster.counts(t, c));
            out += '\n';
        }
    return out;
}

namespace {

long parse_long(const std::string& field, int line_no, const char* what) {
    long value = 0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [p, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || p != end)
        throw ParseError("raster line " + std::to_string(line_no) + ": bad " + what + " '" +
                         field + "'");
    return value;
}

}  // namespace

InputRaster read_raster_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "t,channel,count")
        throw ParseError("raster: missing 't,channel,count' header");

    struct Entry {
        int t, c, count;
    };
    std::vector<Entry> entries;
    int max_t = -1, max_c = -1;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto comma1 = line.find(',');
        const auto comma2 = line.find(',', comma1 + 1);
        if (comma1 == std::string::npos || comma2 == std::string::npos)
            throw ParseError("raster line " + std::to_string(line_no) + ": expected 3 fields");
        Entry e;
        e.t = static_cast<int>(parse_long(line.substr(0, comma1), line_no, "step"));
        e.c = static_cast<int>(
            parse_long(line.substr(comma1 + 1, comma2 - comma1 - 1), line_no, "channel"));
        e.count = static_cast<int>(parse_long(line.substr(comma2 + 1), line_no, "count"));
        if (e.t < 0 || e.c < 0)
            throw ParseError("raster line " + std::to_string(line_no) +
                             ": negative step or channel");
        max_t = std::max(max_t, e.t);
        max_c = std::max(max_c, e.c);
        entries.push_back(e);
    }

    InputRaster raster;
    raster.counts = Eigen::MatrixXi::Zero(max_t + 1, max_c + 1);
    for (const Entry& e : entries) raster.counts(e.t, e.c) = e.count;
    return raster;
}

}  // namespace xylokit
