#include "veinforge/dxf.hpp"

#include <cstdio>
#include <sstream>
#include <string>

namespace veinforge {

namespace {

constexpr const char* kLayer = "VEINS";

void put_pair(std::string& out, int code, const std::string& value) {
    out += std::to_string(code);
    out += "\n";
    out += value;
    out += "\n";
}

std::string fmt_coord(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

} // namespace

std::vector<std::uint8_t> export_dxf(const ContourSet& cs) {
    std::string out;
    put_pair(out, 0, "SECTION");
    put_pair(out, 2, "HEADER");
    put_pair(out, 9, "$ACADVER");
    put_pair(out, 1, "AC1009"); // R12
    put_pair(out, 0, "ENDSEC");
    put_pair(out, 0, "SECTION");
    put_pair(out, 2, "ENTITIES");
    for (const auto& contour : cs.contours) {
        put_pair(out, 0, "POLYLINE");
        put_pair(out, 8, kLayer);
        put_pair(out, 66, "1"); // vertices follow
        put_pair(out, 70, "1"); // closed
        for (const auto& v : contour) {
            put_pair(out, 0, "VERTEX");
            put_pair(out, 8, kLayer);
            put_pair(out, 10, fmt_coord(v.x));
            put_pair(out, 20, fmt_coord(v.y));
        }
        put_pair(out, 0, "SEQEND");
    }
    put_pair(out, 0, "ENDSEC");
    put_pair(out, 0, "EOF");
    return {out.begin(), out.end()};
}

ContourSet parse_dxf(const std::vector<std::uint8_t>& bytes) {
    std::string text(bytes.begin(), bytes.end());
    std::istringstream in(text);

    auto next_line = [&](std::string& line) -> bool {
        if (!std::getline(in, line)) return false;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    };

    ContourSet cs;
    std::vector<Vec2> contour;
    bool in_polyline = false;
    bool in_vertex = false;
    Vec2 v;

    std::string code_line, value;
    while (next_line(code_line)) {
        if (!next_line(value)) throw FormatError("dangling DXF group code");
        int code;
        try {
            code = std::stoi(code_line);
        } catch (const std::exception&) {
            throw FormatError("malformed DXF group code: " + code_line);
        }

        if (code == 0) {
            if (in_vertex) {
                contour.push_back(v);
                in_vertex = false;
            }
            if (value == "POLYLINE") {
                in_polyline = true;
                contour.clear();
            } else if (value == "VERTEX") {
                if (!in_polyline)
                    throw FormatError("DXF VERTEX outside POLYLINE");
                in_vertex = true;
                v = {};
            } else if (value == "SEQEND") {
                if (!in_polyline)
                    throw FormatError("DXF SEQEND outside POLYLINE");
                if (contour.size() < 3)
                    throw FormatError("DXF polyline with fewer than 3 vertices");
                cs.contours.push_back(contour);
                in_polyline = false;
            } else if (value == "EOF") {
                return cs;
            }
        } else if (in_vertex && code == 10) {
            v.x = std::stod(value);
        } else if (in_vertex && code == 20) {
            v.y = std::stod(value);
        }
    }
    throw FormatError("DXF missing EOF marker");
}

} // namespace veinforge
