#include "perma/report.hpp"

#include <cmath>
#include <cstdio>

namespace perma {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 8);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

void VerificationReport::evaluate() {
    if (kind == Kind::Equality) {
        pass = std::abs(lhs - rhs) <= tolerance;
    } else {
        pass = lhs >= rhs - tolerance;
    }
}

std::string VerificationReport::to_json() const {
    std::string out = "{\"identity\":\"" + json_escape(name) + "\"";
    out += ",\"anchor\":\"" + json_escape(anchor) + "\"";
    out += ",\"kind\":\"";
    out += (kind == Kind::Equality ? "equality" : "lower-bound");
    out += "\",\"lhs\":" + fmt17(lhs);
    out += ",\"rhs\":" + fmt17(rhs);
    out += ",\"tol\":" + fmt17(tolerance);
    out += ",\"pass\":";
    out += pass ? "true" : "false";
    if (!witness.empty()) out += ",\"witness\":" + witness;
    out += "}";
    return out;
}

std::string report_schema_json() {
    return std::string("{\"schema_version\":") + std::to_string(kReportSchemaVersion) +
           ",\"type\":\"object\",\"properties\":{"
           "\"identity\":{\"type\":\"string\"},"
           "\"anchor\":{\"type\":\"string\"},"
           "\"kind\":{\"enum\":[\"equality\",\"lower-bound\"]},"
           "\"lhs\":{\"type\":\"number\"},"
           "\"rhs\":{\"type\":\"number\"},"
           "\"tol\":{\"type\":\"number\"},"
           "\"pass\":{\"type\":\"boolean\"},"
           "\"witness\":{\"type\":\"object\"}},"
           "\"required\":[\"identity\",\"kind\",\"lhs\",\"rhs\",\"tol\",\"pass\"]}";
}

bool all_pass(const std::vector<VerificationReport>& reports) {
    for (const auto& r : reports) {
        if (!r.pass) return false;
    }
    return true;
}

}  // namespace perma
