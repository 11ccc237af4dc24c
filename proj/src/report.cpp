#include "metriclab/jsonio.hpp"

#include <cmath>
#include <cstdio>

namespace metriclab {
namespace {

using nlohmann::ordered_json;

void dump_rec(const ordered_json& j, std::string& out, int indent, int depth) {
    const std::string pad(static_cast<size_t>(indent * depth), ' ');
    const std::string pad1(static_cast<size_t>(indent * (depth + 1)), ' ');
    const char* nl = indent > 0 ? "\n" : "";
    switch (j.type()) {
        case ordered_json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{";
            out += nl;
            size_t i = 0;
            for (auto it = j.begin(); it != j.end(); ++it, ++i) {
                out += pad1;
                out += ordered_json(it.key()).dump();
                out += indent > 0 ? ": " : ":";
                dump_rec(it.value(), out, indent, depth + 1);
                if (i + 1 < j.size()) out += ",";
                out += nl;
            }
            out += pad;
            out += "}";
            return;
        }
        case ordered_json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            // short numeric arrays (points) stay on one line
            bool flat = true;
            for (const auto& e : j)
                if (e.is_structured()) flat = false;
            out += "[";
            if (!flat) out += nl;
            size_t i = 0;
            for (const auto& e : j) {
                if (!flat) out += pad1;
                dump_rec(e, out, indent, depth + 1);
                if (i + 1 < j.size()) out += flat ? (indent > 0 ? ", " : ",") : ",";
                if (!flat) out += nl;
                ++i;
            }
            if (!flat) out += pad;
            out += "]";
            return;
        }
        case ordered_json::value_t::number_float:
            out += fmt17(j.get<double>());
            return;
        default:
            out += j.dump();
            return;
    }
}

} // namespace

std::string fmt17(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string dump_json_17(const nlohmann::ordered_json& j, int indent) {
    std::string out;
    dump_rec(j, out, indent, 0);
    return out;
}

} // namespace metriclab
