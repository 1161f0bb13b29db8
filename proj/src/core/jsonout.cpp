#include "core/jsonout.hpp"

#include "core/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace degreescope::report {

namespace {

void append_escaped(std::string& out, const std::string& s) {
    out += '"';
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += static_cast<char>(c);
                }
        }
    }
    out += '"';
}

void append_double(std::string& out, double v) {
    if (!std::isfinite(v))
        throw internal_error("non-finite number reached JSON output");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    out += buf;
}

void dump_value(std::string& out, const nlohmann::json& v, int indent,
                int depth) {
    // indent <= 0 means compact single-line output (JSONL records).
    const bool pretty = indent > 0;
    const std::string item_sep = pretty ? ",\n" : ",";
    const std::string pad =
        pretty ? std::string(static_cast<std::size_t>(indent) *
                                 static_cast<std::size_t>(depth + 1),
                             ' ')
               : std::string();
    const std::string close_pad =
        pretty ? std::string(static_cast<std::size_t>(indent) *
                                 static_cast<std::size_t>(depth),
                             ' ')
               : std::string();
    switch (v.type()) {
        case nlohmann::json::value_t::null: out += "null"; break;
        case nlohmann::json::value_t::boolean:
            out += v.get<bool>() ? "true" : "false";
            break;
        case nlohmann::json::value_t::number_integer:
            out += std::to_string(v.get<int64_t>());
            break;
        case nlohmann::json::value_t::number_unsigned:
            out += std::to_string(v.get<uint64_t>());
            break;
        case nlohmann::json::value_t::number_float:
            append_double(out, v.get<double>());
            break;
        case nlohmann::json::value_t::string:
            append_escaped(out, v.get<std::string>());
            break;
        case nlohmann::json::value_t::array: {
            if (v.empty()) {
                out += "[]";
                break;
            }
            out += '[';
            bool first = true;
            for (const auto& item : v) {
                out += first ? (pretty ? "\n" : "") : item_sep;
                out += pad;
                dump_value(out, item, indent, depth + 1);
                first = false;
            }
            if (pretty) {
                out += '\n';
                out += close_pad;
            }
            out += ']';
            break;
        }
        case nlohmann::json::value_t::object: {
            if (v.empty()) {
                out += "{}";
                break;
            }
            out += '{';
            bool first = true;
            for (auto it = v.begin(); it != v.end(); ++it) {
                out += first ? (pretty ? "\n" : "") : item_sep;
                out += pad;
                append_escaped(out, it.key());
                out += pretty ? ": " : ":";
                dump_value(out, it.value(), indent, depth + 1);
                first = false;
            }
            if (pretty) {
                out += '\n';
                out += close_pad;
            }
            out += '}';
            break;
        }
        default:
            throw internal_error("unsupported JSON value type in output");
    }
}

} // namespace

std::string dump_json(const nlohmann::json& value, int indent) {
    std::string out;
    dump_value(out, value, indent, 0);
    out += '\n';
    return out;
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw input_error("cannot write file: " + tmp);
        out << contents;
        if (!out.flush())
            throw input_error("failed writing file: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw input_error("cannot rename " + tmp + " to " + path.string() +
                          ": " + ec.message());
}

void write_json_atomic(const std::filesystem::path& path,
                       const nlohmann::json& value) {
    write_file_atomic(path, dump_json(value));
}

} // namespace degreescope::report
