#include "contab/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "contab/errors.hpp"

namespace contab {

std::string format_double(double v, int digits) {
    digits = std::clamp(digits, 1, 17);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

namespace {

std::vector<std::int64_t> int_list(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_array())
        throw InvalidMargins(std::string("margins JSON needs an array field \"") + key + "\"");
    std::vector<std::int64_t> out;
    out.reserve(j[key].size());
    for (const auto& v : j[key]) {
        if (!v.is_number_integer())
            throw InvalidMargins(std::string("non-integer entry in \"") + key + "\"");
        out.push_back(v.get<std::int64_t>());
    }
    return out;
}

}  // namespace

MarginPair margins_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidMargins(std::string("malformed margins JSON: ") + e.what());
    }
    if (!j.is_object()) throw InvalidMargins("margins JSON must be an object");
    return validate(int_list(j, "rows"), int_list(j, "cols"));
}

std::string margins_to_json(const MarginPair& mp) {
    nlohmann::json j;
    j["rows"] = mp.rows;
    j["cols"] = mp.cols;
    return j.dump();
}

MarginPair margins_from_record(const std::string& line) {
    std::vector<std::int64_t> fields;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t pos = 0;
            fields.push_back(std::stoll(tok, &pos));
            while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
            if (pos != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw InvalidMargins("bad margins record field: \"" + tok + "\"");
        }
    }
    if (fields.size() < 2) throw InvalidMargins("margins record needs at least m and n");
    const std::int64_t m = fields[0], n = fields[1];
    if (m < 1 || n < 1) throw InvalidMargins("margins record has non-positive dimensions");
    if (static_cast<std::int64_t>(fields.size()) != 2 + m + n)
        throw InvalidMargins("margins record length does not match its declared dimensions");
    std::vector<std::int64_t> rows(fields.begin() + 2, fields.begin() + 2 + m);
    std::vector<std::int64_t> cols(fields.begin() + 2 + m, fields.end());
    return validate(std::move(rows), std::move(cols));
}

std::string margins_to_record(const MarginPair& mp) {
    std::string out = std::to_string(mp.m()) + "," + std::to_string(mp.n());
    for (std::int64_t v : mp.rows) out += "," + std::to_string(v);
    for (std::int64_t v : mp.cols) out += "," + std::to_string(v);
    return out;
}

MarginPair load_margins_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidMargins("cannot open margins file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) throw InvalidMargins("margins file is empty: " + path);
    if (text[first] == '{') return margins_from_json(text);
    std::string line = text.substr(first);
    if (const auto eol = line.find_first_of("\r\n"); eol != std::string::npos)
        line.resize(eol);
    return margins_from_record(line);
}

}  // namespace contab
