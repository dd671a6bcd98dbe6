#include "semvox/toml.hpp"

#include <cctype>

#include "semvox/error.hpp"
#include "semvox/text.hpp"

namespace semvox::toml {

namespace {

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
    throw ValidationError("config line " + std::to_string(line_no) + ": " + what);
}

// Strips a trailing comment that is not inside a string literal.
std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (c == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
        if (c == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

bool looks_like_int(const std::string& s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
}

bool looks_like_float(const std::string& s) {
    if (s.empty()) return false;
    bool digit = false, dot = false, exp = false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digit = true;
        } else if (c == '.' && !dot && !exp) {
            dot = true;
        } else if ((c == 'e' || c == 'E') && digit && !exp) {
            exp = true;
            if (i + 1 < s.size() && (s[i + 1] == '-' || s[i + 1] == '+')) ++i;
        } else {
            return false;
        }
    }
    return digit && (dot || exp);
}

std::string parse_string_literal(const std::string& s, std::size_t line_no) {
    if (s.size() < 2 || s.front() != '"' || s.back() != '"') {
        fail(line_no, "expected a quoted string: " + s);
    }
    std::string out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        char c = s[i];
        if (c == '\\' && i + 2 < s.size()) {
            char n = s[i + 1];
            switch (n) {
                case 'n': out.push_back('\n'); ++i; continue;
                case 't': out.push_back('\t'); ++i; continue;
                case '"': out.push_back('"'); ++i; continue;
                case '\\': out.push_back('\\'); ++i; continue;
                default: break;
            }
        }
        out.push_back(c);
    }
    return out;
}

// Splits a [a, b, c] body on commas outside string literals.
std::vector<std::string> split_array_items(const std::string& body) {
    std::vector<std::string> items;
    std::string cur;
    bool in_string = false;
    for (std::size_t i = 0; i < body.size(); ++i) {
        char c = body[i];
        if (c == '"' && (i == 0 || body[i - 1] != '\\')) in_string = !in_string;
        if (c == ',' && !in_string) {
            items.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    std::string last = trim(cur);
    if (!last.empty()) items.push_back(last);
    return items;
}

Value parse_value(const std::string& raw, std::size_t line_no) {
    std::string s = trim(raw);
    if (s.empty()) fail(line_no, "missing value");
    if (s.front() == '"') return {parse_string_literal(s, line_no)};
    if (s == "true") return {true};
    if (s == "false") return {false};
    if (s.front() == '[') {
        if (s.back() != ']') fail(line_no, "unterminated array");
        auto items = split_array_items(s.substr(1, s.size() - 2));
        if (items.empty()) return {std::vector<std::string>{}};
        if (items[0].front() == '"') {
            std::vector<std::string> out;
            for (const auto& it : items) out.push_back(parse_string_literal(it, line_no));
            return {out};
        }
        bool all_int = true;
        for (const auto& it : items) all_int = all_int && looks_like_int(it);
        if (all_int) {
            std::vector<std::int64_t> out;
            for (const auto& it : items) out.push_back(parse_int(it));
            return {out};
        }
        std::vector<double> out;
        for (const auto& it : items) {
            if (!looks_like_int(it) && !looks_like_float(it)) {
                fail(line_no, "array elements must share one type");
            }
            out.push_back(parse_double(it));
        }
        return {out};
    }
    if (looks_like_int(s)) return {static_cast<std::int64_t>(parse_int(s))};
    if (looks_like_float(s)) return {parse_double(s)};
    fail(line_no, "cannot parse value: " + s);
}

} // namespace

const std::string& Value::as_string() const {
    if (auto* p = std::get_if<std::string>(&v)) return *p;
    throw ValidationError("config value is not a string");
}

std::int64_t Value::as_int() const {
    if (auto* p = std::get_if<std::int64_t>(&v)) return *p;
    throw ValidationError("config value is not an integer");
}

double Value::as_double() const {
    if (auto* p = std::get_if<double>(&v)) return *p;
    if (auto* p = std::get_if<std::int64_t>(&v)) return static_cast<double>(*p);
    throw ValidationError("config value is not a number");
}

bool Value::as_bool() const {
    if (auto* p = std::get_if<bool>(&v)) return *p;
    throw ValidationError("config value is not a boolean");
}

std::vector<std::string> Value::as_string_array() const {
    if (auto* p = std::get_if<std::vector<std::string>>(&v)) return *p;
    throw ValidationError("config value is not a string array");
}

std::vector<double> Value::as_double_array() const {
    if (auto* p = std::get_if<std::vector<double>>(&v)) return *p;
    if (auto* p = std::get_if<std::vector<std::int64_t>>(&v)) {
        return std::vector<double>(p->begin(), p->end());
    }
    throw ValidationError("config value is not a numeric array");
}

std::vector<std::int64_t> Value::as_int_array() const {
    if (auto* p = std::get_if<std::vector<std::int64_t>>(&v)) return *p;
    throw ValidationError("config value is not an integer array");
}

bool Document::contains(const std::string& key) const { return values.count(key) > 0; }

const Value& Document::at(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end()) {
        throw ValidationError("config is missing key '" + key + "'");
    }
    return it->second;
}

std::optional<std::string> Document::get_string(const std::string& key) const {
    if (!contains(key)) return std::nullopt;
    return at(key).as_string();
}

std::optional<std::int64_t> Document::get_int(const std::string& key) const {
    if (!contains(key)) return std::nullopt;
    return at(key).as_int();
}

std::optional<double> Document::get_double(const std::string& key) const {
    if (!contains(key)) return std::nullopt;
    return at(key).as_double();
}

std::optional<bool> Document::get_bool(const std::string& key) const {
    if (!contains(key)) return std::nullopt;
    return at(key).as_bool();
}

Document parse(const std::string& text) {
    Document doc;
    std::string table;
    std::size_t line_no = 0;
    std::string line;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();

        std::string s = trim(strip_comment(line));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']' || s.size() < 3) fail(line_no, "malformed table header");
            table = trim(s.substr(1, s.size() - 2));
            if (table.empty()) fail(line_no, "empty table name");
            continue;
        }
        auto eq = s.find('=');
        if (eq == std::string::npos) fail(line_no, "expected key = value");
        std::string key = trim(s.substr(0, eq));
        if (key.empty()) fail(line_no, "empty key");
        std::string full = table.empty() ? key : table + "." + key;
        if (doc.values.count(full)) fail(line_no, "duplicate key '" + full + "'");
        doc.values.emplace(full, parse_value(s.substr(eq + 1), line_no));
    }
    return doc;
}

Document parse_file(const std::filesystem::path& file) {
    return parse(read_file(file));
}

} // namespace semvox::toml
