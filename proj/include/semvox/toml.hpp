#ifndef SEMVOX_TOML_HPP
#define SEMVOX_TOML_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace semvox::toml {

// The subset of TOML the run config needs: [tables], key = value with
// strings, integers, floats, booleans and flat homogeneous arrays,
// plus # comments. Keys are addressed as "table.key".
struct Value {
    std::variant<std::string, std::int64_t, double, bool,
                 std::vector<std::string>, std::vector<double>,
                 std::vector<std::int64_t>>
        v;

    const std::string& as_string() const;
    std::int64_t as_int() const;
    double as_double() const; // accepts integer values too
    bool as_bool() const;
    std::vector<std::string> as_string_array() const;
    std::vector<double> as_double_array() const;
    std::vector<std::int64_t> as_int_array() const;
};

class Document {
public:
    bool contains(const std::string& dotted_key) const;
    const Value& at(const std::string& dotted_key) const;

    std::optional<std::string> get_string(const std::string& key) const;
    std::optional<std::int64_t> get_int(const std::string& key) const;
    std::optional<double> get_double(const std::string& key) const;
    std::optional<bool> get_bool(const std::string& key) const;

    std::map<std::string, Value> values; // insertion not preserved; sorted keys
};

Document parse(const std::string& text);
Document parse_file(const std::filesystem::path& file);

} // namespace semvox::toml

#endif
