#ifndef SEMVOX_TEXT_HPP
#define SEMVOX_TEXT_HPP

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace semvox {

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string to_lower_ascii(std::string_view s);
std::string to_upper_ascii(std::string_view s);
bool starts_with(std::string_view s, std::string_view prefix);

// Locale-independent numeric formatting ("." decimal point always).
std::string format_g17(double v);            // 17 significant digits
std::string format_fixed(double v, int decimals);
double parse_double(std::string_view s);     // throws PipelineError on garbage
long long parse_int(std::string_view s);

// Whole-file helpers.
std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, std::string_view content);

// Minimal CSV support: quoted fields, embedded commas/quotes, CRLF.
std::vector<std::string> parse_csv_line(std::string_view line);
std::vector<std::vector<std::string>> read_csv(std::istream& in);
std::string csv_escape(std::string_view field);

} // namespace semvox

#endif
