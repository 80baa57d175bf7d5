#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace erckit {

/// Locale-independent shortest round-trip formatting (std::to_chars).
std::string format_float(float value);
std::string format_double(double value);
std::string format_fixed(double value, int decimals);

/// `# erckit <kind> config_hash=<hex>` provenance header; readers skip any
/// line starting with '#'.
std::string provenance_header(std::string_view kind,
                              std::string_view config_hash);
bool is_comment_line(std::string_view line);

std::ifstream open_input(const std::filesystem::path& path);
std::ofstream open_output(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path,
                     std::string_view content);

std::string trim(std::string_view text);
std::string lower(std::string_view text);
std::vector<std::string> split_on(std::string_view text, char sep);

}  // namespace erckit
