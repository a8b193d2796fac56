#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lcstf {

/// Shortest round-trip decimal form, independent of the C locale.
std::string format_number(double value);
std::string format_number(std::int64_t value);
inline std::string format_number(int value) { return format_number(static_cast<std::int64_t>(value)); }
/// Empty field for an absent value.
std::string format_number(const std::optional<double>& value);

/// CSV file with a leading `# key=value ...` comment line and a header row.
class CsvWriter {
public:
    /// Throws IoError when the file cannot be created.
    CsvWriter(const std::filesystem::path& path, std::string_view comment,
              std::initializer_list<std::string_view> columns);

    void row(const std::vector<std::string>& fields);
    void flush() { out_.flush(); }
    std::size_t columns() const { return columns_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t columns_;
};

/// Creates `dir` if needed and checks that it accepts new files.
void ensure_writable_directory(const std::filesystem::path& dir);

}  // namespace lcstf
