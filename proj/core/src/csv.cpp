#include "lcstf/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <system_error>

#include "lcstf/errors.hpp"

namespace lcstf {

std::string format_number(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

std::string format_number(std::int64_t value) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

std::string format_number(const std::optional<double>& value) {
    return value ? format_number(*value) : std::string{};
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::string_view comment,
                     std::initializer_list<std::string_view> columns)
    : path_(path), out_(path, std::ios::trunc), columns_(columns.size()) {
    if (!out_) {
        throw IoError("cannot create " + path.string());
    }
    if (!comment.empty()) {
        out_ << "# " << comment << '\n';
    }
    bool first = true;
    for (std::string_view c : columns) {
        out_ << (first ? "" : ",") << c;
        first = false;
    }
    out_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        out_ << (i == 0 ? "" : ",") << fields[i];
    }
    out_ << '\n';
    if (!out_) {
        throw IoError("failed writing " + path_.string());
    }
}

void ensure_writable_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw IoError("cannot create output directory " + dir.string() +
                      (ec ? ": " + ec.message() : std::string{}));
    }
    const auto probe = dir / ".lcstf_write_probe";
    {
        std::ofstream out(probe);
        if (!out) {
            throw IoError("output directory " + dir.string() + " is not writable");
        }
    }
    std::filesystem::remove(probe, ec);
}

}  // namespace lcstf
