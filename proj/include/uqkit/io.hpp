#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "uqkit/common.hpp"

namespace uqkit {

// Shortest round-trip decimal form, locale independent.
std::string format_double(double value);

// Row-oriented CSV assembly: header row, comma separator, LF line endings,
// RFC-4180 quoting where a cell needs it.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);

    void row(std::vector<std::string> cells);
    void row(std::span<const double> values);

    const std::string& text() const { return text_; }
    void write(const std::string& path) const;

private:
    std::size_t width_;
    std::string text_;
};

void write_text(const std::string& path, const std::string& text);

nlohmann::json run_manifest(const std::string& command, const nlohmann::json& inputs,
                            std::uint64_t seed, double wall_seconds,
                            const std::vector<std::string>& outputs);

void write_json(const std::string& path, const nlohmann::json& value);

}  // namespace uqkit
