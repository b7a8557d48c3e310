#include "uqkit/io.hpp"

#include <charconv>
#include <fstream>
#include <utility>

#include <Eigen/Core>

namespace uqkit {

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

namespace {

bool needs_quoting(const std::string& cell) {
    return cell.find_first_of(",\"\r\n") != std::string::npos;
}

std::string quote_cell(const std::string& cell) {
    std::string out = "\"";
    for (char c : cell) {
        out += c;
        if (c == '"') out += '"';
    }
    out += '"';
    return out;
}

}  // namespace

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) {
    if (header.empty()) throw SizeError("CSV needs at least one column");
    row(std::move(header));
}

void CsvWriter::row(std::vector<std::string> cells) {
    if (cells.size() != width_) throw SizeError("CSV row width does not match header");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) text_ += ',';
        text_ += needs_quoting(cells[i]) ? quote_cell(cells[i]) : cells[i];
    }
    text_ += '\n';
}

void CsvWriter::row(std::span<const double> values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_double(v));
    row(std::move(cells));
}

void CsvWriter::write(const std::string& path) const { write_text(path, text_); }

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw ConfigError("write failed: " + path);
}

nlohmann::json run_manifest(const std::string& command, const nlohmann::json& inputs,
                            std::uint64_t seed, double wall_seconds,
                            const std::vector<std::string>& outputs) {
    nlohmann::json m;
    m["schema"] = 1;
    m["command"] = command;
    m["inputs"] = inputs;
    m["seed"] = seed;
    m["outputs"] = outputs;
    m["wall_seconds"] = wall_seconds;
    m["versions"]["uqkit"] = "1.0.0";
    m["versions"]["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                             std::to_string(EIGEN_MAJOR_VERSION) + "." +
                             std::to_string(EIGEN_MINOR_VERSION);
    return m;
}

void write_json(const std::string& path, const nlohmann::json& value) {
    write_text(path, value.dump(2) + "\n");
}

}  // namespace uqkit
