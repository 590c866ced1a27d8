#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace swapbench {

using json = nlohmann::json;

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// One JSON object per line, UTF-8. Throws on any line that fails to parse,
// naming the file and line number; a truncated or corrupt store never loads
// silently.
std::vector<json> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, const std::vector<json>& rows);

// Streaming appender so long campaigns survive interruption with a valid
// prefix on disk.
class JsonlWriter {
public:
    explicit JsonlWriter(const std::filesystem::path& path);
    ~JsonlWriter();
    JsonlWriter(const JsonlWriter&) = delete;
    JsonlWriter& operator=(const JsonlWriter&) = delete;

    void append(const json& row);
    void flush();

private:
    struct Impl;
    Impl* impl_;
};

std::uint64_t file_digest(const std::filesystem::path& path);

}  // namespace swapbench
