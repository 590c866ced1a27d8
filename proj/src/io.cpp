#include "swapbench/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "swapbench/hash.hpp"

namespace swapbench {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad())
        throw std::runtime_error("read failed for " + path.string());
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out)
        throw std::runtime_error("write failed for " + path.string());
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    std::vector<json> rows;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        json row = json::parse(line, nullptr, false);
        if (row.is_discarded())
            throw std::runtime_error("corrupt store: " + path.string() + " line " +
                                     std::to_string(lineno) + " is not valid JSON");
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& rows) {
    std::string buf;
    for (const auto& row : rows) {
        buf += row.dump();
        buf += '\n';
    }
    write_file(path, buf);
}

struct JsonlWriter::Impl {
    std::ofstream out;
    std::filesystem::path path;
};

JsonlWriter::JsonlWriter(const std::filesystem::path& path) : impl_(new Impl) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    impl_->path = path;
    impl_->out.open(path, std::ios::binary | std::ios::trunc);
    if (!impl_->out) {
        delete impl_;
        throw std::runtime_error("cannot write " + path.string());
    }
}

JsonlWriter::~JsonlWriter() { delete impl_; }

void JsonlWriter::append(const json& row) {
    impl_->out << row.dump() << '\n';
    if (!impl_->out)
        throw std::runtime_error("append failed for " + impl_->path.string());
}

void JsonlWriter::flush() { impl_->out.flush(); }

std::uint64_t file_digest(const std::filesystem::path& path) {
    return fnv1a64(read_file(path));
}

}  // namespace swapbench
