#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace swapbench {

struct FunctionRecord {
    std::string id;          // stable content hash, see make_function_id
    std::string file_path;   // relative to project root, '/' separators
    int start_line = 0;      // 1-based, inclusive
    int end_line = 0;        // 1-based, inclusive
    size_t byte_begin = 0;   // offset of source_text within the file
    size_t byte_end = 0;     // exclusive
    std::string name;
    std::string source_text; // verbatim bytes, leading attached comments included
    size_t token_count = 0;

    bool operator==(const FunctionRecord&) const = default;
};

struct ExtractionConfig {
    size_t min_tokens = 10;
    size_t max_tokens = 256;
    std::vector<std::string> extensions = {".c", ".cc", ".cpp", ".cxx", ".h", ".hpp"};
    std::vector<std::string> exclude_globs;  // matched against the relative path
    int jobs = 1;
};

struct ExtractionStats {
    size_t files_scanned = 0;
    size_t files_unreadable = 0;
    size_t functions_found = 0;     // before the token-count filter
    size_t functions_retained = 0;
    size_t functions_filtered = 0;  // outside [min_tokens, max_tokens]
};

struct CorpusSnapshot {
    std::string project_name;
    std::string commit_id;
    ExtractionConfig config;
    std::vector<FunctionRecord> records;  // sorted by (file_path, start_line)
    ExtractionStats stats;

    bool operator==(const CorpusSnapshot& o) const {
        return project_name == o.project_name && commit_id == o.commit_id &&
               records == o.records;
    }
};

std::string make_function_id(const std::string& file_path, const std::string& name,
                             const std::string& source_text);

// Extracts every function definition from one translation unit's text.
// Records come back in file order with byte spans that splice back exactly.
std::vector<FunctionRecord> extract_from_source(const std::string& file_path,
                                                const std::string& source,
                                                std::vector<std::string>* warnings = nullptr);

// Walks the tree, extracts per file (parallel when config.jobs > 1), filters
// by token count and assembles the sorted snapshot. Throws if no function at
// all is found. Unreadable files produce a warning and are skipped.
CorpusSnapshot extract_functions(const std::filesystem::path& project_root,
                                 const ExtractionConfig& config,
                                 std::vector<std::string>* warnings = nullptr);

// Store layout: <dir>/functions.jsonl plus <dir>/manifest.json. Round-trip is
// byte-lossless on every field; any corruption surfaces as an error.
void save_corpus(const CorpusSnapshot& snapshot, const std::filesystem::path& store_dir);
CorpusSnapshot load_corpus(const std::filesystem::path& store_dir);

}  // namespace swapbench
