#include "swapbench/patcher.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "swapbench/hash.hpp"
#include "swapbench/io.hpp"

namespace swapbench {

std::filesystem::path prepare_workspace(const std::filesystem::path& project_root,
                                        const std::filesystem::path& scratch_parent) {
    if (!std::filesystem::is_directory(project_root))
        throw std::runtime_error("project root is not a directory: " + project_root.string());
    std::filesystem::create_directories(scratch_parent);

    std::filesystem::path ws;
    for (int n = 0;; ++n) {
        ws = scratch_parent / ("ws" + std::to_string(n));
        if (!std::filesystem::exists(ws))
            break;
    }
    std::error_code ec;
    std::filesystem::copy(project_root, ws,
                          std::filesystem::copy_options::recursive |
                              std::filesystem::copy_options::copy_symlinks,
                          ec);
    if (ec) {
        std::filesystem::remove_all(ws);
        throw std::runtime_error("workspace copy failed: " + ec.message());
    }
    return ws;
}

namespace {

struct FilePlan {
    std::vector<const PatchEntry*> entries;  // sorted ascending by byte_begin
};

std::map<std::string, FilePlan> group_by_file(const std::vector<PatchEntry>& entries) {
    std::map<std::string, FilePlan> plan;
    for (const auto& e : entries)
        plan[e.file_path].entries.push_back(&e);
    for (auto& [path, fp] : plan) {
        std::sort(fp.entries.begin(), fp.entries.end(),
                  [](const PatchEntry* a, const PatchEntry* b) {
                      return a->byte_begin < b->byte_begin;
                  });
        for (size_t i = 1; i < fp.entries.size(); ++i)
            if (fp.entries[i]->byte_begin < fp.entries[i - 1]->byte_end)
                throw std::runtime_error("overlapping patch entries in " + path + " (" +
                                         fp.entries[i - 1]->function_id + ", " +
                                         fp.entries[i]->function_id + ")");
    }
    return plan;
}

}  // namespace

PatchSet apply_patch(const std::filesystem::path& workspace,
                     const std::vector<PatchEntry>& entries) {
    auto plan = group_by_file(entries);
    PatchSet ps;

    // Validate every span before touching anything, then substitute from the
    // back so earlier offsets stay valid. Atomic per file: all entries for a
    // file are checked against the pristine bytes first.
    for (auto& [rel, fp] : plan) {
        std::string content = read_file(workspace / rel);
        for (const PatchEntry* e : fp.entries) {
            if (e->byte_end > content.size() ||
                content.compare(e->byte_begin, e->byte_end - e->byte_begin, e->original_text) != 0)
                throw std::runtime_error("span mismatch for " + e->function_id + " in " + rel +
                                         " — stale byte span, file left untouched");
        }
        for (auto it = fp.entries.rbegin(); it != fp.entries.rend(); ++it) {
            const PatchEntry* e = *it;
            content.replace(e->byte_begin, e->byte_end - e->byte_begin, e->replacement_text);
        }
        write_file(workspace / rel, content);
        ps.applied_digests[rel] = fnv1a64(content);
    }

    ps.workspace = workspace;
    ps.entries = entries;
    ps.applied = true;
    return ps;
}

namespace {

// Reconstructs the pristine bytes of one file from its patched content by
// reversing substitutions back-to-front against shift-adjusted offsets.
std::string unpatched_content(std::string content, const FilePlan& fp) {
    long long shift = 0;
    std::vector<std::pair<size_t, const PatchEntry*>> adjusted;
    for (const PatchEntry* e : fp.entries) {
        adjusted.emplace_back(static_cast<size_t>(static_cast<long long>(e->byte_begin) + shift),
                              e);
        shift += static_cast<long long>(e->replacement_text.size()) -
                 static_cast<long long>(e->original_text.size());
    }
    for (auto it = adjusted.rbegin(); it != adjusted.rend(); ++it) {
        auto [pos, e] = *it;
        content.replace(pos, e->replacement_text.size(), e->original_text);
    }
    return content;
}

}  // namespace

void revert_patch(PatchSet& patchset) {
    if (!patchset.applied)
        throw std::runtime_error("revert_patch: patchset not applied");
    auto plan = group_by_file(patchset.entries);

    // Integrity pass first: on-disk bytes must equal what apply produced.
    std::vector<std::string> modified;
    std::map<std::string, std::string> restored;
    for (auto& [rel, fp] : plan) {
        std::string disk = read_file(patchset.workspace / rel);
        auto it = patchset.applied_digests.find(rel);
        if (it == patchset.applied_digests.end() || fnv1a64(disk) != it->second) {
            modified.push_back(rel);
            continue;
        }
        restored[rel] = unpatched_content(std::move(disk), fp);
    }
    if (!modified.empty()) {
        std::string msg = "revert_patch: externally modified since apply:";
        for (const auto& f : modified)
            msg += " " + f;
        throw std::runtime_error(msg);
    }
    for (auto& [rel, content] : restored)
        write_file(patchset.workspace / rel, content);
    patchset.applied = false;
}

void write_patch_journal(const PatchSet& patchset, const std::filesystem::path& journal_path) {
    std::vector<json> rows;
    json digests = json::object();
    for (const auto& [rel, d] : patchset.applied_digests)
        digests[rel] = d;
    rows.push_back(json{{"workspace", patchset.workspace.string()},
                        {"applied", patchset.applied},
                        {"applied_digests", digests}});
    for (const auto& e : patchset.entries)
        rows.push_back(json{
            {"function_id", e.function_id},
            {"file_path", e.file_path},
            {"byte_begin", e.byte_begin},
            {"byte_end", e.byte_end},
            {"original_text", e.original_text},
            {"replacement_text", e.replacement_text},
        });
    write_jsonl(journal_path, rows);
}

PatchSet read_patch_journal(const std::filesystem::path& journal_path) {
    auto rows = read_jsonl(journal_path);
    if (rows.empty())
        throw std::runtime_error("empty patch journal: " + journal_path.string());
    PatchSet ps;
    ps.workspace = rows[0].at("workspace").get<std::string>();
    ps.applied = rows[0].value("applied", false);
    if (rows[0].contains("applied_digests"))
        for (auto& [rel, d] : rows[0]["applied_digests"].items())
            ps.applied_digests[rel] = d.get<std::uint64_t>();
    for (size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        PatchEntry e;
        e.function_id = row.at("function_id").get<std::string>();
        e.file_path = row.at("file_path").get<std::string>();
        e.byte_begin = row.at("byte_begin").get<size_t>();
        e.byte_end = row.at("byte_end").get<size_t>();
        e.original_text = row.at("original_text").get<std::string>();
        e.replacement_text = row.at("replacement_text").get<std::string>();
        ps.entries.push_back(std::move(e));
    }
    return ps;
}

}  // namespace swapbench
