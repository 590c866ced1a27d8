#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace swapbench {

struct PatchEntry {
    std::string function_id;
    std::string file_path;   // relative to the workspace root
    size_t byte_begin = 0;
    size_t byte_end = 0;
    std::string original_text;
    std::string replacement_text;
};

struct PatchSet {
    std::filesystem::path workspace;
    std::vector<PatchEntry> entries;
    bool applied = false;
    // digest of each touched file's bytes right after apply, keyed by
    // relative path; revert refuses if the on-disk bytes drifted
    std::map<std::string, std::uint64_t> applied_digests;
};

// Copies project_root into an isolated scratch tree for destructive builds.
// Each call yields a fresh directory; workspaces never share state.
std::filesystem::path prepare_workspace(const std::filesystem::path& project_root,
                                        const std::filesystem::path& scratch_parent);

// Splices each entry's replacement over its byte span. Every entry's
// original_text must match the workspace bytes (stale-span guard); offsets of
// later entries in the same file are adjusted for earlier substitutions.
// A mismatch aborts the whole file untouched.
PatchSet apply_patch(const std::filesystem::path& workspace,
                     const std::vector<PatchEntry>& entries);

// Restores every touched file byte-for-byte. Detects external modification
// since apply and refuses with the offending file list.
void revert_patch(PatchSet& patchset);

// Journal persistence so a crashed run can be reverted from disk.
void write_patch_journal(const PatchSet& patchset, const std::filesystem::path& journal_path);
PatchSet read_patch_journal(const std::filesystem::path& journal_path);

}  // namespace swapbench
