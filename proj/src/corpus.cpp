#include "swapbench/corpus.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "swapbench/hash.hpp"
#include "swapbench/io.hpp"
#include "swapbench/lexer.hpp"

namespace swapbench {

namespace {

std::string normalize_for_id(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    std::string line;
    auto flush_line = [&] {
        size_t end = line.size();
        while (end > 0 && (line[end - 1] == ' ' || line[end - 1] == '\t' || line[end - 1] == '\r'))
            --end;
        out.append(line, 0, end);
        out.push_back('\n');
        line.clear();
    };
    for (char c : text) {
        if (c == '\n')
            flush_line();
        else
            line.push_back(c);
    }
    if (!line.empty())
        flush_line();
    return out;
}

struct LineIndex {
    std::vector<size_t> starts;  // byte offset of each line start

    explicit LineIndex(std::string_view src) {
        starts.push_back(0);
        for (size_t i = 0; i < src.size(); ++i)
            if (src[i] == '\n')
                starts.push_back(i + 1);
    }

    int line_of(size_t offset) const {
        auto it = std::upper_bound(starts.begin(), starts.end(), offset);
        return static_cast<int>(it - starts.begin());
    }

    size_t line_start(size_t offset) const {
        auto it = std::upper_bound(starts.begin(), starts.end(), offset);
        return starts[static_cast<size_t>(it - starts.begin() - 1)];
    }
};

bool ws_only(std::string_view s) {
    return s.find_first_not_of(" \t\r") == std::string_view::npos;
}

// Walks backward from the function's first token and absorbs leading comment
// blocks. A block attaches when it sits on its own line(s) and is separated
// from what follows by at most one blank line.
size_t attach_leading_comments(std::string_view src, const LineIndex& lines, size_t pos) {
    while (true) {
        size_t p = pos;
        int newlines = 0;
        while (p > 0) {
            char c = src[p - 1];
            if (c == '\n')
                ++newlines;
            else if (c != ' ' && c != '\t' && c != '\r')
                break;
            --p;
        }
        if (p == 0)
            break;
        int blank_lines = newlines > 0 ? newlines - 1 : 0;
        if (blank_lines > 1)
            break;

        if (p >= 2 && src[p - 2] == '*' && src[p - 1] == '/') {
            size_t open = src.rfind("/*", p - 2);
            if (open == std::string_view::npos)
                break;
            size_t ls = lines.line_start(open);
            if (!ws_only(src.substr(ls, open - ls)))
                break;
            pos = open;
            continue;
        }

        // Line-comment block: the previous line must start (mod whitespace)
        // with // and end at the byte we walked back to.
        size_t ls = lines.line_start(p - 1);
        size_t first = src.find_first_not_of(" \t", ls);
        if (first != std::string_view::npos && first + 1 < src.size() && src[first] == '/' &&
            src[first + 1] == '/' && first <= p - 1) {
            pos = first;
            continue;
        }
        break;
    }
    return pos;
}

struct ScanToken {
    const Token* tok;
};

bool is_punct(const Token& t, std::string_view src, std::string_view p) {
    return t.kind == TokenKind::Punctuator && t.text(src) == p;
}

// Tokens permitted between the parameter list's ')' and the body '{':
// cv-qualifiers, attribute macros, attribute paren groups and the odd
// C++ trailing bits. Anything else rejects the candidate.
bool qualifier_token(const Token& t, std::string_view src) {
    if (t.kind == TokenKind::Identifier || t.kind == TokenKind::Keyword)
        return true;
    if (t.kind == TokenKind::Punctuator) {
        std::string_view x = t.text(src);
        return x == "*" || x == "&" || x == "::" || x == "->" || x == "<" || x == ">" ||
               x == "[" || x == "]";
    }
    return false;
}

struct Definition {
    size_t name_idx;   // index into the scan stream
    size_t body_open;  // index of '{'
    size_t body_close; // index of matching '}'
    size_t stmt_start; // first token of the declaration
};

// Tries to interpret scan[stmt_start..brace_idx) + '{' as a function
// definition header. Returns the name token index or npos.
size_t match_function_header(const std::vector<const Token*>& scan, std::string_view src,
                             size_t stmt_start, size_t brace_idx) {
    // Pruned view: skip over brace groups earlier in the statement (struct
    // return types and similar), keep everything at paren depth 0 visible.
    std::vector<size_t> view;
    int brace_depth = 0;
    for (size_t i = stmt_start; i < brace_idx; ++i) {
        const Token& t = *scan[i];
        if (is_punct(t, src, "{")) {
            ++brace_depth;
            continue;
        }
        if (is_punct(t, src, "}")) {
            --brace_depth;
            continue;
        }
        if (brace_depth == 0)
            view.push_back(i);
    }
    if (view.size() < 3)
        return std::string_view::npos;

    // A top-level '=' means an initializer, never a definition header.
    int paren = 0;
    for (size_t vi : view) {
        const Token& t = *scan[vi];
        if (is_punct(t, src, "("))
            ++paren;
        else if (is_punct(t, src, ")"))
            --paren;
        else if (paren == 0 && is_punct(t, src, "="))
            return std::string_view::npos;
    }

    // Candidates: identifier directly followed by '(' — scanned from the
    // right so attribute macros with arguments do not shadow the real name.
    for (size_t v = view.size(); v-- > 1;) {
        size_t idx = view[v];
        const Token& t = *scan[idx];
        if (t.kind != TokenKind::Identifier)
            continue;
        if (v + 1 >= view.size() || !is_punct(*scan[view[v + 1]], src, "("))
            continue;
        // Needs a return type: at least one token before the name.
        // (Bare NAME(...) { ... } at file scope is a macro invocation.)
        if (v == 0)
            continue;

        // Match the parameter list within the view.
        size_t w = v + 1;
        int depth = 0;
        size_t close = std::string_view::npos;
        for (; w < view.size(); ++w) {
            const Token& u = *scan[view[w]];
            if (is_punct(u, src, "("))
                ++depth;
            else if (is_punct(u, src, ")")) {
                --depth;
                if (depth == 0) {
                    close = w;
                    break;
                }
            }
        }
        if (close == std::string_view::npos)
            continue;

        // Between ')' and '{': qualifiers and balanced paren groups only.
        bool ok = true;
        int qd = 0;
        for (size_t q = close + 1; q < view.size(); ++q) {
            const Token& u = *scan[view[q]];
            if (is_punct(u, src, "(")) {
                ++qd;
                continue;
            }
            if (is_punct(u, src, ")")) {
                --qd;
                if (qd < 0) {
                    ok = false;
                    break;
                }
                continue;
            }
            if (qd > 0)
                continue;
            if (!qualifier_token(u, src)) {
                ok = false;
                break;
            }
        }
        if (ok && qd == 0)
            return idx;
    }
    return std::string_view::npos;
}

}  // namespace

std::string make_function_id(const std::string& file_path, const std::string& name,
                             const std::string& source_text) {
    std::uint64_t h = fnv1a64(file_path);
    h = fnv1a64(std::string_view("\0", 1), h);
    h = fnv1a64(name, h);
    h = fnv1a64(std::string_view("\0", 1), h);
    h = fnv1a64(normalize_for_id(source_text), h);
    return "f" + to_hex(h);
}

std::vector<FunctionRecord> extract_from_source(const std::string& file_path,
                                                const std::string& source,
                                                std::vector<std::string>* warnings) {
    LexResult lexed = lex(source);
    if (warnings)
        for (auto& w : lexed.warnings)
            warnings->push_back(file_path + ": " + w);

    std::vector<const Token*> scan;
    scan.reserve(lexed.tokens.size());
    for (const Token& t : lexed.tokens)
        if (!t.in_directive)
            scan.push_back(&t);

    LineIndex lines(source);
    std::vector<FunctionRecord> records;

    size_t stmt_start = 0;
    int paren_depth = 0;
    size_t i = 0;
    auto src = std::string_view(source);

    auto skip_balanced_braces = [&](size_t open_idx) -> size_t {
        int depth = 0;
        int inner_paren = 0;
        for (size_t k = open_idx; k < scan.size(); ++k) {
            const Token& t = *scan[k];
            if (is_punct(t, src, "(")) {
                ++inner_paren;
            } else if (is_punct(t, src, ")")) {
                if (inner_paren > 0)
                    --inner_paren;
            } else if (inner_paren == 0 && is_punct(t, src, "{")) {
                ++depth;
            } else if (inner_paren == 0 && is_punct(t, src, "}")) {
                --depth;
                if (depth == 0)
                    return k;
            }
        }
        return std::string_view::npos;
    };

    while (i < scan.size()) {
        const Token& t = *scan[i];

        if (is_punct(t, src, "(")) {
            ++paren_depth;
            ++i;
            continue;
        }
        if (is_punct(t, src, ")")) {
            if (paren_depth > 0)
                --paren_depth;
            ++i;
            continue;
        }
        if (paren_depth > 0) {
            ++i;
            continue;
        }

        if (is_punct(t, src, ";")) {
            stmt_start = i + 1;
            ++i;
            continue;
        }

        if (is_punct(t, src, "}")) {
            // closing a namespace / extern block we scanned through
            stmt_start = i + 1;
            ++i;
            continue;
        }

        if (is_punct(t, src, "{")) {
            size_t name_idx = match_function_header(scan, src, stmt_start, i);
            if (name_idx != std::string_view::npos) {
                size_t close = skip_balanced_braces(i);
                if (close == std::string_view::npos) {
                    if (warnings)
                        warnings->push_back(file_path + ": unbalanced braces after line " +
                                            std::to_string(t.line));
                    break;
                }
                size_t decl_begin = scan[stmt_start]->begin;
                size_t span_begin = attach_leading_comments(src, lines, decl_begin);
                size_t span_end = scan[close]->end;

                FunctionRecord rec;
                rec.file_path = file_path;
                rec.name = std::string(scan[name_idx]->text(src));
                rec.byte_begin = span_begin;
                rec.byte_end = span_end;
                rec.start_line = lines.line_of(span_begin);
                rec.end_line = lines.line_of(span_end > 0 ? span_end - 1 : 0);
                rec.source_text = source.substr(span_begin, span_end - span_begin);
                rec.token_count = count_tokens(rec.source_text);
                rec.id = make_function_id(rec.file_path, rec.name, rec.source_text);
                records.push_back(std::move(rec));

                i = close + 1;
                stmt_start = i;
                continue;
            }

            // namespace / extern "C" blocks are transparent
            bool transparent = false;
            if (stmt_start < i) {
                const Token& first = *scan[stmt_start];
                std::string_view fw = first.text(src);
                if (first.kind == TokenKind::Keyword && (fw == "namespace" || fw == "extern"))
                    transparent = true;
            }
            if (transparent) {
                stmt_start = i + 1;
                ++i;
                continue;
            }

            // Anything else (type definitions, initializers) is opaque.
            size_t close = skip_balanced_braces(i);
            if (close == std::string_view::npos) {
                if (warnings)
                    warnings->push_back(file_path + ": unbalanced braces after line " +
                                        std::to_string(t.line));
                break;
            }
            i = close + 1;
            continue;
        }

        ++i;
    }

    return records;
}

namespace {

bool excluded(const std::string& rel, const std::vector<std::string>& globs) {
    for (const auto& g : globs)
        if (fnmatch(g.c_str(), rel.c_str(), 0) == 0)
            return true;
    return false;
}

bool has_extension(const std::filesystem::path& p, const std::vector<std::string>& exts) {
    std::string e = p.extension().string();
    return std::find(exts.begin(), exts.end(), e) != exts.end();
}

}  // namespace

CorpusSnapshot extract_functions(const std::filesystem::path& project_root,
                                 const ExtractionConfig& config,
                                 std::vector<std::string>* warnings) {
    if (config.min_tokens == 0 || config.min_tokens > config.max_tokens)
        throw std::runtime_error("invalid token bounds: require 0 < min <= max");
    if (!std::filesystem::is_directory(project_root))
        throw std::runtime_error("project root is not a directory: " + project_root.string());

    std::vector<std::string> files;
    for (auto it = std::filesystem::recursive_directory_iterator(
             project_root, std::filesystem::directory_options::skip_permission_denied);
         it != std::filesystem::recursive_directory_iterator(); ++it) {
        if (!it->is_regular_file())
            continue;
        if (!has_extension(it->path(), config.extensions))
            continue;
        std::string rel = std::filesystem::relative(it->path(), project_root).generic_string();
        if (excluded(rel, config.exclude_globs))
            continue;
        files.push_back(rel);
    }
    std::sort(files.begin(), files.end());

    CorpusSnapshot snapshot;
    snapshot.config = config;
    snapshot.stats.files_scanned = files.size();

    std::vector<std::vector<FunctionRecord>> per_file(files.size());
    std::vector<std::vector<std::string>> per_file_warnings(files.size());
    std::atomic<size_t> unreadable{0};
    std::atomic<size_t> next{0};

    int jobs = std::max(1, config.jobs);
    auto worker = [&] {
        while (true) {
            size_t idx = next.fetch_add(1);
            if (idx >= files.size())
                return;
            std::string text;
            try {
                text = read_file(project_root / files[idx]);
            } catch (const std::exception& e) {
                per_file_warnings[idx].push_back(std::string("unreadable file: ") + e.what());
                unreadable.fetch_add(1);
                continue;
            }
            per_file[idx] = extract_from_source(files[idx], text, &per_file_warnings[idx]);
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }

    for (size_t f = 0; f < files.size(); ++f) {
        if (warnings)
            for (auto& w : per_file_warnings[f])
                warnings->push_back(w);
        for (auto& rec : per_file[f]) {
            ++snapshot.stats.functions_found;
            if (rec.token_count < config.min_tokens || rec.token_count > config.max_tokens) {
                ++snapshot.stats.functions_filtered;
                continue;
            }
            snapshot.records.push_back(std::move(rec));
        }
    }
    snapshot.stats.files_unreadable = unreadable.load();
    snapshot.stats.functions_retained = snapshot.records.size();

    if (snapshot.stats.functions_found == 0)
        throw std::runtime_error("no function definitions found under " + project_root.string() +
                                 " — wrong project root?");

    std::sort(snapshot.records.begin(), snapshot.records.end(),
              [](const FunctionRecord& a, const FunctionRecord& b) {
                  if (a.file_path != b.file_path)
                      return a.file_path < b.file_path;
                  return a.start_line < b.start_line;
              });

    // Identical (file, name, text) triples can occur under #ifdef variants;
    // keep ids unique by occurrence index.
    std::map<std::string, int> seen;
    for (auto& rec : snapshot.records) {
        int n = ++seen[rec.id];
        if (n > 1)
            rec.id += "-" + std::to_string(n);
    }

    return snapshot;
}

void save_corpus(const CorpusSnapshot& snapshot, const std::filesystem::path& store_dir) {
    std::filesystem::create_directories(store_dir);

    std::vector<json> rows;
    rows.reserve(snapshot.records.size());
    for (const auto& r : snapshot.records) {
        rows.push_back(json{
            {"id", r.id},
            {"file_path", r.file_path},
            {"start_line", r.start_line},
            {"end_line", r.end_line},
            {"byte_begin", r.byte_begin},
            {"byte_end", r.byte_end},
            {"name", r.name},
            {"source_text", r.source_text},
            {"token_count", r.token_count},
        });
    }
    write_jsonl(store_dir / "functions.jsonl", rows);

    json manifest{
        {"project_name", snapshot.project_name},
        {"commit_id", snapshot.commit_id},
        {"record_count", snapshot.records.size()},
        {"config",
         {{"min_tokens", snapshot.config.min_tokens},
          {"max_tokens", snapshot.config.max_tokens},
          {"extensions", snapshot.config.extensions},
          {"exclude_globs", snapshot.config.exclude_globs}}},
        {"stats",
         {{"files_scanned", snapshot.stats.files_scanned},
          {"files_unreadable", snapshot.stats.files_unreadable},
          {"functions_found", snapshot.stats.functions_found},
          {"functions_retained", snapshot.stats.functions_retained},
          {"functions_filtered", snapshot.stats.functions_filtered}}},
    };
    write_file(store_dir / "manifest.json", manifest.dump(2) + "\n");
}

CorpusSnapshot load_corpus(const std::filesystem::path& store_dir) {
    json manifest = json::parse(read_file(store_dir / "manifest.json"), nullptr, false);
    if (manifest.is_discarded())
        throw std::runtime_error("corrupt store: unparseable manifest in " + store_dir.string());

    CorpusSnapshot snapshot;
    snapshot.project_name = manifest.value("project_name", "");
    snapshot.commit_id = manifest.value("commit_id", "");
    if (manifest.contains("config")) {
        const auto& c = manifest["config"];
        snapshot.config.min_tokens = c.value("min_tokens", size_t{10});
        snapshot.config.max_tokens = c.value("max_tokens", size_t{256});
        if (c.contains("extensions"))
            snapshot.config.extensions = c["extensions"].get<std::vector<std::string>>();
        if (c.contains("exclude_globs"))
            snapshot.config.exclude_globs = c["exclude_globs"].get<std::vector<std::string>>();
    }
    if (manifest.contains("stats")) {
        const auto& s = manifest["stats"];
        snapshot.stats.files_scanned = s.value("files_scanned", size_t{0});
        snapshot.stats.files_unreadable = s.value("files_unreadable", size_t{0});
        snapshot.stats.functions_found = s.value("functions_found", size_t{0});
        snapshot.stats.functions_retained = s.value("functions_retained", size_t{0});
        snapshot.stats.functions_filtered = s.value("functions_filtered", size_t{0});
    }

    for (const auto& row : read_jsonl(store_dir / "functions.jsonl")) {
        FunctionRecord r;
        try {
            r.id = row.at("id").get<std::string>();
            r.file_path = row.at("file_path").get<std::string>();
            r.start_line = row.at("start_line").get<int>();
            r.end_line = row.at("end_line").get<int>();
            r.byte_begin = row.at("byte_begin").get<size_t>();
            r.byte_end = row.at("byte_end").get<size_t>();
            r.name = row.at("name").get<std::string>();
            r.source_text = row.at("source_text").get<std::string>();
            r.token_count = row.at("token_count").get<size_t>();
        } catch (const json::exception& e) {
            throw std::runtime_error("corrupt store: bad record in " +
                                     (store_dir / "functions.jsonl").string() + ": " + e.what());
        }
        snapshot.records.push_back(std::move(r));
    }

    size_t expected = manifest.value("record_count", snapshot.records.size());
    if (expected != snapshot.records.size())
        throw std::runtime_error("corrupt store: manifest expects " + std::to_string(expected) +
                                 " records, found " + std::to_string(snapshot.records.size()));
    return snapshot;
}

}  // namespace swapbench
