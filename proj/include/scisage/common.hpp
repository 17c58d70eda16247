#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace scisage {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InputError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct PreconditionError : Error { using Error::Error; };
struct ClassificationError : Error { using Error::Error; };
struct GenerationError : Error { using Error::Error; };
struct RetrievalError : Error { using Error::Error; };
struct AssemblyError : Error { using Error::Error; };
struct AlignmentError : Error { using Error::Error; };
struct TransportError : Error { using Error::Error; };
struct ProtocolError : Error { using Error::Error; };
struct UnmatchedRequestError : ProtocolError { using ProtocolError::ProtocolError; };

/// Raised when a reflection loop's producer fails after at least one good
/// artifact was seen; carries the last good artifact in serialized form.
struct LoopAbortError : Error {
    LoopAbortError(const std::string& msg, std::string last_artifact)
        : Error(msg), last_artifact_json(std::move(last_artifact)) {}
    std::string last_artifact_json;
};

// ---------------------------------------------------------------------------
// Logging — deterministic (no timestamps), thread-safe, inspectable in tests.
// ---------------------------------------------------------------------------

class Logger {
public:
    enum class Level { info, warn };
    struct Entry {
        Level level;
        std::string message;
    };

    void info(const std::string& msg) { append(Level::info, msg); }
    void warn(const std::string& msg) { append(Level::warn, msg); }

    std::vector<Entry> entries() const {
        std::lock_guard<std::mutex> lock(mu_);
        return entries_;
    }

    std::size_t count_containing(const std::string& needle) const {
        std::lock_guard<std::mutex> lock(mu_);
        std::size_t n = 0;
        for (const auto& e : entries_)
            if (e.message.find(needle) != std::string::npos) ++n;
        return n;
    }

    std::size_t warning_count() const {
        std::lock_guard<std::mutex> lock(mu_);
        std::size_t n = 0;
        for (const auto& e : entries_)
            if (e.level == Level::warn) ++n;
        return n;
    }

    std::string dump() const {
        std::lock_guard<std::mutex> lock(mu_);
        std::ostringstream os;
        for (const auto& e : entries_)
            os << (e.level == Level::warn ? "WARN  " : "INFO  ") << e.message << "\n";
        return os.str();
    }

private:
    void append(Level level, const std::string& msg) {
        std::lock_guard<std::mutex> lock(mu_);
        entries_.push_back({level, msg});
    }

    mutable std::mutex mu_;
    std::vector<Entry> entries_;
};

// ---------------------------------------------------------------------------
// String helpers
// ---------------------------------------------------------------------------

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            parts.emplace_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return parts;
}

inline std::vector<std::string> split_lines(std::string_view s) {
    auto lines = split(s, '\n');
    for (auto& l : lines)
        if (!l.empty() && l.back() == '\r') l.pop_back();
    return lines;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

inline std::string collapse_whitespace(std::string_view s) {
    std::string out;
    bool in_space = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_space = true;
        } else {
            if (in_space && !out.empty()) out += ' ';
            in_space = false;
            out += c;
        }
    }
    return out;
}

inline bool istarts_with(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(s[i])) !=
            std::tolower(static_cast<unsigned char>(prefix[i])))
            return false;
    return true;
}

inline bool icontains(std::string_view s, std::string_view needle) {
    if (needle.empty()) return true;
    return to_lower(s).find(to_lower(needle)) != std::string::npos;
}

/// Replaces every occurrence of "[KEY]" with its mapped value.
inline std::string substitute(std::string_view tpl,
                              const std::map<std::string, std::string>& values) {
    std::string out(tpl);
    for (const auto& [key, value] : values) {
        const std::string token = "[" + key + "]";
        std::size_t pos = 0;
        while ((pos = out.find(token, pos)) != std::string::npos) {
            out.replace(pos, token.size(), value);
            pos += value.size();
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Identity normalization for paper records and gold reference lists.
// ---------------------------------------------------------------------------

/// Lowercase and keep alphanumerics only ("A Survey: LLMs!" -> "asurveyllms").
inline std::string normalize_title(std::string_view title) {
    std::string out;
    for (char c : title) {
        unsigned char u = static_cast<unsigned char>(c);
        if (std::isalnum(u)) out += static_cast<char>(std::tolower(u));
    }
    return out;
}

/// Lowercase DOI with common URL/scheme prefixes stripped.
inline std::string normalize_doi(std::string_view doi) {
    std::string s = to_lower(trim(doi));
    for (std::string_view prefix :
         {"https://doi.org/", "http://doi.org/", "https://dx.doi.org/",
          "http://dx.doi.org/", "doi:"}) {
        if (s.rfind(prefix, 0) == 0) {
            s = s.substr(prefix.size());
            break;
        }
    }
    return s;
}

/// Stable record key: normalized DOI when present, else normalized title.
inline std::string make_paper_id(std::string_view doi, std::string_view title) {
    std::string d = normalize_doi(doi);
    if (!d.empty()) return d;
    return normalize_title(title);
}

// ---------------------------------------------------------------------------
// Title token overlap, used by the outline merge heuristic.
// ---------------------------------------------------------------------------

/// Lowercased alphanumeric words with a trailing 's' stripped, so
/// "LLM Applications" and "Applications of LLMs" share tokens.
inline std::vector<std::string> title_tokens(std::string_view title) {
    std::vector<std::string> tokens;
    std::string cur;
    auto flush = [&] {
        if (cur.empty()) return;
        if (cur.size() > 3 && cur.back() == 's') cur.pop_back();
        tokens.push_back(cur);
        cur.clear();
    };
    for (char c : title) {
        unsigned char u = static_cast<unsigned char>(c);
        if (std::isalnum(u))
            cur += static_cast<char>(std::tolower(u));
        else
            flush();
    }
    flush();
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    return tokens;
}

inline double token_jaccard(std::string_view a, std::string_view b) {
    auto ta = title_tokens(a);
    auto tb = title_tokens(b);
    if (ta.empty() && tb.empty()) return 1.0;
    std::vector<std::string> inter;
    std::set_intersection(ta.begin(), ta.end(), tb.begin(), tb.end(),
                          std::back_inserter(inter));
    std::size_t uni = ta.size() + tb.size() - inter.size();
    return uni == 0 ? 0.0 : static_cast<double>(inter.size()) / static_cast<double>(uni);
}

// ---------------------------------------------------------------------------
// Citation markers: bracketed numeric tokens "[k]" inside prose.
// ---------------------------------------------------------------------------

struct CitationMarker {
    std::size_t pos = 0;  // offset of '['
    std::size_t len = 0;  // token length including brackets
    int index = 0;        // 1-based value inside the brackets
};

inline std::vector<CitationMarker> find_citation_markers(std::string_view text) {
    std::vector<CitationMarker> out;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '[') continue;
        std::size_t j = i + 1;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        if (j > i + 1 && j < text.size() && text[j] == ']') {
            int value = 0;
            for (std::size_t k = i + 1; k < j; ++k) value = value * 10 + (text[k] - '0');
            if (value >= 1) out.push_back({i, j - i + 1, value});
            i = j;
        }
    }
    return out;
}

inline std::vector<int> marker_sequence(std::string_view text) {
    std::vector<int> seq;
    for (const auto& m : find_citation_markers(text)) seq.push_back(m.index);
    return seq;
}

/// Rewrites each marker through `remap`; a nullopt result strips the marker
/// (together with one directly preceding space, so prose stays tidy).
inline std::string rewrite_citation_markers(
    std::string_view text, const std::function<std::optional<int>(int)>& remap) {
    std::string out;
    std::size_t cursor = 0;
    for (const auto& m : find_citation_markers(text)) {
        std::size_t copy_end = m.pos;
        auto mapped = remap(m.index);
        if (!mapped && copy_end > cursor && text[copy_end - 1] == ' ') --copy_end;
        out.append(text.substr(cursor, copy_end - cursor));
        if (mapped) out += "[" + std::to_string(*mapped) + "]";
        cursor = m.pos + m.len;
    }
    out.append(text.substr(cursor));
    return out;
}

// ---------------------------------------------------------------------------
// Hashing (artifact fingerprints in reflection logs)
// ---------------------------------------------------------------------------

inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string fnv1a64_hex(std::string_view data) {
    static const char* digits = "0123456789abcdef";
    std::uint64_t h = fnv1a64(data);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xF];
        h >>= 4;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Bounded fan-out. Runs inline when concurrency <= 1 so that call ordering
// (and therefore any recorded transcript) stays deterministic.
// ---------------------------------------------------------------------------

inline void parallel_for(std::size_t count, std::size_t concurrency,
                         const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    if (concurrency <= 1 || count == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mu;
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> threads;
    std::size_t n_threads = std::min(concurrency, count);
    threads.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace scisage
