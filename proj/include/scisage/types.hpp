#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scisage/common.hpp"

namespace scisage {

// ---------------------------------------------------------------------------
// Query understanding
// ---------------------------------------------------------------------------

enum class QueryType {
    survey,
    method,
    application,
    analysis,
    position,
    theory,
    benchmark,
    dataset,
    other,
};

inline const char* to_string(QueryType t) {
    switch (t) {
        case QueryType::survey: return "survey";
        case QueryType::method: return "method";
        case QueryType::application: return "application";
        case QueryType::analysis: return "analysis";
        case QueryType::position: return "position";
        case QueryType::theory: return "theory";
        case QueryType::benchmark: return "benchmark";
        case QueryType::dataset: return "dataset";
        case QueryType::other: return "other";
    }
    return "other";
}

inline std::optional<QueryType> query_type_from_string(std::string_view s) {
    const std::string v = to_lower(trim(s));
    for (QueryType t : {QueryType::survey, QueryType::method, QueryType::application,
                        QueryType::analysis, QueryType::position, QueryType::theory,
                        QueryType::benchmark, QueryType::dataset, QueryType::other})
        if (v == to_string(t)) return t;
    return std::nullopt;
}

/// Structured reading of the user query.
struct Intent {
    std::string domain;
    QueryType query_type = QueryType::other;
    std::string topic;

    bool operator==(const Intent&) const = default;
};

/// Original query together with its English translation and optional rewrite.
struct RewrittenQuery {
    std::string original;
    std::string translated;
    std::string rewritten;
    bool was_rewritten = false;

    bool operator==(const RewrittenQuery&) const = default;
};

// ---------------------------------------------------------------------------
// Outline tree
// ---------------------------------------------------------------------------

struct OutlineNode {
    std::string title;
    int depth = 1;
    std::vector<std::string> key_points;
    std::vector<std::string> search_queries;
    std::vector<OutlineNode> children;
    bool is_content = true;

    bool operator==(const OutlineNode&) const = default;
};

struct Outline {
    std::string root_title;
    std::vector<OutlineNode> sections;
    std::string template_id;

    bool operator==(const Outline&) const = default;
};

/// Sections that are scaffolding rather than literature-backed prose.
inline bool is_non_content_title(std::string_view title) {
    const std::string t = to_lower(trim(title));
    if (t.find("reference") != std::string::npos) return true;
    if (t.rfind("conclusion", 0) == 0) return true;
    for (std::string_view fixed :
         {"introduction", "bibliography", "acknowledgments", "acknowledgements",
          "future work", "appendix", "abstract"})
        if (t == fixed) return true;
    return false;
}

/// Recomputes depths from tree shape; parse and merge paths rely on this.
inline void assign_depths(std::vector<OutlineNode>& nodes, int depth = 1) {
    for (auto& n : nodes) {
        n.depth = depth;
        assign_depths(n.children, depth + 1);
    }
}

inline void assign_depths(Outline& outline) { assign_depths(outline.sections, 1); }

inline int max_depth(const std::vector<OutlineNode>& nodes) {
    int d = 0;
    for (const auto& n : nodes) d = std::max(d, std::max(n.depth, max_depth(n.children)));
    return d;
}

inline std::size_t count_nodes(const std::vector<OutlineNode>& nodes) {
    std::size_t n = nodes.size();
    for (const auto& node : nodes) n += count_nodes(node.children);
    return n;
}

/// Depth-first walk with 1-based dotted paths ("2", "2.1", ...).
template <typename Fn>
void for_each_node(const std::vector<OutlineNode>& nodes, Fn&& fn,
                   const std::string& prefix = "") {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        std::string path = prefix.empty() ? std::to_string(i + 1)
                                          : prefix + "." + std::to_string(i + 1);
        fn(nodes[i], path);
        for_each_node(nodes[i].children, fn, path);
    }
}

template <typename Fn>
void for_each_node(std::vector<OutlineNode>& nodes, Fn&& fn,
                   const std::string& prefix = "") {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        std::string path = prefix.empty() ? std::to_string(i + 1)
                                          : prefix + "." + std::to_string(i + 1);
        fn(nodes[i], path);
        for_each_node(nodes[i].children, fn, path);
    }
}

template <typename Fn>
void for_each_node(const Outline& outline, Fn&& fn) {
    for_each_node(outline.sections, std::forward<Fn>(fn), "");
}

template <typename Fn>
void for_each_node(Outline& outline, Fn&& fn) {
    for_each_node(outline.sections, std::forward<Fn>(fn), "");
}

inline const OutlineNode* find_node(const Outline& outline, std::string_view path) {
    const std::vector<OutlineNode>* level = &outline.sections;
    const OutlineNode* found = nullptr;
    for (const auto& part : split(path, '.')) {
        std::size_t idx = 0;
        try {
            idx = static_cast<std::size_t>(std::stoul(trim(part)));
        } catch (...) {
            return nullptr;
        }
        if (idx < 1 || idx > level->size()) return nullptr;
        found = &(*level)[idx - 1];
        level = &found->children;
    }
    return found;
}

inline std::vector<std::string> content_node_paths(const Outline& outline) {
    std::vector<std::string> paths;
    for_each_node(outline.sections, [&](const OutlineNode& n, const std::string& path) {
        if (n.is_content) paths.push_back(path);
    });
    return paths;
}

// ---------------------------------------------------------------------------
// Retrieved papers
// ---------------------------------------------------------------------------

struct PaperRecord {
    std::string id;  // normalized DOI when known, else normalized title
    std::string title;
    std::string abstract;
    std::optional<std::string> full_text;
    std::vector<std::string> authors;
    int year = 0;
    std::string venue;
    int citation_count = 0;
    double author_signal = 0.0;  // max author h-index when the source supplies it
    std::string source;
    double relevance = 0.0;  // in [0, 1]
    double composite_score = 0.0;

    bool operator==(const PaperRecord&) const = default;
};

// ---------------------------------------------------------------------------
// Drafts and assembled document
// ---------------------------------------------------------------------------

enum class VisualKind { figure, table, mindmap };

inline const char* to_string(VisualKind k) {
    switch (k) {
        case VisualKind::figure: return "figure";
        case VisualKind::table: return "table";
        case VisualKind::mindmap: return "mindmap";
    }
    return "figure";
}

inline std::optional<VisualKind> visual_kind_from_string(std::string_view s) {
    const std::string v = to_lower(trim(s));
    if (v == "figure") return VisualKind::figure;
    if (v == "table") return VisualKind::table;
    if (v == "mindmap") return VisualKind::mindmap;
    return std::nullopt;
}

struct VisualBlock {
    VisualKind kind = VisualKind::figure;
    std::string payload;
    std::string caption;

    bool operator==(const VisualBlock&) const = default;
};

struct SectionDraft {
    std::string node_ref;  // dotted path into the outline
    std::string title;     // carried so an assembled document renders standalone
    int depth = 1;
    std::string body;  // prose with local citation markers [k]
    std::vector<std::string> cited_ids;
    std::vector<VisualBlock> visuals;

    bool operator==(const SectionDraft&) const = default;
};

struct SurveyDocument {
    std::string title;
    std::string abstract;
    std::string introduction;
    std::string conclusion;
    std::vector<SectionDraft> sections;
    std::vector<PaperRecord> references;
    std::map<int, int> citation_map;  // body marker -> 1-based reference index
    std::optional<VisualBlock> mindmap;

    bool operator==(const SurveyDocument&) const = default;
};

// ---------------------------------------------------------------------------
// Reflection feedback
// ---------------------------------------------------------------------------

struct FeedbackItem {
    std::string target_path;
    std::string issue;
    std::string directive;
    std::vector<std::string> new_queries;

    bool operator==(const FeedbackItem&) const = default;
};

struct Feedback {
    std::vector<FeedbackItem> items;

    bool is_empty() const { return items.empty(); }
    bool operator==(const Feedback&) const = default;
};

// ---------------------------------------------------------------------------
// Run configuration (config-file keys use these exact field names)
// ---------------------------------------------------------------------------

struct RunConfig {
    // Retrieval endpoints and chat backend
    std::vector<std::string> search_url = {"https://serper.dev",
                                           "https://api.openalex.org/works"};
    std::string chat_endpoint = "http://localhost:8000/v1/chat/completions";
    std::string api_key_env = "SCISAGE_API_KEY";

    // Outline stage
    int outline_max_reflections = 2;
    int outline_max_sections = 6;
    int outline_min_depth = 2;
    std::vector<std::string> outline_generate_models = {"Qwen3-14B", "Qwen3-32B",
                                                        "Llama3-70B"};

    // Section stage
    std::string section_writer_model = "Qwen3-32B";
    bool do_section_reflection = true;
    std::string section_reflection_model = "Qwen3-32B";
    int section_reflection_max_turns = 2;

    // Document stage
    bool do_global_reflection = true;
    int global_reflection_max_turns = 2;
    int global_abstract_conclusion_max_turns = 1;

    // Query understanding (ablation switch)
    bool do_query_understanding = true;

    // Evaluation
    std::string judge_model = "Qwen3-32B";

    // Gateway behavior
    double rate_limit_per_sec = 4.0;
    int max_retries = 3;
    int backoff_initial_ms = 250;
    double backoff_factor = 2.0;
    double generation_temperature = 0.6;
    int max_output_tokens = 4096;

    // Re-ranking
    double w_relevance = 0.4;
    double w_recency = 0.2;
    double w_venue = 0.1;
    double w_author = 0.1;
    double w_citation = 0.2;
    int recency_window_years = 6;
    int citation_cap = 1000;
    double author_hindex_cap = 100.0;

    // Retrieval
    int limit_per_query = 10;
    int section_top_k = 10;
    bool do_llm_relevance = false;
    std::string search_fixture;      // recorded-response fixture file for offline runs
    std::string venue_prestige_file; // optional venue -> [0,1] lookup table

    // Composition / refinement
    std::string templates_dir;  // overrides the built-in template library
    std::string glossary;       // terminology surfaced to the style pass
    int max_fulltext_chars = 20000;
    int max_visuals_per_section = 2;

    // Orchestration
    int max_concurrency = 1;

    bool operator==(const RunConfig&) const = default;
};

// ---------------------------------------------------------------------------
// Outline validation
// ---------------------------------------------------------------------------

namespace detail {
inline void validate_nodes(const std::vector<OutlineNode>& nodes, int expected_depth,
                           const std::string& prefix, std::vector<std::string>& out) {
    std::vector<std::string> seen_titles;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const OutlineNode& n = nodes[i];
        const std::string path =
            prefix.empty() ? std::to_string(i + 1) : prefix + "." + std::to_string(i + 1);
        if (trim(n.title).empty())
            out.push_back("node " + path + ": empty title");
        if (n.depth != expected_depth)
            out.push_back("node " + path + ": depth " + std::to_string(n.depth) +
                          ", expected " + std::to_string(expected_depth));
        const std::string norm = to_lower(collapse_whitespace(n.title));
        if (std::find(seen_titles.begin(), seen_titles.end(), norm) != seen_titles.end())
            out.push_back("node " + path + ": duplicate sibling title '" + n.title + "'");
        seen_titles.push_back(norm);
        if (!n.is_content && !n.search_queries.empty())
            out.push_back("node " + path + ": non-content node carries " +
                          std::to_string(n.search_queries.size()) + " search queries");
        validate_nodes(n.children, expected_depth + 1, path, out);
    }
}
}  // namespace detail

/// Returns violation descriptions; empty means every outline invariant holds
/// under the given configuration.
inline std::vector<std::string> validate_outline(const Outline& outline,
                                                 const RunConfig& cfg) {
    std::vector<std::string> out;
    bool has_content = false;
    for_each_node(outline.sections, [&](const OutlineNode& n, const std::string&) {
        if (n.is_content) has_content = true;
    });
    if (!has_content) out.push_back("outline: no content section");
    if (static_cast<int>(outline.sections.size()) > cfg.outline_max_sections)
        out.push_back("outline: section count " + std::to_string(outline.sections.size()) +
                      " exceeds maximum " + std::to_string(cfg.outline_max_sections));
    if (!outline.sections.empty() && max_depth(outline.sections) < cfg.outline_min_depth)
        out.push_back("outline: tree depth " + std::to_string(max_depth(outline.sections)) +
                      " below minimum " + std::to_string(cfg.outline_min_depth));
    detail::validate_nodes(outline.sections, 1, "", out);
    return out;
}

}  // namespace scisage
