#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "scisage/gateway.hpp"
#include "scisage/organizer.hpp"
#include "scisage/prompts.hpp"
#include "scisage/types.hpp"

namespace scisage {

// ---------------------------------------------------------------------------
// LaTeX figure/table extraction
// ---------------------------------------------------------------------------

/// Returns the balanced-brace argument of the first \caption{...} command.
inline std::string extract_caption(const std::string& environment_text) {
    std::size_t cap = environment_text.find("\\caption");
    if (cap == std::string::npos) return {};
    std::size_t brace = environment_text.find('{', cap);
    if (brace == std::string::npos) return {};
    int depth = 0;
    for (std::size_t i = brace; i < environment_text.size(); ++i) {
        if (environment_text[i] == '{')
            ++depth;
        else if (environment_text[i] == '}') {
            --depth;
            if (depth == 0) return trim(environment_text.substr(brace + 1, i - brace - 1));
        }
    }
    return {};
}

/// Scans for balanced \begin{figure}/\begin{table} (and starred) environments
/// in document order.  Unbalanced environments are skipped with a warning and
/// never abort the scan.  Extracted spans never overlap.
inline std::vector<VisualBlock> extract_visuals(const std::string& latex_source,
                                                Logger* log = nullptr) {
    struct Env {
        const char* name;
        VisualKind kind;
    };
    static const Env kEnvs[] = {{"figure*", VisualKind::figure},
                                {"figure", VisualKind::figure},
                                {"table*", VisualKind::table},
                                {"table", VisualKind::table}};
    std::vector<VisualBlock> out;
    std::size_t pos = 0;
    while (pos < latex_source.size()) {
        std::size_t begin = latex_source.find("\\begin{", pos);
        if (begin == std::string::npos) break;
        const Env* env = nullptr;
        std::string open_tag;
        for (const auto& e : kEnvs) {
            std::string tag = std::string("\\begin{") + e.name + "}";
            if (latex_source.compare(begin, tag.size(), tag) == 0) {
                env = &e;
                open_tag = tag;
                break;
            }
        }
        if (!env) {
            pos = begin + 7;
            continue;
        }
        std::string close_tag = std::string("\\end{") + env->name + "}";
        std::size_t end = latex_source.find(close_tag, begin + open_tag.size());
        if (end == std::string::npos) {
            if (log)
                log->warn(std::string("unbalanced LaTeX environment '") + env->name +
                          "' skipped");
            pos = begin + open_tag.size();
            continue;
        }
        std::size_t span_end = end + close_tag.size();
        VisualBlock block;
        block.kind = env->kind;
        block.payload = latex_source.substr(begin, span_end - begin);
        block.caption = extract_caption(block.payload);
        out.push_back(std::move(block));
        pos = span_end;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Composer
// ---------------------------------------------------------------------------

class Composer {
public:
    Composer(Gateway& gateway, const RunConfig& cfg, Logger& log)
        : gateway_(gateway), cfg_(cfg), log_(log) {}

    /// Atomic content generation for one content node: citation-rich prose
    /// grounded in `papers`.  Body markers are renumbered so that marker k
    /// refers to cited_ids[k-1] (first-appearance order), making the draft
    /// self-contained.
    SectionDraft compose_section(const OutlineNode& node,
                                 const std::vector<PaperRecord>& papers,
                                 const std::string& path, const std::string& topic,
                                 bool allow_visuals = false,
                                 const std::vector<std::string>& extra_directives = {}) const {
        if (!node.is_content)
            throw PreconditionError("compose_section requires a content node: '" + node.title +
                                    "'");
        if (papers.empty())
            throw PreconditionError("compose_section requires at least one paper for '" +
                                    node.title + "'");
        std::string key_points = Organizer::render_bullets(node.key_points);
        for (const auto& d : extra_directives) key_points += "- (reviewer) " + d + "\n";
        std::string user = substitute(
            prompts::kComposeUser,
            {{"SECTION", node.title},
             {"TOPIC", topic},
             {"KEY_POINTS", key_points},
             {"PAPERS", render_paper_list(papers, cfg_.max_fulltext_chars)}});
        std::string body = ask_writer(prompts::kComposeSystem, user);
        if (has_out_of_range_marker(body, papers.size())) {
            log_.warn("section '" + node.title +
                      "' cited a paper number outside the list; re-asking once");
            body = ask_writer(prompts::kComposeSystem,
                              user + "\n\nYour previous draft cited a paper number that is "
                                     "not in the list. Use only numbers 1 through " +
                                  std::to_string(papers.size()) + ".");
            if (has_out_of_range_marker(body, papers.size())) {
                log_.warn("section '" + node.title +
                          "' still cites out-of-range numbers; stripping invalid markers");
                body = rewrite_citation_markers(body, [&](int k) -> std::optional<int> {
                    if (k >= 1 && k <= static_cast<int>(papers.size())) return k;
                    return std::nullopt;
                });
            }
        }

        SectionDraft draft;
        draft.node_ref = path;
        draft.title = node.title;
        draft.depth = node.depth;

        // First-appearance renumbering: local marker k -> cited_ids[k-1].
        std::vector<int> appearance;  // original marker values in first-appearance order
        std::map<int, int> remap;
        for (int original : marker_sequence(body)) {
            if (!remap.count(original)) {
                remap[original] = static_cast<int>(appearance.size()) + 1;
                appearance.push_back(original);
            }
        }
        draft.body = rewrite_citation_markers(
            body, [&](int k) -> std::optional<int> { return remap.at(k); });
        for (int original : appearance)
            draft.cited_ids.push_back(papers[static_cast<std::size_t>(original) - 1].id);

        if (allow_visuals && cfg_.max_visuals_per_section > 0) {
            for (const auto& paper : papers) {
                if (!paper.full_text) continue;
                for (auto& block : extract_visuals(*paper.full_text, &log_)) {
                    if (static_cast<int>(draft.visuals.size()) >=
                        cfg_.max_visuals_per_section)
                        break;
                    if (block.caption.empty()) block.caption = "From: " + paper.title;
                    draft.visuals.push_back(std::move(block));
                }
                if (static_cast<int>(draft.visuals.size()) >= cfg_.max_visuals_per_section)
                    break;
            }
        }
        return draft;
    }

    /// Integrates section drafts into the full survey document: outline
    /// ordering, one global deduplicated reference list with remapped
    /// markers, generated introduction/conclusion/abstract, and a mindmap.
    SurveyDocument assemble_document(const std::vector<SectionDraft>& drafts,
                                     const Outline& outline,
                                     const std::map<std::string, PaperRecord>& paper_pool,
                                     const std::string& topic) const {
        std::map<std::string, const SectionDraft*> by_ref;
        for (const auto& d : drafts) by_ref[d.node_ref] = &d;

        SurveyDocument doc;
        doc.title = outline.root_title;

        // Global reference numbering by first appearance across sections in
        // outline order.
        std::map<std::string, int> global_index;  // paper id -> 1-based index
        Outline ordered = outline;
        std::vector<std::string> missing;
        for_each_node(ordered, [&](OutlineNode& node, const std::string& path) {
            if (!node.is_content) return;
            auto it = by_ref.find(path);
            if (it == by_ref.end()) {
                missing.push_back("section " + path + " ('" + node.title + "')");
                return;
            }
            const SectionDraft& src = *it->second;
            SectionDraft out = src;
            out.title = node.title;
            out.depth = node.depth;
            out.body = rewrite_citation_markers(src.body, [&](int k) -> std::optional<int> {
                if (k < 1 || k > static_cast<int>(src.cited_ids.size())) {
                    log_.warn("section " + path + " carries dangling marker [" +
                              std::to_string(k) + "]; stripped");
                    return std::nullopt;
                }
                const std::string& id = src.cited_ids[static_cast<std::size_t>(k) - 1];
                auto found = global_index.find(id);
                if (found == global_index.end())
                    found = global_index.emplace(id, static_cast<int>(global_index.size()) + 1)
                                .first;
                return found->second;
            });
            doc.sections.push_back(std::move(out));
        });
        if (!missing.empty())
            throw AssemblyError("missing drafts for: " + join(missing, ", "));

        std::vector<const std::string*> ids_in_order(global_index.size());
        for (const auto& [id, idx] : global_index)
            ids_in_order[static_cast<std::size_t>(idx) - 1] = &id;
        for (const auto* id : ids_in_order) {
            auto rec = paper_pool.find(*id);
            if (rec == paper_pool.end())
                throw AssemblyError("no paper record for cited id '" + *id + "'");
            doc.references.push_back(rec->second);
        }
        // Post-assembly, marker values equal reference indices.
        for (int i = 1; i <= static_cast<int>(doc.references.size()); ++i)
            doc.citation_map[i] = i;

        // Rebuild cited_ids against the now-global numbering.
        for (auto& sec : doc.sections) {
            std::vector<std::string> cited;
            std::set<int> seen;
            for (int marker : marker_sequence(sec.body))
                if (seen.insert(marker).second)
                    cited.push_back(doc.references[static_cast<std::size_t>(marker) - 1].id);
            sec.cited_ids = std::move(cited);
        }

        std::string summaries = render_summaries(doc.sections);
        std::string outline_text = render_outline_text(ordered);
        doc.introduction = front_matter(
            substitute(prompts::kIntroductionUser, {{"TITLE", doc.title},
                                                    {"TOPIC", topic},
                                                    {"OUTLINE", outline_text},
                                                    {"SUMMARIES", summaries}}),
            "introduction");
        doc.conclusion = front_matter(
            substitute(prompts::kConclusionUser,
                       {{"TITLE", doc.title}, {"TOPIC", topic}, {"SUMMARIES", summaries}}),
            "conclusion");
        doc.abstract = front_matter(
            substitute(prompts::kAbstractUser,
                       {{"TITLE", doc.title}, {"TOPIC", topic}, {"SUMMARIES", summaries}}),
            "abstract");
        doc.mindmap = generate_mindmap(ordered);
        return doc;
    }

    /// Regenerates just the abstract and conclusion (used by the global
    /// abstract/conclusion reflection loop).
    void refresh_abstract_conclusion(SurveyDocument& doc, const std::string& topic,
                                     const std::vector<std::string>& directives) const {
        std::string summaries = render_summaries(doc.sections);
        if (!directives.empty())
            summaries += "\nReviewer directives:\n" + Organizer::render_bullets(directives);
        doc.conclusion = front_matter(
            substitute(prompts::kConclusionUser,
                       {{"TITLE", doc.title}, {"TOPIC", topic}, {"SUMMARIES", summaries}}),
            "conclusion");
        doc.abstract = front_matter(
            substitute(prompts::kAbstractUser,
                       {{"TITLE", doc.title}, {"TOPIC", topic}, {"SUMMARIES", summaries}}),
            "abstract");
    }

    /// One mindmap node per outline node (plus the root), one arrow line per
    /// parent-child edge.
    static VisualBlock generate_mindmap(const Outline& outline) {
        std::string payload = outline.root_title + "\n";
        append_mindmap_edges(payload, outline.root_title, outline.sections, 1);
        VisualBlock block;
        block.kind = VisualKind::mindmap;
        block.payload = payload;
        block.caption = "Mindmap of the survey structure";
        return block;
    }

    static std::string render_paper_list(const std::vector<PaperRecord>& papers,
                                         int max_fulltext_chars = 0) {
        std::string out;
        for (std::size_t i = 0; i < papers.size(); ++i) {
            const auto& p = papers[i];
            out += "[" + std::to_string(i + 1) + "] " + p.title;
            if (p.year > 0) out += " (" + std::to_string(p.year) + ")";
            out += "\n";
            if (!p.abstract.empty()) out += "    Abstract: " + p.abstract + "\n";
            if (p.full_text && max_fulltext_chars > 0) {
                std::string excerpt = *p.full_text;
                if (static_cast<int>(excerpt.size()) > max_fulltext_chars)
                    excerpt.resize(static_cast<std::size_t>(max_fulltext_chars));
                out += "    Full text excerpt: " + excerpt + "\n";
            }
        }
        return out;
    }

    static std::string render_summaries(const std::vector<SectionDraft>& sections) {
        std::string out;
        for (const auto& s : sections) {
            std::string snippet = collapse_whitespace(s.body);
            if (snippet.size() > 280) snippet = snippet.substr(0, 280) + "...";
            out += s.node_ref + " " + s.title + ": " + snippet + "\n";
        }
        return out;
    }

    static std::string render_outline_text(const Outline& outline) {
        std::string out = outline.root_title + "\n";
        Outline copy = outline;
        for_each_node(copy, [&](OutlineNode& node, const std::string& path) {
            out += std::string(static_cast<std::size_t>(node.depth) * 2, ' ') + path + " " +
                   node.title + "\n";
        });
        return out;
    }

private:
    std::string ask_writer(const std::string& system, const std::string& user) const {
        ChatRequest req;
        req.model = cfg_.section_writer_model;
        req.messages = {{"system", system}, {"user", user}};
        req.temperature = cfg_.generation_temperature;
        req.max_tokens = cfg_.max_output_tokens;
        return gateway_.complete(cfg_.chat_endpoint, req).content;
    }

    /// Front-matter prose must not carry citation markers; stray ones are
    /// stripped with a warning.
    std::string front_matter(const std::string& user, const std::string& what) const {
        std::string text = trim(ask_writer(prompts::kFrontMatterSystem, user));
        if (!find_citation_markers(text).empty()) {
            log_.warn(what + " contained citation markers; stripped");
            text = rewrite_citation_markers(text,
                                            [](int) -> std::optional<int> { return std::nullopt; });
        }
        return text;
    }

    static bool has_out_of_range_marker(const std::string& body, std::size_t paper_count) {
        for (int k : marker_sequence(body))
            if (k < 1 || k > static_cast<int>(paper_count)) return true;
        return false;
    }

    static void append_mindmap_edges(std::string& payload, const std::string& parent,
                                     const std::vector<OutlineNode>& children, int depth) {
        for (const auto& child : children) {
            payload += std::string(static_cast<std::size_t>(depth) * 2, ' ') + parent +
                       " -> " + child.title + "\n";
            append_mindmap_edges(payload, child.title, child.children, depth + 1);
        }
    }

    Gateway& gateway_;
    const RunConfig& cfg_;
    Logger& log_;
};

}  // namespace scisage
