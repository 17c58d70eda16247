#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "scisage/gateway.hpp"
#include "scisage/prompts.hpp"
#include "scisage/types.hpp"

namespace scisage {

enum class ExportFormat { markdown, latex };

inline ExportFormat parse_format(const std::string& s) {
    std::string v = to_lower(trim(s));
    if (v == "markdown" || v == "md") return ExportFormat::markdown;
    if (v == "latex" || v == "tex") return ExportFormat::latex;
    throw InputError("unknown export format '" + s + "' (expected markdown or latex)");
}

/// "authors. title. venue, year." with graceful omission of missing parts.
inline std::string render_reference(const PaperRecord& rec) {
    std::string out;
    if (!rec.authors.empty()) out += join(rec.authors, ", ") + ". ";
    out += rec.title + ".";
    if (!rec.venue.empty() || rec.year > 0) {
        out += " ";
        if (!rec.venue.empty()) out += rec.venue;
        if (!rec.venue.empty() && rec.year > 0) out += ", ";
        if (rec.year > 0) out += std::to_string(rec.year);
        out += ".";
    }
    return out;
}

inline std::string latex_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "\\&"; break;
            case '%': out += "\\%"; break;
            case '#': out += "\\#"; break;
            case '_': out += "\\_"; break;
            case '$': out += "\\$"; break;
            default: out += c;
        }
    }
    return out;
}

class Refiner {
public:
    Refiner(Gateway& gateway, const RunConfig& cfg, Logger& log)
        : gateway_(gateway), cfg_(cfg), log_(log) {}

    /// Reorders and retitles document sections to match the outline's content
    /// nodes (by node path).  Orphan document sections are dropped with a
    /// log; an outline content node without a matching section raises.
    static SurveyDocument align_to_outline(const SurveyDocument& doc, const Outline& outline,
                                           Logger* log = nullptr) {
        std::map<std::string, const SectionDraft*> by_ref;
        for (const auto& sec : doc.sections) by_ref[sec.node_ref] = &sec;

        SurveyDocument out = doc;
        out.sections.clear();
        std::set<std::string> used;
        Outline ordered = outline;
        for_each_node(ordered, [&](OutlineNode& node, const std::string& path) {
            if (!node.is_content) return;
            auto it = by_ref.find(path);
            if (it == by_ref.end())
                throw AlignmentError("no document section for outline node " + path + " ('" +
                                     node.title + "')");
            SectionDraft sec = *it->second;
            sec.title = node.title;
            sec.depth = node.depth;
            used.insert(path);
            out.sections.push_back(std::move(sec));
        });
        for (const auto& sec : doc.sections)
            if (!used.count(sec.node_ref) && log)
                log->warn("orphan section " + sec.node_ref + " ('" + sec.title +
                          "') dropped during alignment");
        return out;
    }

    /// Deduplicates references by id and renumbers every citation marker into
    /// contiguous 1..M first-appearance order over the final section order.
    /// Uncited references are dropped; dangling markers are stripped.
    /// Idempotent.
    static SurveyDocument dedup_and_renumber(const SurveyDocument& doc, Logger* log = nullptr) {
        // Old marker value -> reference id (first entry wins for duplicate ids).
        std::map<std::string, const PaperRecord*> record_by_id;
        for (const auto& rec : doc.references)
            if (!record_by_id.count(rec.id)) record_by_id[rec.id] = &rec;

        SurveyDocument out = doc;
        std::vector<std::string> new_order;          // ids by first appearance
        std::map<std::string, int> new_index_by_id;  // id -> 1-based new index
        for (auto& sec : out.sections) {
            sec.body = rewrite_citation_markers(sec.body, [&](int k) -> std::optional<int> {
                if (k < 1 || k > static_cast<int>(doc.references.size())) {
                    if (log)
                        log->warn("dangling citation marker [" + std::to_string(k) +
                                  "] in section " + sec.node_ref + "; stripped");
                    return std::nullopt;
                }
                const std::string& id = doc.references[static_cast<std::size_t>(k) - 1].id;
                auto it = new_index_by_id.find(id);
                if (it == new_index_by_id.end()) {
                    it = new_index_by_id.emplace(id, static_cast<int>(new_order.size()) + 1)
                             .first;
                    new_order.push_back(id);
                }
                return it->second;
            });
            std::vector<std::string> cited;
            std::set<int> seen;
            for (int marker : marker_sequence(sec.body))
                if (seen.insert(marker).second)
                    cited.push_back(new_order[static_cast<std::size_t>(marker) - 1]);
            sec.cited_ids = std::move(cited);
        }
        if (log)
            for (const auto& rec : doc.references)
                if (!new_index_by_id.count(rec.id))
                    log->warn("uncited reference '" + rec.id + "' dropped");
        out.references.clear();
        for (const auto& id : new_order) out.references.push_back(*record_by_id.at(id));
        out.citation_map.clear();
        for (int i = 1; i <= static_cast<int>(out.references.size()); ++i)
            out.citation_map[i] = i;
        return out;
    }

    /// Gateway-driven per-section style pass.  A section is accepted only if
    /// its citation-marker sequence is unchanged; otherwise it reverts with a
    /// log.  The reference list is never touched.
    SurveyDocument standardize_style(const SurveyDocument& doc) const {
        SurveyDocument out = doc;
        parallel_for(out.sections.size(), cfg_.max_concurrency, [&](std::size_t i) {
            SectionDraft& sec = out.sections[i];
            std::string user = substitute(
                prompts::kStyleUser,
                {{"GLOSSARY", cfg_.glossary.empty() ? std::string("(none)") : cfg_.glossary},
                 {"BODY", sec.body}});
            std::string revised;
            try {
                ChatRequest req;
                req.model = cfg_.section_writer_model;
                req.messages = {{"system", prompts::kStyleSystem}, {"user", user}};
                req.temperature = cfg_.generation_temperature;
                req.max_tokens = cfg_.max_output_tokens;
                revised = gateway_.complete(cfg_.chat_endpoint, req).content;
            } catch (const Error& e) {
                log_.warn("style pass for section " + sec.node_ref +
                          " failed; section kept unchanged: " + e.what());
                return;
            }
            revised = trim(revised);
            if (revised.empty()) {
                log_.warn("style pass for section " + sec.node_ref +
                          " returned empty text; section kept unchanged");
                return;
            }
            if (marker_sequence(revised) != marker_sequence(sec.body)) {
                log_.warn("style pass for section " + sec.node_ref +
                          " altered citation markers; reverted");
                return;
            }
            sec.body = revised;
        });
        return out;
    }

    static std::string export_document(const SurveyDocument& doc, ExportFormat format) {
        switch (format) {
            case ExportFormat::markdown: return export_markdown(doc);
            case ExportFormat::latex: return export_latex(doc);
        }
        throw InputError("unknown export format");
    }

    static std::string export_markdown(const SurveyDocument& doc) {
        std::string out = "# " + doc.title + "\n";
        if (!doc.abstract.empty()) out += "\n## Abstract\n\n" + doc.abstract + "\n";
        if (!doc.introduction.empty()) out += "\n## Introduction\n\n" + doc.introduction + "\n";
        if (doc.mindmap) {
            out += "\n```mindmap\n" + doc.mindmap->payload;
            if (out.back() != '\n') out += "\n";
            out += "```\n";
            if (!doc.mindmap->caption.empty()) out += "*" + doc.mindmap->caption + "*\n";
        }
        for (const auto& sec : doc.sections) {
            out += "\n" + std::string(static_cast<std::size_t>(sec.depth) + 1, '#') + " " +
                   sec.title + "\n\n" + sec.body + "\n";
            for (const auto& v : sec.visuals) {
                out += "\n```latex\n" + v.payload;
                if (out.back() != '\n') out += "\n";
                out += "```\n";
                if (!v.caption.empty()) out += "*" + v.caption + "*\n";
            }
        }
        if (!doc.conclusion.empty()) out += "\n## Conclusion\n\n" + doc.conclusion + "\n";
        out += "\n## References\n\n";
        for (std::size_t i = 0; i < doc.references.size(); ++i)
            out += "[" + std::to_string(i + 1) + "] " + render_reference(doc.references[i]) +
                   "\n";
        return out;
    }

    static std::string export_latex(const SurveyDocument& doc) {
        std::string out;
        out += "\\documentclass{article}\n\\usepackage{graphicx}\n\\usepackage{booktabs}\n";
        out += "\\title{" + latex_escape(doc.title) + "}\n";
        out += "\\begin{document}\n\\maketitle\n";
        if (!doc.abstract.empty())
            out += "\\begin{abstract}\n" + doc.abstract + "\n\\end{abstract}\n";
        if (!doc.introduction.empty())
            out += "\\section{Introduction}\n" + doc.introduction + "\n";
        if (doc.mindmap) {
            out += "\\begin{verbatim}\n" + doc.mindmap->payload;
            if (out.back() != '\n') out += "\n";
            out += "\\end{verbatim}\n";
        }
        for (const auto& sec : doc.sections) {
            out += "\\" + heading_command(sec.depth) + "{" + latex_escape(sec.title) + "}\n" +
                   sec.body + "\n";
            for (const auto& v : sec.visuals) {
                out += v.payload;
                if (out.back() != '\n') out += "\n";
            }
        }
        if (!doc.conclusion.empty()) out += "\\section{Conclusion}\n" + doc.conclusion + "\n";
        out += "\\begin{thebibliography}{" + std::to_string(doc.references.size()) + "}\n";
        for (std::size_t i = 0; i < doc.references.size(); ++i)
            out += "\\bibitem{ref" + std::to_string(i + 1) + "} " +
                   latex_escape(render_reference(doc.references[i])) + "\n";
        out += "\\end{thebibliography}\n\\end{document}\n";
        return out;
    }

private:
    static std::string heading_command(int depth) {
        if (depth <= 1) return "section";
        if (depth == 2) return "subsection";
        if (depth == 3) return "subsubsection";
        return "paragraph";
    }

    Gateway& gateway_;
    const RunConfig& cfg_;
    Logger& log_;
};

}  // namespace scisage
