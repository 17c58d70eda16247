#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scisage/gateway.hpp"
#include "scisage/prompts.hpp"
#include "scisage/serialization.hpp"
#include "scisage/types.hpp"

namespace scisage {

// ---------------------------------------------------------------------------
// Reference-accuracy metrics
// ---------------------------------------------------------------------------

struct ReferenceMetrics {
    int tp = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// TP = |A ∩ B|; precision = TP/|A|; recall = TP/|B|; F1 = harmonic mean
/// (0 when precision + recall = 0).  Empty sets contribute 0, not NaN.
inline ReferenceMetrics reference_metrics(const std::set<std::string>& generated,
                                          const std::set<std::string>& gold) {
    ReferenceMetrics m;
    for (const auto& id : generated)
        if (gold.count(id)) ++m.tp;
    m.precision = generated.empty() ? 0.0
                                    : static_cast<double>(m.tp) /
                                          static_cast<double>(generated.size());
    m.recall = gold.empty() ? 0.0
                            : static_cast<double>(m.tp) / static_cast<double>(gold.size());
    m.f1 = (m.precision + m.recall) == 0.0
               ? 0.0
               : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    return m;
}

inline json to_json(const ReferenceMetrics& m) {
    return {{"tp", m.tp}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

/// Reads a gold-reference list: one id per line, normalized like
/// PaperRecord.id (DOI-looking lines via the DOI normalizer, others via the
/// title normalizer).  Lines that normalize to nothing are malformed.
inline std::set<std::string> load_gold_refs(const std::string& text) {
    std::set<std::string> out;
    int lineno = 0;
    for (const auto& raw : split_lines(text)) {
        ++lineno;
        std::string line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        std::string id;
        if (icontains(line, "doi.org/") || istarts_with(line, "10."))
            id = normalize_doi(line);
        else
            id = normalize_title(line);
        if (id.empty())
            throw ParseError("gold reference line " + std::to_string(lineno) +
                             " normalizes to an empty id");
        out.insert(id);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Score-tag grammar
// ---------------------------------------------------------------------------

/// Parses the last <SCORE>...</SCORE> tag; the value is the number after the
/// final '=' inside the tag, or the whole tag content when there is no '='.
inline double parse_score_tag(const std::string& judge_output) {
    const std::string open = "<SCORE>";
    const std::string close = "</SCORE>";
    std::size_t start = judge_output.rfind(open);
    if (start == std::string::npos) throw ParseError("no SCORE tag in judge output");
    std::size_t end = judge_output.find(close, start + open.size());
    if (end == std::string::npos) throw ParseError("unterminated SCORE tag in judge output");
    std::string content = judge_output.substr(start + open.size(), end - start - open.size());
    std::size_t eq = content.rfind('=');
    std::string tail = trim(eq == std::string::npos ? content : content.substr(eq + 1));
    if (tail.empty()) throw ParseError("SCORE tag has an empty value");
    try {
        std::size_t used = 0;
        double v = std::stod(tail, &used);
        if (used != tail.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (...) {
        throw ParseError("SCORE tag value is not numeric: '" + tail + "'");
    }
}

inline std::string render_score_tag(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "<SCORE>%.2f</SCORE>", value);
    return buf;
}

// ---------------------------------------------------------------------------
// Rubric dimensions and rescaling
// ---------------------------------------------------------------------------

enum class Dimension { language, critical, relevance, section_structure, document_structure };

inline const char* to_string(Dimension d) {
    switch (d) {
        case Dimension::language: return "language";
        case Dimension::critical: return "critical";
        case Dimension::relevance: return "relevance";
        case Dimension::section_structure: return "section_structure";
        case Dimension::document_structure: return "document_structure";
    }
    return "language";
}

inline std::vector<Dimension> all_dimensions() {
    return {Dimension::language, Dimension::critical, Dimension::relevance,
            Dimension::section_structure, Dimension::document_structure};
}

/// 10-point rubrics map raw -> raw×10; five-level rubrics map raw -> raw×20.
inline double rescale(Dimension d, double raw) {
    double scaled = 0.0;
    switch (d) {
        case Dimension::language:
        case Dimension::critical:
        case Dimension::document_structure: scaled = raw * 10.0; break;
        case Dimension::relevance:
        case Dimension::section_structure: scaled = raw * 20.0; break;
    }
    return std::clamp(scaled, 0.0, 100.0);
}

inline bool raw_in_range(Dimension d, double raw) {
    switch (d) {
        case Dimension::language:
        case Dimension::critical:
        case Dimension::document_structure: return raw >= 0.0 && raw <= 10.0;
        case Dimension::relevance:
        case Dimension::section_structure: return raw >= 1.0 && raw <= 5.0;
    }
    return false;
}

struct RubricScore {
    double raw = 0.0;
    double scaled = 0.0;
    std::string rationale;
    Dimension dimension = Dimension::language;
};

inline json to_json(const RubricScore& s) {
    return {{"raw", s.raw},
            {"scaled", s.scaled},
            {"rationale", s.rationale},
            {"dimension", to_string(s.dimension)}};
}

/// Extracts the "- Structure: <X/10>" style sub-score for one label.
inline std::optional<double> parse_subscore_line(const std::string& text,
                                                 const std::string& label) {
    for (const auto& raw_line : split_lines(text)) {
        std::string line = trim(raw_line);
        while (!line.empty() && (line.front() == '-' || line.front() == '*'))
            line = trim(line.substr(1));
        if (!istarts_with(line, label)) continue;
        std::string rest = trim(line.substr(label.size()));
        if (rest.empty() || rest.front() != ':') continue;
        rest = trim(rest.substr(1));
        std::string digits;
        for (char c : rest) {
            if ((c >= '0' && c <= '9') || c == '.')
                digits += c;
            else if (!digits.empty())
                break;
        }
        if (digits.empty()) continue;
        try {
            return std::stod(digits);
        } catch (...) {
            continue;
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Evaluation report
// ---------------------------------------------------------------------------

struct EvalReport {
    std::string topic;
    // Aggregated per-dimension scores (mean over judged sections; the
    // document_structure dimension is judged once on the section tree).
    std::map<std::string, RubricScore> dimension_scores;
    // Per-section detail: path -> dimension name -> score.
    std::map<std::string, std::map<std::string, RubricScore>> section_scores;
    std::vector<std::string> failed_dimensions;  // no item survived judging
    int excluded_items = 0;                      // per-item judge failures
    ReferenceMetrics reference;
    bool reference_evaluated = false;
};

inline json to_json(const EvalReport& r) {
    json dims = json::object();
    for (const auto& [name, score] : r.dimension_scores)
        dims[name] = {{"raw", score.raw}, {"scaled", score.scaled}};
    json sections = json::object();
    for (const auto& [path, scores] : r.section_scores) {
        json per = json::object();
        for (const auto& [name, score] : scores) per[name] = to_json(score);
        sections[path] = per;
    }
    return {{"kind", "eval_report"},
            {"topic", r.topic},
            {"dimensions", dims},
            {"sections", sections},
            {"failed_dimensions", r.failed_dimensions},
            {"excluded_items", r.excluded_items},
            {"reference", to_json(r.reference)},
            {"reference_evaluated", r.reference_evaluated}};
}

// ---------------------------------------------------------------------------
// Evaluator
// ---------------------------------------------------------------------------

class Evaluator {
public:
    Evaluator(Gateway& gateway, const RunConfig& cfg, Logger& log)
        : gateway_(gateway), cfg_(cfg), log_(log) {}

    /// One rubric judgment.  `text_or_outline` is the section text for
    /// content dimensions or the rendered section tree for the
    /// document_structure dimension.  Throws ParseError after one re-ask.
    RubricScore score_dimension(Dimension dimension, const std::string& topic,
                                const std::string& text_or_outline) const {
        std::string user = build_prompt(dimension, topic, text_or_outline);
        std::string last_error;
        for (int attempt = 0; attempt < 2; ++attempt) {
            ChatRequest req;
            req.model = cfg_.judge_model;
            req.messages = {{"system", prompts::kJudgeSystem}, {"user", user}};
            req.temperature = 0.0;  // judging must be reproducible
            req.max_tokens = cfg_.max_output_tokens;
            ChatResponse resp = gateway_.complete(cfg_.chat_endpoint, req);
            try {
                return parse_reply(dimension, resp.content);
            } catch (const ParseError& e) {
                last_error = e.what();
                if (attempt == 0)
                    log_.warn(std::string("judge reply unparseable for ") +
                              to_string(dimension) + "; re-asking once");
            }
        }
        throw ParseError(std::string("judge output unusable for ") + to_string(dimension) +
                         ": " + last_error);
    }

    /// Full §-style automatic evaluation: per-section content judgments
    /// averaged to document level, one document-structure judgment, and
    /// reference-accuracy metrics against the gold bibliography.
    EvalReport evaluate_document(const SurveyDocument& doc,
                                 const std::set<std::string>& gold_refs,
                                 const std::string& topic) const {
        EvalReport report;
        report.topic = topic;

        const std::vector<Dimension> per_section = {Dimension::language, Dimension::critical,
                                                    Dimension::relevance,
                                                    Dimension::section_structure};
        struct Item {
            Dimension dim;
            const SectionDraft* section;
        };
        std::vector<Item> items;
        for (Dimension d : per_section)
            for (const auto& sec : doc.sections) items.push_back({d, &sec});
        std::vector<std::optional<RubricScore>> results(items.size());
        parallel_for(items.size(), cfg_.max_concurrency, [&](std::size_t i) {
            try {
                results[i] = score_dimension(items[i].dim, topic, items[i].section->body);
            } catch (const Error& e) {
                log_.warn(std::string("evaluation item failed (") + to_string(items[i].dim) +
                          ", section " + items[i].section->node_ref + "): " + e.what());
            }
        });

        for (std::size_t i = 0; i < items.size(); ++i) {
            if (!results[i]) {
                ++report.excluded_items;
                continue;
            }
            report.section_scores[items[i].section->node_ref]
                                 [to_string(items[i].dim)] = *results[i];
        }
        for (Dimension d : per_section) {
            double raw_sum = 0.0, scaled_sum = 0.0;
            int n = 0;
            for (std::size_t i = 0; i < items.size(); ++i) {
                if (items[i].dim != d || !results[i]) continue;
                raw_sum += results[i]->raw;
                scaled_sum += results[i]->scaled;
                ++n;
            }
            if (n == 0) {
                report.failed_dimensions.push_back(to_string(d));
                continue;
            }
            RubricScore agg;
            agg.dimension = d;
            agg.raw = raw_sum / n;
            agg.scaled = scaled_sum / n;
            report.dimension_scores[to_string(d)] = agg;
        }

        try {
            RubricScore doc_score = score_dimension(Dimension::document_structure, topic,
                                                    render_section_tree(doc));
            report.dimension_scores[to_string(Dimension::document_structure)] = doc_score;
        } catch (const Error& e) {
            ++report.excluded_items;
            report.failed_dimensions.push_back(to_string(Dimension::document_structure));
            log_.warn(std::string("document structure evaluation failed: ") + e.what());
        }

        if (gold_refs.empty()) {
            log_.warn("gold reference list is empty; reference metrics reported as 0");
            report.reference_evaluated = false;
        } else {
            std::set<std::string> generated;
            for (const auto& rec : doc.references) generated.insert(rec.id);
            report.reference = reference_metrics(generated, gold_refs);
            report.reference_evaluated = true;
        }
        return report;
    }

    static std::string render_section_tree(const SurveyDocument& doc) {
        std::string out = doc.title + "\n";
        for (const auto& sec : doc.sections)
            out += std::string(static_cast<std::size_t>(sec.depth) * 2, ' ') + sec.node_ref +
                   " " + sec.title + "\n";
        return out;
    }

    static std::string build_prompt(Dimension dimension, const std::string& topic,
                                    const std::string& text_or_outline) {
        switch (dimension) {
            case Dimension::language:
                return substitute(prompts::kEvalLanguage,
                                  {{"TOPIC", topic}, {"SECTION", text_or_outline}});
            case Dimension::critical:
                return substitute(prompts::kEvalCritical,
                                  {{"TOPIC", topic}, {"SECTION", text_or_outline}});
            case Dimension::relevance:
                return substitute(prompts::kEvalRelevance,
                                  {{"TOPIC", topic}, {"SECTION", text_or_outline}});
            case Dimension::section_structure:
                return substitute(prompts::kEvalSectionStructure,
                                  {{"TOPIC", topic}, {"SECTION", text_or_outline}});
            case Dimension::document_structure:
                return substitute(prompts::kEvalDocumentStructure,
                                  {{"TOPIC", topic}, {"OUTLINE", text_or_outline}});
        }
        throw PreconditionError("unknown evaluation dimension");
    }

    /// Turns a judge reply into a RubricScore.  The document_structure
    /// dimension prefers the full-precision mean of the three sub-score
    /// lines, falling back to the tag value.
    static RubricScore parse_reply(Dimension dimension, const std::string& reply) {
        RubricScore score;
        score.dimension = dimension;
        score.rationale = trim(reply);
        double raw = 0.0;
        if (dimension == Dimension::document_structure) {
            auto s = parse_subscore_line(reply, "Structure");
            auto c = parse_subscore_line(reply, "Coverage");
            auto a = parse_subscore_line(reply, "Critical Analysis");
            if (s && c && a)
                raw = (*s + *c + *a) / 3.0;
            else
                raw = parse_score_tag(reply);
        } else {
            raw = parse_score_tag(reply);
        }
        if (!raw_in_range(dimension, raw))
            throw ParseError(std::string("judge score out of range for ") +
                             to_string(dimension) + ": " + std::to_string(raw));
        score.raw = raw;
        score.scaled = rescale(dimension, raw);
        return score;
    }

private:
    Gateway& gateway_;
    const RunConfig& cfg_;
    Logger& log_;
};

}  // namespace scisage
