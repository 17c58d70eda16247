#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "scisage/types.hpp"

namespace scisage {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Field access that names the offending field on failure
// ---------------------------------------------------------------------------

namespace jsonio {

inline const json& require(const json& j, const char* field) {
    if (!j.is_object() || !j.contains(field))
        throw ParseError(std::string("missing field '") + field + "'");
    return j.at(field);
}

inline std::string req_str(const json& j, const char* field) {
    const json& v = require(j, field);
    if (!v.is_string()) throw ParseError(std::string("field '") + field + "' is not a string");
    return v.get<std::string>();
}

inline int req_int(const json& j, const char* field) {
    const json& v = require(j, field);
    if (!v.is_number_integer())
        throw ParseError(std::string("field '") + field + "' is not an integer");
    return v.get<int>();
}

inline double req_num(const json& j, const char* field) {
    const json& v = require(j, field);
    if (!v.is_number()) throw ParseError(std::string("field '") + field + "' is not a number");
    return v.get<double>();
}

inline bool req_bool(const json& j, const char* field) {
    const json& v = require(j, field);
    if (!v.is_boolean()) throw ParseError(std::string("field '") + field + "' is not a boolean");
    return v.get<bool>();
}

inline const json& req_arr(const json& j, const char* field) {
    const json& v = require(j, field);
    if (!v.is_array()) throw ParseError(std::string("field '") + field + "' is not an array");
    return v;
}

inline std::vector<std::string> req_str_list(const json& j, const char* field) {
    std::vector<std::string> out;
    for (const auto& e : req_arr(j, field)) {
        if (!e.is_string())
            throw ParseError(std::string("field '") + field + "' has a non-string entry");
        out.push_back(e.get<std::string>());
    }
    return out;
}

}  // namespace jsonio

// ---------------------------------------------------------------------------
// Intent / RewrittenQuery
// ---------------------------------------------------------------------------

inline json to_json(const Intent& v) {
    return {{"domain", v.domain},
            {"query_type", to_string(v.query_type)},
            {"topic", v.topic}};
}

inline Intent intent_from_json(const json& j) {
    Intent out;
    out.domain = jsonio::req_str(j, "domain");
    auto qt = query_type_from_string(jsonio::req_str(j, "query_type"));
    if (!qt) throw ParseError("field 'query_type' is not a recognized value");
    out.query_type = *qt;
    out.topic = jsonio::req_str(j, "topic");
    if (trim(out.topic).empty()) throw ParseError("field 'topic' is empty");
    return out;
}

inline json to_json(const RewrittenQuery& v) {
    return {{"original", v.original},
            {"translated", v.translated},
            {"rewritten", v.rewritten},
            {"was_rewritten", v.was_rewritten}};
}

inline RewrittenQuery rewritten_query_from_json(const json& j) {
    RewrittenQuery out;
    out.original = jsonio::req_str(j, "original");
    out.translated = jsonio::req_str(j, "translated");
    out.rewritten = jsonio::req_str(j, "rewritten");
    out.was_rewritten = jsonio::req_bool(j, "was_rewritten");
    if (trim(out.rewritten).empty()) throw ParseError("field 'rewritten' is empty");
    return out;
}

// ---------------------------------------------------------------------------
// Outline
// ---------------------------------------------------------------------------

inline json to_json(const OutlineNode& n) {
    json children = json::array();
    for (const auto& c : n.children) children.push_back(to_json(c));
    return {{"title", n.title},
            {"depth", n.depth},
            {"key_points", n.key_points},
            {"search_queries", n.search_queries},
            {"children", children},
            {"is_content", n.is_content}};
}

inline OutlineNode outline_node_from_json(const json& j) {
    OutlineNode n;
    n.title = jsonio::req_str(j, "title");
    n.depth = jsonio::req_int(j, "depth");
    n.key_points = jsonio::req_str_list(j, "key_points");
    n.search_queries = jsonio::req_str_list(j, "search_queries");
    n.is_content = jsonio::req_bool(j, "is_content");
    for (const auto& c : jsonio::req_arr(j, "children"))
        n.children.push_back(outline_node_from_json(c));
    return n;
}

inline json to_json(const Outline& o) {
    json sections = json::array();
    for (const auto& s : o.sections) sections.push_back(to_json(s));
    return {{"kind", "outline"},
            {"root_title", o.root_title},
            {"template_id", o.template_id},
            {"sections", sections}};
}

inline Outline outline_from_json(const json& j) {
    Outline o;
    o.root_title = jsonio::req_str(j, "root_title");
    o.template_id = jsonio::req_str(j, "template_id");
    for (const auto& s : jsonio::req_arr(j, "sections"))
        o.sections.push_back(outline_node_from_json(s));
    return o;
}

// ---------------------------------------------------------------------------
// PaperRecord
// ---------------------------------------------------------------------------

inline json to_json(const PaperRecord& r) {
    json j = {{"id", r.id},
              {"title", r.title},
              {"abstract", r.abstract},
              {"authors", r.authors},
              {"year", r.year},
              {"venue", r.venue},
              {"citation_count", r.citation_count},
              {"author_signal", r.author_signal},
              {"source", r.source},
              {"relevance", r.relevance},
              {"composite_score", r.composite_score}};
    if (r.full_text) j["full_text"] = *r.full_text;
    return j;
}

inline PaperRecord paper_record_from_json(const json& j) {
    PaperRecord r;
    r.id = jsonio::req_str(j, "id");
    if (r.id.empty()) throw ParseError("field 'id' is empty");
    r.title = jsonio::req_str(j, "title");
    r.abstract = jsonio::req_str(j, "abstract");
    r.authors = jsonio::req_str_list(j, "authors");
    r.year = jsonio::req_int(j, "year");
    r.venue = jsonio::req_str(j, "venue");
    r.citation_count = jsonio::req_int(j, "citation_count");
    r.author_signal = jsonio::req_num(j, "author_signal");
    r.source = jsonio::req_str(j, "source");
    r.relevance = jsonio::req_num(j, "relevance");
    if (r.relevance < 0.0 || r.relevance > 1.0)
        throw ParseError("field 'relevance' outside [0, 1]");
    r.composite_score = jsonio::req_num(j, "composite_score");
    if (j.contains("full_text")) r.full_text = jsonio::req_str(j, "full_text");
    return r;
}

// ---------------------------------------------------------------------------
// Drafts / document
// ---------------------------------------------------------------------------

inline json to_json(const VisualBlock& v) {
    return {{"kind", to_string(v.kind)}, {"payload", v.payload}, {"caption", v.caption}};
}

inline VisualBlock visual_block_from_json(const json& j) {
    VisualBlock v;
    auto kind = visual_kind_from_string(jsonio::req_str(j, "kind"));
    if (!kind) throw ParseError("field 'kind' is not a recognized visual kind");
    v.kind = *kind;
    v.payload = jsonio::req_str(j, "payload");
    if (v.payload.empty()) throw ParseError("field 'payload' is empty");
    v.caption = jsonio::req_str(j, "caption");
    return v;
}

inline json to_json(const SectionDraft& d) {
    json visuals = json::array();
    for (const auto& v : d.visuals) visuals.push_back(to_json(v));
    return {{"node_ref", d.node_ref}, {"title", d.title},   {"depth", d.depth},
            {"body", d.body},         {"cited_ids", d.cited_ids}, {"visuals", visuals}};
}

inline SectionDraft section_draft_from_json(const json& j) {
    SectionDraft d;
    d.node_ref = jsonio::req_str(j, "node_ref");
    d.title = jsonio::req_str(j, "title");
    d.depth = jsonio::req_int(j, "depth");
    d.body = jsonio::req_str(j, "body");
    d.cited_ids = jsonio::req_str_list(j, "cited_ids");
    for (const auto& v : jsonio::req_arr(j, "visuals"))
        d.visuals.push_back(visual_block_from_json(v));
    return d;
}

inline json to_json(const SurveyDocument& doc) {
    json sections = json::array();
    for (const auto& s : doc.sections) sections.push_back(to_json(s));
    json references = json::array();
    for (const auto& r : doc.references) references.push_back(to_json(r));
    json cmap = json::object();
    for (const auto& [marker, index] : doc.citation_map)
        cmap[std::to_string(marker)] = index;
    json j = {{"kind", "survey_document"},
              {"title", doc.title},
              {"abstract", doc.abstract},
              {"introduction", doc.introduction},
              {"conclusion", doc.conclusion},
              {"sections", sections},
              {"references", references},
              {"citation_map", cmap}};
    if (doc.mindmap) j["mindmap"] = to_json(*doc.mindmap);
    return j;
}

inline SurveyDocument survey_document_from_json(const json& j) {
    SurveyDocument doc;
    doc.title = jsonio::req_str(j, "title");
    doc.abstract = jsonio::req_str(j, "abstract");
    doc.introduction = jsonio::req_str(j, "introduction");
    doc.conclusion = jsonio::req_str(j, "conclusion");
    for (const auto& s : jsonio::req_arr(j, "sections"))
        doc.sections.push_back(section_draft_from_json(s));
    for (const auto& r : jsonio::req_arr(j, "references"))
        doc.references.push_back(paper_record_from_json(r));
    const json& cmap = jsonio::require(j, "citation_map");
    if (!cmap.is_object()) throw ParseError("field 'citation_map' is not an object");
    for (auto it = cmap.begin(); it != cmap.end(); ++it) {
        int marker = 0;
        try {
            marker = std::stoi(it.key());
        } catch (...) {
            throw ParseError("field 'citation_map' has a non-numeric key");
        }
        if (!it.value().is_number_integer())
            throw ParseError("field 'citation_map' has a non-integer value");
        doc.citation_map[marker] = it.value().get<int>();
    }
    if (j.contains("mindmap") && !j.at("mindmap").is_null())
        doc.mindmap = visual_block_from_json(j.at("mindmap"));
    return doc;
}

// ---------------------------------------------------------------------------
// Feedback
// ---------------------------------------------------------------------------

inline json to_json(const FeedbackItem& item) {
    return {{"target_path", item.target_path},
            {"issue", item.issue},
            {"directive", item.directive},
            {"new_queries", item.new_queries}};
}

inline FeedbackItem feedback_item_from_json(const json& j) {
    FeedbackItem item;
    item.target_path = jsonio::req_str(j, "target_path");
    item.issue = jsonio::req_str(j, "issue");
    item.directive = jsonio::req_str(j, "directive");
    item.new_queries = jsonio::req_str_list(j, "new_queries");
    return item;
}

inline json to_json(const Feedback& fb) {
    json items = json::array();
    for (const auto& item : fb.items) items.push_back(to_json(item));
    return {{"is_empty", fb.is_empty()}, {"items", items}};
}

inline Feedback feedback_from_json(const json& j) {
    Feedback fb;
    for (const auto& item : jsonio::req_arr(j, "items"))
        fb.items.push_back(feedback_item_from_json(item));
    if (jsonio::req_bool(j, "is_empty") != fb.is_empty())
        throw ParseError("field 'is_empty' disagrees with 'items'");
    return fb;
}

// ---------------------------------------------------------------------------
// Text <-> file helpers
// ---------------------------------------------------------------------------

inline json parse_json_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed json: ") + e.what());
    }
}

inline std::string dump_artifact(const json& j) { return j.dump(2) + "\n"; }

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write file: " + path.string());
    out << text;
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_artifact(const std::filesystem::path& path, const json& j) {
    write_text_file(path, dump_artifact(j));
}

inline json read_artifact(const std::filesystem::path& path) {
    return parse_json_text(read_text_file(path));
}

/// Pulls the first balanced JSON object out of model output, tolerating prose
/// and ``` fences around it.
inline json extract_json_object(const std::string& text) {
    std::size_t start = text.find('{');
    if (start == std::string::npos) throw ParseError("no json object found in text");
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < text.size(); ++i) {
        char c = text[i];
        if (in_string) {
            if (escaped)
                escaped = false;
            else if (c == '\\')
                escaped = true;
            else if (c == '"')
                in_string = false;
            continue;
        }
        if (c == '"')
            in_string = true;
        else if (c == '{')
            ++depth;
        else if (c == '}') {
            --depth;
            if (depth == 0) return parse_json_text(text.substr(start, i - start + 1));
        }
    }
    throw ParseError("unbalanced json object in text");
}

}  // namespace scisage
