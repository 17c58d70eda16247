#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "scisage/gateway.hpp"
#include "scisage/prompts.hpp"
#include "scisage/serialization.hpp"
#include "scisage/types.hpp"

namespace scisage {

// ---------------------------------------------------------------------------
// Outline templates
// ---------------------------------------------------------------------------

struct TemplateEntry {
    std::string title;
    bool required = false;
    bool visuals = false;  // sections of this kind welcome figure/table extraction
};

struct OutlineTemplate {
    std::string id;
    std::set<QueryType> intent_types;  // empty set = fallback template
    std::vector<TemplateEntry> skeleton;
};

inline std::vector<OutlineTemplate> default_template_library() {
    std::vector<OutlineTemplate> lib;
    lib.push_back({"survey",
                   {QueryType::survey, QueryType::analysis, QueryType::position},
                   {{"Introduction", true, false},
                    {"Background and Foundations", true, false},
                    {"Taxonomy of Approaches", true, true},
                    {"Evaluation and Benchmarks", false, true},
                    {"Open Challenges and Future Directions", true, false},
                    {"Conclusion", true, false}}});
    lib.push_back({"method",
                   {QueryType::method, QueryType::theory},
                   {{"Introduction", true, false},
                    {"Preliminaries and Problem Definition", true, false},
                    {"Methodological Landscape", true, true},
                    {"Comparative Analysis", false, true},
                    {"Open Challenges and Future Directions", false, false},
                    {"Conclusion", true, false}}});
    lib.push_back({"application",
                   {QueryType::application, QueryType::benchmark, QueryType::dataset},
                   {{"Introduction", true, false},
                    {"Background", true, false},
                    {"Application Domains", true, true},
                    {"Systems and Evaluations", false, true},
                    {"Open Challenges and Future Directions", false, false},
                    {"Conclusion", true, false}}});
    lib.push_back({"default",
                   {},
                   {{"Introduction", true, false},
                    {"Background", false, false},
                    {"Main Themes", true, true},
                    {"Discussion", false, false},
                    {"Conclusion", true, false}}});
    return lib;
}

inline json to_json(const OutlineTemplate& t) {
    json types = json::array();
    for (QueryType qt : t.intent_types) types.push_back(to_string(qt));
    json skeleton = json::array();
    for (const auto& e : t.skeleton)
        skeleton.push_back(
            {{"title", e.title}, {"required", e.required}, {"visuals", e.visuals}});
    return {{"kind", "outline_template"},
            {"id", t.id},
            {"intent_types", types},
            {"skeleton", skeleton}};
}

inline OutlineTemplate outline_template_from_json(const json& j) {
    OutlineTemplate t;
    t.id = jsonio::req_str(j, "id");
    if (t.id.empty()) throw ParseError("field 'id' is empty");
    for (const auto& s : jsonio::req_arr(j, "intent_types")) {
        auto qt = query_type_from_string(s.get<std::string>());
        if (!qt) throw ParseError("field 'intent_types' has an unrecognized value");
        t.intent_types.insert(*qt);
    }
    for (const auto& e : jsonio::req_arr(j, "skeleton")) {
        TemplateEntry entry;
        entry.title = jsonio::req_str(e, "title");
        entry.required = e.value("required", false);
        entry.visuals = e.value("visuals", false);
        t.skeleton.push_back(entry);
    }
    if (t.skeleton.empty()) throw ParseError("field 'skeleton' is empty");
    return t;
}

/// Loads *.json templates from a directory in sorted filename order; falls
/// back to the built-in library when the directory is unset.
inline std::vector<OutlineTemplate> load_template_library(const std::string& dir) {
    if (dir.empty()) return default_template_library();
    if (!std::filesystem::is_directory(dir))
        throw ConfigError("templates_dir is not a directory: " + dir);
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<OutlineTemplate> lib;
    for (const auto& f : files) lib.push_back(outline_template_from_json(read_artifact(f)));
    if (lib.empty()) throw ConfigError("templates_dir contains no templates: " + dir);
    return lib;
}

inline std::string render_template_skeleton(const OutlineTemplate& t) {
    std::string out;
    for (std::size_t i = 0; i < t.skeleton.size(); ++i) {
        out += std::to_string(i + 1) + ". " + t.skeleton[i].title;
        if (t.skeleton[i].required) out += " (required)";
        out += "\n";
    }
    return out;
}

/// True when this node (by title match against the template skeleton) belongs
/// to a visuals-friendly section kind.
inline bool template_allows_visuals(const OutlineTemplate& t, const std::string& title) {
    for (const auto& e : t.skeleton)
        if (e.visuals && token_jaccard(e.title, title) >= 0.6) return true;
    return false;
}

// ---------------------------------------------------------------------------
// Candidate sets
// ---------------------------------------------------------------------------

struct CandidateSet {
    std::vector<Outline> candidates;
    std::vector<std::string> producing_models;
};

// ---------------------------------------------------------------------------
// Organizer
// ---------------------------------------------------------------------------

class Organizer {
public:
    Organizer(Gateway& gateway, const RunConfig& cfg, Logger& log)
        : gateway_(gateway), cfg_(cfg), log_(log) {}

    static const OutlineTemplate& select_template(const Intent& intent,
                                                  const std::vector<OutlineTemplate>& library) {
        if (library.empty()) throw ConfigError("outline template library is empty");
        for (const auto& t : library)
            if (t.intent_types.count(intent.query_type)) return t;
        for (const auto& t : library)
            if (t.intent_types.empty()) return t;
        return library.front();
    }

    CandidateSet generate_candidates(const RewrittenQuery& q_r, const Intent& intent,
                                     const OutlineTemplate& tmpl,
                                     const std::vector<std::string>& models) const {
        if (models.empty()) throw ConfigError("no outline generation models configured");
        std::string user = substitute(
            prompts::kOutlineUser,
            {{"TOPIC", intent.topic},
             {"DOMAIN", intent.domain},
             {"QUERY_TYPE", to_string(intent.query_type)},
             {"QUERY", q_r.rewritten},
             {"TEMPLATE", render_template_skeleton(tmpl)},
             {"MAX_SECTIONS", std::to_string(cfg_.outline_max_sections)},
             {"MIN_DEPTH", std::to_string(cfg_.outline_min_depth)}});
        std::vector<std::optional<Outline>> slots(models.size());
        std::vector<std::string> failures(models.size());
        parallel_for(models.size(), cfg_.max_concurrency, [&](std::size_t i) {
            try {
                ChatRequest req;
                req.model = models[i];
                req.messages = {{"system", prompts::kOutlineSystem}, {"user", user}};
                req.temperature = cfg_.generation_temperature;
                req.max_tokens = cfg_.max_output_tokens;
                ChatResponse resp = gateway_.complete(cfg_.chat_endpoint, req);
                Outline cand = parse_model_outline(resp.content, tmpl.id);
                auto violations = validate_outline(cand, cfg_);
                if (!violations.empty()) {
                    failures[i] = "invalid outline: " + join(violations, "; ");
                    return;
                }
                slots[i] = std::move(cand);
            } catch (const Error& e) {
                failures[i] = e.what();
            }
        });
        CandidateSet set;
        for (std::size_t i = 0; i < models.size(); ++i) {
            if (slots[i]) {
                set.candidates.push_back(std::move(*slots[i]));
                set.producing_models.push_back(models[i]);
            } else {
                log_.warn("outline candidate from model '" + models[i] +
                          "' dropped: " + failures[i]);
            }
        }
        if (set.candidates.empty())
            throw GenerationError("all outline candidate generations failed");
        return set;
    }

    Outline merge_candidates(const CandidateSet& set, const OutlineTemplate& tmpl) const {
        if (set.candidates.empty()) throw PreconditionError("no outline candidates to merge");
        Outline merged;
        merged.root_title = set.candidates.front().root_title;
        merged.template_id = tmpl.id;
        std::vector<std::vector<OutlineNode>> levels;
        for (const auto& c : set.candidates) levels.push_back(c.sections);
        std::vector<std::size_t> supports;
        merged.sections = merge_level(levels, &supports);
        // Over-long merges shed the least-supported sections (fewest
        // candidates mentioning them), latest-positioned first on ties, but
        // never the last content section.
        while (static_cast<int>(merged.sections.size()) > cfg_.outline_max_sections) {
            int content_count = 0;
            for (const auto& s : merged.sections)
                if (!is_non_content_title(s.title)) ++content_count;
            std::size_t victim = merged.sections.size();
            std::size_t victim_support = SIZE_MAX;
            for (std::size_t i = merged.sections.size(); i-- > 0;) {
                bool is_content = !is_non_content_title(merged.sections[i].title);
                if (is_content && content_count <= 1) continue;
                if (supports[i] < victim_support) {
                    victim_support = supports[i];
                    victim = i;
                }
            }
            if (victim >= merged.sections.size()) break;
            log_.warn("merged outline exceeded max sections; dropped section '" +
                      merged.sections[victim].title + "' (support " +
                      std::to_string(supports[victim]) + ")");
            merged.sections.erase(merged.sections.begin() +
                                  static_cast<std::ptrdiff_t>(victim));
            supports.erase(supports.begin() + static_cast<std::ptrdiff_t>(victim));
        }
        normalize_outline(merged, cfg_);
        return merged;
    }

    Outline attach_search_queries(const Outline& outline, const RewrittenQuery& q_r,
                                  const Intent& intent) const {
        Outline out = outline;
        struct Task {
            OutlineNode* node;
            std::string path;
        };
        std::vector<Task> tasks;
        for_each_node(out, [&](OutlineNode& node, const std::string& path) {
            if (node.is_content)
                tasks.push_back({&node, path});
            else
                node.search_queries.clear();
        });
        parallel_for(tasks.size(), cfg_.max_concurrency, [&](std::size_t i) {
            OutlineNode& node = *tasks[i].node;
            std::string user = substitute(prompts::kAttachQueriesUser,
                                          {{"TOPIC", intent.topic},
                                           {"SECTION", node.title},
                                           {"KEY_POINTS", render_bullets(node.key_points)}});
            std::vector<std::string> queries;
            try {
                ChatRequest req;
                req.model = cfg_.section_writer_model;
                req.messages = {{"system", prompts::kAttachQueriesSystem}, {"user", user}};
                req.temperature = cfg_.generation_temperature;
                req.max_tokens = cfg_.max_output_tokens;
                ChatResponse resp = gateway_.complete(cfg_.chat_endpoint, req);
                json j = extract_json_object(resp.content);
                for (const auto& q : jsonio::req_arr(j, "queries")) {
                    std::string s = trim(q.get<std::string>());
                    if (!s.empty()) queries.push_back(s);
                }
            } catch (const ParseError& e) {
                log_.warn("search-query reply for section '" + node.title +
                          "' unparseable: " + std::string(e.what()));
            }
            if (queries.empty()) {
                queries.push_back(node.title + " " + intent.topic);
                log_.warn("no usable search queries for section '" + node.title +
                          "'; using title+topic fallback");
            }
            node.search_queries = std::move(queries);
        });
        return out;
    }

    Outline apply_feedback(const Outline& outline, const Feedback& fb,
                           const OutlineTemplate& tmpl) const {
        if (fb.is_empty())
            throw PreconditionError("apply_feedback requires non-empty feedback");
        std::string user = substitute(
            prompts::kApplyFeedbackUser,
            {{"OUTLINE", dump_artifact(to_json(outline))},
             {"FEEDBACK", render_feedback(fb)},
             {"MAX_SECTIONS", std::to_string(cfg_.outline_max_sections)}});
        ChatRequest req;
        req.model = cfg_.section_writer_model;
        req.messages = {{"system", prompts::kApplyFeedbackSystem}, {"user", user}};
        req.temperature = cfg_.generation_temperature;
        req.max_tokens = cfg_.max_output_tokens;
        ChatResponse resp = gateway_.complete(cfg_.chat_endpoint, req);
        Outline revised;
        try {
            revised = parse_model_outline(resp.content, tmpl.id);
        } catch (const ParseError& e) {
            log_.warn("outline revision unparseable (" + std::string(e.what()) +
                      "); keeping previous outline");
            return outline;
        }
        revised.template_id = tmpl.id;
        truncate_to_max(revised);
        normalize_outline(revised, cfg_);
        auto violations = validate_outline(revised, cfg_);
        if (!violations.empty()) {
            log_.warn("outline revision invalid (" + join(violations, "; ") +
                      "); keeping previous outline");
            return outline;
        }
        return revised;
    }

    /// Parses the model's {"title", "sections": [...]} outline JSON.
    static Outline parse_model_outline(const std::string& reply, const std::string& template_id) {
        json j = extract_json_object(reply);
        Outline o;
        o.root_title = trim(j.value("title", ""));
        if (o.root_title.empty()) throw ParseError("outline reply missing field 'title'");
        o.template_id = template_id;
        for (const auto& s : jsonio::req_arr(j, "sections")) {
            OutlineNode node = parse_model_node(s);
            if (!node.title.empty()) o.sections.push_back(std::move(node));
        }
        if (o.sections.empty()) throw ParseError("outline reply has no sections");
        normalize_outline(o, std::nullopt);
        return o;
    }

    /// Re-derives depths and content flags, strips queries from non-content
    /// nodes, and (when a config is given) clips empty subtrees.
    static void normalize_outline(Outline& o, std::optional<RunConfig> /*unused*/) {
        assign_depths(o);
        for_each_node(o, [&](OutlineNode& node, const std::string&) {
            node.is_content = !is_non_content_title(node.title);
            if (!node.is_content) node.search_queries.clear();
        });
    }

    static std::string render_bullets(const std::vector<std::string>& items) {
        if (items.empty()) return "- (none given)\n";
        std::string out;
        for (const auto& i : items) out += "- " + i + "\n";
        return out;
    }

    static std::string render_feedback(const Feedback& fb) {
        std::string out;
        for (const auto& item : fb.items) {
            out += "- [" + item.target_path + "] " + item.issue + " => " + item.directive;
            if (!item.new_queries.empty())
                out += " (suggested searches: " + join(item.new_queries, "; ") + ")";
            out += "\n";
        }
        return out;
    }

private:
    static OutlineNode parse_model_node(const json& j) {
        OutlineNode n;
        n.title = trim(j.value("title", ""));
        if (j.contains("key_points"))
            for (const auto& p : j.at("key_points")) {
                std::string s = trim(p.get<std::string>());
                if (!s.empty()) n.key_points.push_back(s);
            }
        if (j.contains("children"))
            for (const auto& c : j.at("children")) {
                OutlineNode child = parse_model_node(c);
                if (!child.title.empty()) n.children.push_back(std::move(child));
            }
        return n;
    }

    // ---- merge heuristic ---------------------------------------------------

    struct Cluster {
        OutlineNode merged;                       // accumulating result
        std::vector<std::vector<OutlineNode>> child_levels;  // children per occurrence
        std::set<std::size_t> supporting_candidates;
        double position_sum = 0.0;
        int position_count = 0;
        std::size_t creation_index = 0;

        double mean_position() const {
            return position_count == 0 ? 0.0 : position_sum / position_count;
        }
    };

    /// Merges one sibling level across all candidates.  When `supports_out`
    /// is given, it receives the per-output-section count of distinct
    /// candidates that contributed to it.
    static std::vector<OutlineNode> merge_level(
        const std::vector<std::vector<OutlineNode>>& levels,
        std::vector<std::size_t>* supports_out = nullptr) {
        std::vector<Cluster> clusters;
        for (std::size_t ci = 0; ci < levels.size(); ++ci) {
            const auto& siblings = levels[ci];
            for (std::size_t si = 0; si < siblings.size(); ++si) {
                const OutlineNode& node = siblings[si];
                Cluster* home = nullptr;
                for (auto& cl : clusters) {
                    if (token_jaccard(cl.merged.title, node.title) >= 0.6 ||
                        normalize_title(cl.merged.title) == normalize_title(node.title)) {
                        home = &cl;
                        break;
                    }
                }
                if (!home) {
                    Cluster cl;
                    cl.merged.title = node.title;
                    cl.creation_index = clusters.size();
                    clusters.push_back(std::move(cl));
                    home = &clusters.back();
                }
                home->supporting_candidates.insert(ci);
                home->position_sum +=
                    static_cast<double>(si + 1) / static_cast<double>(siblings.size() + 1);
                home->position_count += 1;
                merge_string_union(home->merged.key_points, node.key_points);
                merge_string_union(home->merged.search_queries, node.search_queries);
                home->child_levels.push_back(node.children);
            }
        }
        std::vector<std::size_t> order(clusters.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            double pa = clusters[a].mean_position();
            double pb = clusters[b].mean_position();
            if (pa != pb) return pa < pb;
            return clusters[a].creation_index < clusters[b].creation_index;
        });
        std::vector<OutlineNode> out;
        if (supports_out) supports_out->clear();
        for (std::size_t idx : order) {
            Cluster& cl = clusters[idx];
            cl.merged.children = merge_level(cl.child_levels);
            if (supports_out) supports_out->push_back(cl.supporting_candidates.size());
            out.push_back(std::move(cl.merged));
        }
        return out;
    }

    static void merge_string_union(std::vector<std::string>& into,
                                   const std::vector<std::string>& add) {
        auto norm = [](const std::string& s) { return collapse_whitespace(to_lower(trim(s))); };
        for (const auto& s : add) {
            bool seen = false;
            for (const auto& have : into)
                if (norm(have) == norm(s)) {
                    seen = true;
                    break;
                }
            if (!seen) into.push_back(s);
        }
    }

    /// Cluster support for a top-level section = how many candidates mention
    /// it; recomputed here from titles so truncation can run on any outline.
    void truncate_to_max(Outline& o) const {
        while (static_cast<int>(o.sections.size()) > cfg_.outline_max_sections) {
            // Victim = least key-point support, preferring later sections;
            // never drop the last content section.
            int content_count = 0;
            for (const auto& s : o.sections)
                if (!is_non_content_title(s.title)) ++content_count;
            std::size_t victim = o.sections.size();
            std::size_t victim_weight = SIZE_MAX;
            for (std::size_t i = o.sections.size(); i-- > 0;) {
                const auto& s = o.sections[i];
                bool is_content = !is_non_content_title(s.title);
                if (is_content && content_count <= 1) continue;
                std::size_t weight = s.key_points.size() + 2 * count_nodes(s.children);
                if (weight < victim_weight) {
                    victim_weight = weight;
                    victim = i;
                }
            }
            if (victim >= o.sections.size()) break;
            log_.warn("outline exceeded max sections; dropped section '" +
                      o.sections[victim].title + "'");
            o.sections.erase(o.sections.begin() + static_cast<std::ptrdiff_t>(victim));
        }
    }

    Gateway& gateway_;
    const RunConfig& cfg_;
    Logger& log_;
};

}  // namespace scisage
