#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scisage/composer.hpp"
#include "scisage/gateway.hpp"
#include "scisage/prompts.hpp"
#include "scisage/types.hpp"

namespace scisage {

// ---------------------------------------------------------------------------
// Personas and revision plans
// ---------------------------------------------------------------------------

struct Persona {
    std::string name;
    std::string system_prompt;
};

inline std::vector<Persona> default_persona_panel() {
    return {{"editor", prompts::kPersonaEditorSystem},
            {"professor", prompts::kPersonaProfessorSystem},
            {"reviewer", prompts::kPersonaReviewerSystem}};
}

struct RevisionPlan {
    std::vector<std::string> flagged_sections;                   // node paths
    std::map<std::string, std::vector<std::string>> new_key_points;  // path -> points
    std::map<std::string, std::vector<std::string>> new_queries;     // path -> queries

    bool empty() const { return flagged_sections.empty(); }
};

inline json to_json(const RevisionPlan& plan) {
    json kp = json::object();
    for (const auto& [path, points] : plan.new_key_points) kp[path] = points;
    json nq = json::object();
    for (const auto& [path, queries] : plan.new_queries) nq[path] = queries;
    return {{"kind", "revision_plan"},
            {"flagged_sections", plan.flagged_sections},
            {"new_key_points", kp},
            {"new_queries", nq}};
}

// ---------------------------------------------------------------------------
// Reflection log
// ---------------------------------------------------------------------------

struct ReflectionRecord {
    std::string artifact_hash;
    Feedback feedback;
    bool accepted = false;
};

struct ReflectionLog {
    std::string level;  // "outline" | "section <path>" | "document" | ...
    std::vector<ReflectionRecord> records;

    int reflection_count() const { return static_cast<int>(records.size()); }
};

inline json to_json(const ReflectionLog& log) {
    json records = json::array();
    for (const auto& r : log.records)
        records.push_back({{"artifact_hash", r.artifact_hash},
                           {"feedback", to_json(r.feedback)},
                           {"accepted", r.accepted}});
    return {{"kind", "reflection_log"}, {"level", log.level}, {"records", records}};
}

// ---------------------------------------------------------------------------
// run_loop: bounded generate-reflect-regenerate
// ---------------------------------------------------------------------------

/// Drives one reflection loop: produce the initial artifact, then reflect and
/// regenerate until feedback is empty or `max_trials` reflections have run.
///
/// `produce` is called with no feedback for the initial artifact and with the
/// latest feedback for each refinement; `snapshot` serializes an artifact for
/// hashing and error reporting.  A refinement failure aborts with the last
/// good artifact's snapshot inside the error.
template <typename Produce, typename Reflect, typename Snapshot>
auto run_loop(Produce&& produce, Reflect&& reflect, int max_trials, Snapshot&& snapshot,
              const std::string& level, Logger* log = nullptr)
    -> std::pair<decltype(produce(std::optional<Feedback>{})), ReflectionLog> {
    if (max_trials < 0) throw PreconditionError("max_trials must be >= 0");
    ReflectionLog rlog;
    rlog.level = level;
    auto artifact = produce(std::optional<Feedback>{});
    int reflections = 0;
    while (reflections < max_trials) {
        Feedback fb = reflect(artifact);
        ++reflections;
        ReflectionRecord record;
        record.artifact_hash = fnv1a64_hex(snapshot(artifact));
        record.feedback = fb;
        record.accepted = fb.is_empty();
        rlog.records.push_back(record);
        if (fb.is_empty()) break;
        if (log)
            log->info("reflection " + std::to_string(reflections) + "/" +
                      std::to_string(max_trials) + " at " + level + ": " +
                      std::to_string(fb.items.size()) + " item(s)");
        try {
            artifact = produce(std::optional<Feedback>{fb});
        } catch (const Error& e) {
            throw LoopAbortError(std::string("refinement failed at ") + level + ": " +
                                     e.what(),
                                 snapshot(artifact));
        }
    }
    return {std::move(artifact), std::move(rlog)};
}

// ---------------------------------------------------------------------------
// Reflector
// ---------------------------------------------------------------------------

class Reflector {
public:
    Reflector(Gateway& gateway, const RunConfig& cfg, Logger& log)
        : gateway_(gateway), cfg_(cfg), log_(log) {}

    Feedback reflect_outline(const Outline& outline, const RewrittenQuery& q_r,
                             const Intent& intent) const {
        std::string user =
            substitute(prompts::kReflectOutlineUser,
                       {{"QUERY", q_r.rewritten},
                        {"TOPIC", intent.topic},
                        {"OUTLINE", dump_artifact(to_json(outline))}});
        return judged_feedback(prompts::kReflectOutlineSystem, user, "outline reflection");
    }

    Feedback reflect_section(const SectionDraft& draft,
                             const std::vector<PaperRecord>& papers,
                             const Outline& outline) const {
        (void)outline;
        std::string user = substitute(
            prompts::kReflectSectionUser,
            {{"PATH", draft.node_ref},
             {"SECTION", draft.title},
             {"DRAFT", draft.body},
             {"PAPERS", Composer::render_paper_list(papers)}});
        return judged_feedback(prompts::kReflectSectionSystem, user,
                               "section " + draft.node_ref + " reflection");
    }

    Feedback reflect_abstract_conclusion(const SurveyDocument& doc,
                                         const std::string& topic) const {
        std::string user = substitute(
            prompts::kReflectAbstractConclusionUser,
            {{"TITLE", doc.title},
             {"TOPIC", topic},
             {"ABSTRACT", doc.abstract},
             {"CONCLUSION", doc.conclusion},
             {"SUMMARIES", Composer::render_summaries(doc.sections)}});
        return judged_feedback(prompts::kReflectAbstractConclusionSystem, user,
                               "abstract/conclusion reflection");
    }

    /// Document-level persona panel with strict-majority voting.
    RevisionPlan panel_review(const SurveyDocument& doc,
                              const std::vector<Persona>& personas) const {
        if (personas.empty()) throw PreconditionError("panel_review requires >= 1 persona");
        for (const auto& p : personas)
            if (trim(p.system_prompt).empty())
                throw PreconditionError("persona '" + p.name + "' has an empty prompt");

        std::vector<std::string> paths;
        for (const auto& sec : doc.sections) paths.push_back(sec.node_ref);
        std::string user = substitute(prompts::kPanelUser,
                                      {{"DOCUMENT", render_document(doc)},
                                       {"PATHS", join(paths, ", ")}});

        struct PersonaVote {
            // path -> (key points, queries) suggested by this persona
            std::map<std::string, std::pair<std::vector<std::string>,
                                            std::vector<std::string>>> flags;
        };
        std::vector<PersonaVote> votes(personas.size());
        parallel_for(personas.size(), cfg_.max_concurrency, [&](std::size_t i) {
            try {
                ChatRequest req;
                req.model = cfg_.section_reflection_model;
                req.messages = {{"system", personas[i].system_prompt}, {"user", user}};
                req.temperature = cfg_.generation_temperature;
                req.max_tokens = cfg_.max_output_tokens;
                ChatResponse resp = gateway_.complete(cfg_.chat_endpoint, req);
                json j = extract_json_object(resp.content);
                for (const auto& flag : jsonio::req_arr(j, "flags")) {
                    std::string path = trim(flag.value("path", ""));
                    if (std::find(paths.begin(), paths.end(), path) == paths.end()) {
                        log_.warn("persona '" + personas[i].name +
                                  "' flagged unknown section '" + path + "'; ignored");
                        continue;
                    }
                    auto& entry = votes[i].flags[path];
                    if (flag.contains("key_points"))
                        for (const auto& kp : flag.at("key_points"))
                            entry.first.push_back(kp.get<std::string>());
                    if (flag.contains("queries"))
                        for (const auto& q : flag.at("queries"))
                            entry.second.push_back(q.get<std::string>());
                }
            } catch (const Error& e) {
                log_.warn("persona '" + personas[i].name + "' abstained: " + e.what());
            }
        });

        RevisionPlan plan;
        for (const auto& path : paths) {
            std::size_t flag_votes = 0;
            for (const auto& v : votes)
                if (v.flags.count(path)) ++flag_votes;
            if (flag_votes * 2 <= personas.size()) continue;  // strict majority required
            plan.flagged_sections.push_back(path);
            auto& points = plan.new_key_points[path];
            auto& queries = plan.new_queries[path];
            for (const auto& v : votes) {
                auto it = v.flags.find(path);
                if (it == v.flags.end()) continue;
                append_unique(points, it->second.first);
                append_unique(queries, it->second.second);
            }
        }
        return plan;
    }

    static std::string render_document(const SurveyDocument& doc) {
        std::string out = doc.title + "\n\n";
        if (!doc.abstract.empty()) out += "Abstract: " + doc.abstract + "\n\n";
        if (!doc.introduction.empty()) out += "Introduction: " + doc.introduction + "\n\n";
        for (const auto& sec : doc.sections)
            out += "[" + sec.node_ref + "] " + sec.title + "\n" + sec.body + "\n\n";
        if (!doc.conclusion.empty()) out += "Conclusion: " + doc.conclusion + "\n";
        return out;
    }

    /// Parses judge output {"items":[...]}, returning nullopt when the reply
    /// carries no usable JSON.
    static std::optional<Feedback> parse_feedback_reply(const std::string& reply) {
        json j;
        try {
            j = extract_json_object(reply);
        } catch (const ParseError&) {
            return std::nullopt;
        }
        if (!j.contains("items") || !j.at("items").is_array()) return std::nullopt;
        Feedback fb;
        for (const auto& item : j.at("items")) {
            FeedbackItem out;
            out.target_path = trim(item.value("target_path", ""));
            if (out.target_path.empty()) out.target_path = "root";
            out.issue = trim(item.value("issue", ""));
            out.directive = trim(item.value("directive", ""));
            if (item.contains("new_queries"))
                for (const auto& q : item.at("new_queries")) {
                    std::string s = trim(q.get<std::string>());
                    if (!s.empty()) out.new_queries.push_back(s);
                }
            if (out.issue.empty() && out.directive.empty()) continue;
            fb.items.push_back(std::move(out));
        }
        return fb;
    }

private:
    /// One judge call with a single re-ask; judge failures fail open to
    /// acceptance (empty feedback) so reflection never aborts a run.
    Feedback judged_feedback(const std::string& system, const std::string& user,
                             const std::string& what) const {
        for (int attempt = 0; attempt < 2; ++attempt) {
            try {
                ChatRequest req;
                req.model = cfg_.section_reflection_model;
                req.messages = {{"system", system}, {"user", user}};
                req.temperature = cfg_.generation_temperature;
                req.max_tokens = cfg_.max_output_tokens;
                ChatResponse resp = gateway_.complete(cfg_.chat_endpoint, req);
                if (auto fb = parse_feedback_reply(resp.content)) return *fb;
                if (attempt == 0)
                    log_.warn(what + ": reply unparseable; re-asking once");
            } catch (const Error& e) {
                log_.warn(what + " failed open (accepted): " + e.what());
                return Feedback{};
            }
        }
        log_.warn(what + ": reply unparseable twice; failing open to acceptance");
        return Feedback{};
    }

    static void append_unique(std::vector<std::string>& into,
                              const std::vector<std::string>& add) {
        for (const auto& s : add) {
            std::string t = trim(s);
            if (t.empty()) continue;
            if (std::find(into.begin(), into.end(), t) == into.end()) into.push_back(t);
        }
    }

    Gateway& gateway_;
    const RunConfig& cfg_;
    Logger& log_;
};

}  // namespace scisage
