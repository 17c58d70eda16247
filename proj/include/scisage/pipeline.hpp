#pragma once

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "scisage/collector.hpp"
#include "scisage/composer.hpp"
#include "scisage/config.hpp"
#include "scisage/gateway.hpp"
#include "scisage/interpreter.hpp"
#include "scisage/organizer.hpp"
#include "scisage/reflector.hpp"
#include "scisage/refiner.hpp"

namespace scisage {

inline int current_year() {
    std::time_t now = std::time(nullptr);
    std::tm utc{};
#if defined(_WIN32)
    gmtime_s(&utc, &now);
#else
    gmtime_r(&now, &utc);
#endif
    return utc.tm_year + 1900;
}

/// Everything a full generation run needs, wired once by the caller.
struct PipelineEnv {
    Gateway* gateway = nullptr;
    std::vector<std::shared_ptr<SourceClient>> sources;
    Logger* log = nullptr;
    int now_year = 0;  // 0 = use the wall-clock year
    bool export_markdown = true;
    bool export_latex = true;
};

struct PipelineResult {
    RewrittenQuery query;
    Intent intent;
    Outline outline;
    SurveyDocument document;
    ReflectionLog outline_log;
    std::map<std::string, ReflectionLog> section_logs;  // path -> log
    ReflectionLog document_log;
    ReflectionLog abstract_conclusion_log;
};

namespace pipedetail {

inline std::string section_file(const std::string& prefix, const std::string& path) {
    return prefix + "section_" + path + ".json";
}

inline void write_stage(const std::filesystem::path& out_dir, const std::string& rel,
                        const json& j) {
    if (out_dir.empty()) return;
    write_artifact(out_dir / rel, j);
}

}  // namespace pipedetail

/// End-to-end survey generation: interpret, outline (with reflection),
/// collect, compose (with reflection), assemble, document-level panel
/// reflection, abstract/conclusion reflection, and final refinement.
/// Stage artifacts land under `out_dir` when it is non-empty.
inline PipelineResult run_pipeline(const std::string& raw_query, const RunConfig& cfg,
                                   const PipelineEnv& env,
                                   const std::filesystem::path& out_dir = {}) {
    using pipedetail::section_file;
    using pipedetail::write_stage;
    if (!env.gateway || !env.log) throw PreconditionError("pipeline needs a gateway and a log");
    Gateway& gateway = *env.gateway;
    Logger& log = *env.log;
    int now_year = env.now_year > 0 ? env.now_year : current_year();

    PipelineResult result;

    // ---- Interpreter: Q -> (Q_R, I) ----------------------------------------
    Interpreter interpreter(gateway, cfg, log);
    auto [q_r, intent] = interpreter.interpret(raw_query);
    result.query = q_r;
    result.intent = intent;
    log.info("interpreted query; topic: " + intent.topic);
    write_stage(out_dir, "intent.json",
                {{"kind", "intent"}, {"intent", to_json(intent)}, {"query", to_json(q_r)}});

    // ---- Organizer: outline with bounded reflection -------------------------
    Organizer organizer(gateway, cfg, log);
    Reflector reflector(gateway, cfg, log);
    auto library = load_template_library(cfg.templates_dir);
    const OutlineTemplate& tmpl = Organizer::select_template(intent, library);
    log.info("selected outline template '" + tmpl.id + "'");

    Outline current_outline;
    auto [outline, outline_log] = run_loop(
        [&](const std::optional<Feedback>& fb) -> Outline {
            if (!fb) {
                CandidateSet cands = organizer.generate_candidates(
                    q_r, intent, tmpl, cfg.outline_generate_models);
                log.info("generated " + std::to_string(cands.candidates.size()) +
                         " outline candidate(s)");
                current_outline = organizer.merge_candidates(cands, tmpl);
            } else {
                current_outline = organizer.apply_feedback(current_outline, *fb, tmpl);
            }
            current_outline = organizer.attach_search_queries(current_outline, q_r, intent);
            auto violations = validate_outline(current_outline, cfg);
            if (!violations.empty())
                throw GenerationError("outline invalid: " + join(violations, "; "));
            return current_outline;
        },
        [&](const Outline& o) { return reflector.reflect_outline(o, q_r, intent); },
        cfg.outline_max_reflections,
        [](const Outline& o) { return dump_artifact(to_json(o)); }, "outline", &log);
    result.outline = outline;
    result.outline_log = outline_log;
    write_stage(out_dir, "outline.json", to_json(outline));
    write_stage(out_dir, "reflection/outline.json", to_json(outline_log));

    // ---- Collector + Composer per content node ------------------------------
    VenueTable venues;
    if (!cfg.venue_prestige_file.empty())
        venues = VenueTable::from_file(cfg.venue_prestige_file);
    Collector collector(env.sources, cfg, log,
                        rerank_context_from_config(cfg, now_year, &venues), &gateway);
    Composer composer(gateway, cfg, log);

    struct NodeTask {
        OutlineNode node;
        std::string path;
    };
    std::vector<NodeTask> tasks;
    {
        Outline scan = outline;
        for_each_node(scan, [&](OutlineNode& node, const std::string& path) {
            if (node.is_content) tasks.push_back({node, path});
        });
    }

    std::map<std::string, PaperRecord> paper_pool;
    std::map<std::string, std::vector<PaperRecord>> papers_by_path;
    std::map<std::string, SectionDraft> drafts_by_path;

    for (auto& task : tasks) {
        std::vector<PaperRecord> papers = collector.collect(task.node, intent);
        if (papers.empty())
            throw RetrievalError("no papers retrieved for section " + task.path + " ('" +
                                 task.node.title + "')");
        json records = json::array();
        for (const auto& r : papers) records.push_back(to_json(r));
        write_stage(out_dir, "retrieval/" + std::string("section_") + task.path + ".json",
                    {{"kind", "retrieval"}, {"node_ref", task.path}, {"records", records}});

        bool allow_visuals = template_allows_visuals(tmpl, task.node.title);
        OutlineNode node_state = task.node;
        std::vector<PaperRecord> papers_state = papers;

        auto [draft, sec_log] = run_loop(
            [&](const std::optional<Feedback>& fb) -> SectionDraft {
                std::vector<std::string> directives;
                if (fb) {
                    std::vector<std::string> new_queries;
                    for (const auto& item : fb->items) {
                        if (!item.directive.empty()) directives.push_back(item.directive);
                        for (const auto& q : item.new_queries) new_queries.push_back(q);
                    }
                    if (!new_queries.empty()) {
                        // Deficient evidence: extend the queries and re-collect.
                        for (const auto& q : new_queries)
                            node_state.search_queries.push_back(q);
                        std::vector<PaperRecord> refreshed =
                            collector.collect(node_state, intent);
                        for (const auto& r : refreshed) {
                            bool seen = false;
                            for (const auto& have : papers_state)
                                if (have.id == r.id) { seen = true; break; }
                            if (!seen) papers_state.push_back(r);
                        }
                        log.info("section " + task.path + ": evidence refreshed, now " +
                                 std::to_string(papers_state.size()) + " papers");
                    }
                }
                return composer.compose_section(node_state, papers_state, task.path,
                                                intent.topic, allow_visuals, directives);
            },
            [&](const SectionDraft& d) {
                if (!cfg.do_section_reflection) return Feedback{};
                return reflector.reflect_section(d, papers_state, outline);
            },
            cfg.do_section_reflection ? cfg.section_reflection_max_turns : 0,
            [](const SectionDraft& d) { return dump_artifact(to_json(d)); },
            "section " + task.path, &log);

        for (const auto& r : papers_state) paper_pool.emplace(r.id, r);
        papers_by_path[task.path] = std::move(papers_state);
        json draft_json = to_json(draft);
        draft_json["kind"] = "section_draft";
        write_stage(out_dir, section_file("drafts/", task.path), draft_json);
        write_stage(out_dir, section_file("reflection/", task.path), to_json(sec_log));
        result.section_logs[task.path] = std::move(sec_log);
        drafts_by_path[task.path] = std::move(draft);
    }

    // ---- Assembly + document-level panel reflection --------------------------
    auto assemble_now = [&]() {
        std::vector<SectionDraft> drafts;
        for (const auto& [path, d] : drafts_by_path) drafts.push_back(d);
        return composer.assemble_document(drafts, outline, paper_pool, intent.topic);
    };
    std::vector<Persona> personas = default_persona_panel();

    auto [assembled, document_log] = run_loop(
        [&](const std::optional<Feedback>& fb) -> SurveyDocument {
            if (fb) {
                // Structured revision plan: refresh evidence and re-compose
                // each flagged section, then re-assemble.
                for (const auto& item : fb->items) {
                    auto task_it =
                        std::find_if(tasks.begin(), tasks.end(),
                                     [&](const NodeTask& t) { return t.path == item.target_path; });
                    if (task_it == tasks.end()) {
                        log.warn("revision plan targets unknown section '" +
                                 item.target_path + "'; skipped");
                        continue;
                    }
                    OutlineNode node_state = task_it->node;
                    for (const auto& q : item.new_queries)
                        node_state.search_queries.push_back(q);
                    auto& papers_state = papers_by_path[item.target_path];
                    if (!item.new_queries.empty()) {
                        std::vector<PaperRecord> refreshed =
                            collector.collect(node_state, intent);
                        for (const auto& r : refreshed) {
                            bool seen = false;
                            for (const auto& have : papers_state)
                                if (have.id == r.id) { seen = true; break; }
                            if (!seen) {
                                paper_pool.emplace(r.id, r);
                                papers_state.push_back(r);
                            }
                        }
                    }
                    std::vector<std::string> directives;
                    if (!item.directive.empty()) directives.push_back(item.directive);
                    drafts_by_path[item.target_path] = composer.compose_section(
                        node_state, papers_state, item.target_path, intent.topic,
                        template_allows_visuals(tmpl, node_state.title), directives);
                }
            }
            return assemble_now();
        },
        [&](const SurveyDocument& doc) -> Feedback {
            if (!cfg.do_global_reflection) return Feedback{};
            RevisionPlan plan = reflector.panel_review(doc, personas);
            Feedback fb;
            for (const auto& path : plan.flagged_sections) {
                FeedbackItem item;
                item.target_path = path;
                item.issue = "flagged by panel majority vote";
                auto kp = plan.new_key_points.find(path);
                if (kp != plan.new_key_points.end()) item.directive = join(kp->second, "; ");
                auto nq = plan.new_queries.find(path);
                if (nq != plan.new_queries.end()) item.new_queries = nq->second;
                fb.items.push_back(std::move(item));
            }
            return fb;
        },
        cfg.do_global_reflection ? cfg.global_reflection_max_turns : 0,
        [](const SurveyDocument& d) { return dump_artifact(to_json(d)); }, "document", &log);
    result.document_log = document_log;
    write_stage(out_dir, "reflection/document.json", to_json(document_log));

    // ---- Abstract/conclusion reflection --------------------------------------
    SurveyDocument doc_state = assembled;
    auto [reflected_doc, ac_log] = run_loop(
        [&](const std::optional<Feedback>& fb) -> SurveyDocument {
            if (fb) {
                std::vector<std::string> directives;
                for (const auto& item : fb->items)
                    if (!item.directive.empty())
                        directives.push_back("[" + item.target_path + "] " + item.directive);
                composer.refresh_abstract_conclusion(doc_state, intent.topic, directives);
            }
            return doc_state;
        },
        [&](const SurveyDocument& doc) {
            if (!cfg.do_global_reflection) return Feedback{};
            return reflector.reflect_abstract_conclusion(doc, intent.topic);
        },
        cfg.do_global_reflection ? cfg.global_abstract_conclusion_max_turns : 0,
        [](const SurveyDocument& d) { return dump_artifact(to_json(d)); },
        "abstract_conclusion", &log);
    result.abstract_conclusion_log = ac_log;
    write_stage(out_dir, "reflection/abstract_conclusion.json", to_json(ac_log));
    write_stage(out_dir, "document_draft.json", to_json(reflected_doc));

    // ---- Refiner: align, canonicalize citations, style, export ----------------
    Refiner refiner(gateway, cfg, log);
    SurveyDocument final_doc = Refiner::align_to_outline(reflected_doc, outline, &log);
    final_doc = Refiner::dedup_and_renumber(final_doc, &log);
    final_doc = refiner.standardize_style(final_doc);
    result.document = final_doc;
    write_stage(out_dir, "document.json", to_json(final_doc));
    if (!out_dir.empty()) {
        if (env.export_markdown)
            write_text_file(out_dir / "survey.md",
                            Refiner::export_document(final_doc, ExportFormat::markdown));
        if (env.export_latex)
            write_text_file(out_dir / "survey.tex",
                            Refiner::export_document(final_doc, ExportFormat::latex));
    }
    log.info("pipeline complete: " + std::to_string(final_doc.sections.size()) +
             " sections, " + std::to_string(final_doc.references.size()) + " references");
    return result;
}

/// Builds retrieval sources for a run.  Mock runs replay a fixture when one
/// is configured and otherwise fall back to deterministic synthetic sources
/// named after the configured search hosts.
inline std::vector<std::shared_ptr<SourceClient>> make_mock_sources(const RunConfig& cfg) {
    std::vector<std::shared_ptr<SourceClient>> sources;
    if (!cfg.search_fixture.empty()) {
        json fixture = read_artifact(cfg.search_fixture);
        std::set<std::string> ids;
        for (const auto& r : jsonio::req_arr(fixture, "responses"))
            ids.insert(jsonio::req_str(r, "source"));
        for (const auto& id : ids)
            sources.push_back(std::make_shared<FixtureSource>(id, fixture));
        if (sources.empty())
            throw ConfigError("search fixture has no responses: " + cfg.search_fixture);
        return sources;
    }
    for (const auto& url : cfg.search_url) {
        std::string host = url;
        if (auto scheme = host.find("://"); scheme != std::string::npos)
            host = host.substr(scheme + 3);
        if (auto slash = host.find('/'); slash != std::string::npos)
            host = host.substr(0, slash);
        sources.push_back(std::make_shared<SyntheticSource>("synthetic:" + host));
    }
    if (sources.empty()) sources.push_back(std::make_shared<SyntheticSource>("synthetic"));
    return sources;
}

}  // namespace scisage
