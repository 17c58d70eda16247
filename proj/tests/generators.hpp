#pragma once

// Shared deterministic generators and mock-script builders for the test
// suite.  Everything is seeded std::mt19937 so failures reproduce exactly.

#include <random>
#include <string>
#include <vector>

#include "scisage/scisage.hpp"

namespace gen {

using scisage::json;

inline std::string pick_word(std::mt19937& rng) {
    static const std::vector<std::string> kWords = {
        "neural",    "symbolic", "retrieval", "alignment", "scaling",  "inference",
        "benchmark", "protein",  "graph",     "quantum",   "robust",   "sparse",
        "causal",    "fusion",   "agents",    "memory",    "planning", "reasoning",
        "vision",    "language", "speech",    "molecules", "climate",  "markets"};
    std::uniform_int_distribution<std::size_t> d(0, kWords.size() - 1);
    return kWords[d(rng)];
}

inline int rand_int(std::mt19937& rng, int lo, int hi) {
    std::uniform_int_distribution<int> d(lo, hi);
    return d(rng);
}

inline double rand_unit(std::mt19937& rng) {
    std::uniform_real_distribution<double> d(0.0, 1.0);
    return d(rng);
}

inline std::string random_title(std::mt19937& rng, int min_words = 2, int max_words = 5) {
    int n = rand_int(rng, min_words, max_words);
    std::string out;
    for (int i = 0; i < n; ++i) {
        if (i) out += " ";
        out += pick_word(rng);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Random domain objects
// ---------------------------------------------------------------------------

inline scisage::PaperRecord random_paper(std::mt19937& rng, int serial) {
    scisage::PaperRecord rec;
    rec.title = random_title(rng, 3, 7) + " " + std::to_string(serial);
    rec.id = scisage::make_paper_id("", rec.title);
    rec.abstract = "We study " + random_title(rng, 4, 9) + ".";
    rec.year = rand_int(rng, 1995, 2026);
    rec.venue = rand_int(rng, 0, 1) ? "Journal of " + pick_word(rng) : "";
    rec.citation_count = rand_int(rng, 0, 3000);
    rec.author_signal = rand_unit(rng) * 150.0;
    rec.relevance = rand_unit(rng);
    rec.source = "gen";
    return rec;
}

inline scisage::OutlineNode random_node(std::mt19937& rng, int depth, int max_depth) {
    scisage::OutlineNode node;
    node.title = random_title(rng);
    node.depth = depth;
    node.is_content = true;
    for (int i = 0, n = rand_int(rng, 0, 3); i < n; ++i)
        node.key_points.push_back(random_title(rng, 2, 4));
    if (depth < max_depth && rand_int(rng, 0, 2) == 0)
        for (int i = 0, n = rand_int(rng, 1, 3); i < n; ++i)
            node.children.push_back(random_node(rng, depth + 1, max_depth));
    return node;
}

inline scisage::Outline random_outline(std::mt19937& rng, int max_sections = 6) {
    scisage::Outline o;
    o.root_title = "Survey on " + random_title(rng);
    int n = rand_int(rng, 1, max_sections);
    for (int i = 0; i < n; ++i) o.sections.push_back(random_node(rng, 1, 3));
    scisage::assign_depths(o);
    return o;
}

/// A document in post-assembly form: bracketed markers in section bodies
/// index the global reference list.  The list deliberately contains
/// duplicated ids and uncited entries, and bodies occasionally carry
/// dangling markers, to stress citation canonicalization.
inline scisage::SurveyDocument random_document(std::mt19937& rng) {
    scisage::SurveyDocument doc;
    doc.title = "Survey on " + random_title(rng);

    int base_refs = rand_int(rng, 1, 10);
    std::vector<scisage::PaperRecord> pool;
    for (int i = 0; i < base_refs; ++i) pool.push_back(random_paper(rng, i));
    // Append duplicates of random pool entries (same id, possibly at far
    // positions) so dedup has real work to do.
    int dups = rand_int(rng, 0, 5);
    for (int i = 0; i < dups; ++i)
        pool.push_back(pool[static_cast<std::size_t>(rand_int(rng, 0, base_refs - 1))]);
    std::shuffle(pool.begin(), pool.end(), rng);
    doc.references = pool;

    int n_sections = rand_int(rng, 1, 5);
    for (int s = 0; s < n_sections; ++s) {
        scisage::SectionDraft sec;
        sec.node_ref = std::to_string(s + 1);
        sec.title = random_title(rng);
        sec.depth = 1;
        std::string body = "Overview of " + random_title(rng) + ".";
        int n_markers = rand_int(rng, 0, 8);
        for (int m = 0; m < n_markers; ++m) {
            int k = rand_int(rng, 1, static_cast<int>(pool.size()) + 2);  // may dangle
            body += " Claim " + std::to_string(m) + " [" + std::to_string(k) + "].";
        }
        sec.body = body;
        doc.sections.push_back(std::move(sec));
    }
    return doc;
}

// ---------------------------------------------------------------------------
// Mock scripts
// ---------------------------------------------------------------------------

inline json sticky_system(const std::string& needle, const std::string& reply) {
    return {{"match", {{"system_contains", needle}}}, {"reply", reply}, {"sticky", true}};
}

inline json sticky_user(const std::string& needle, const std::string& reply) {
    return {{"match", {{"user_contains", needle}}}, {"reply", reply}, {"sticky", true}};
}

// MockScriptEntry forms of the same helpers, for pushing onto a transport
// directly instead of via a script file.
inline scisage::MockScriptEntry system_entry(const std::string& needle,
                                             const std::string& reply, bool sticky = true) {
    scisage::MockScriptEntry e;
    e.match_system_contains = needle;
    e.reply = reply;
    e.sticky = sticky;
    return e;
}

inline scisage::MockScriptEntry user_entry(const std::string& needle,
                                           const std::string& reply, bool sticky = true) {
    scisage::MockScriptEntry e;
    e.match_user_contains = needle;
    e.reply = reply;
    e.sticky = sticky;
    return e;
}

inline std::string demo_outline_reply() {
    json outline = {
        {"title", "Survey on the Topic"},
        {"sections",
         json::array(
             {{{"title", "Introduction"}, {"key_points", json::array({"scope"})}},
              {{"title", "Methods"},
               {"key_points", json::array({"taxonomy of approaches"})},
               {"children",
                json::array({{{"title", "Early approaches"},
                              {"key_points", json::array({"foundations"})}},
                             {{"title", "Recent advances"},
                              {"key_points", json::array({"scaling"})}}})}},
              {{"title", "Applications"}, {"key_points", json::array({"domains"})}},
              {{"title", "Conclusion"}, {"key_points", json::array()}}})}};
    return outline.dump();
}

/// One sticky script that satisfies every call of a full mock generate run
/// with empty reflections (the quiet path).
inline json quiet_generate_script() {
    json entries = json::array();
    entries.push_back(sticky_system("multilingual academic assistant", "Language: english"));
    entries.push_back(sticky_system(
        "classifying user queries",
        "Research Domain: computation and language\nQuery Type: survey\nResearch Topic: "
        "large language model agents"));
    entries.push_back(sticky_system("query rewriting expert", "Rewrite Needed: no"));
    entries.push_back(
        sticky_system("academic writing architect who designs", demo_outline_reply()));
    entries.push_back(sticky_system(
        "retrieval needs of one survey section",
        json({{"queries", json::array({"large language model agents survey",
                                       "agent evaluation methods"})}})
            .dump()));
    entries.push_back(
        sticky_system("critical reviewer of survey outlines", "{\"items\": []}"));
    entries.push_back(sticky_system(
        "citation-rich survey sections",
        "This section surveys the area in depth [1]. Recent studies refine the picture "
        "[2]. Together these lines of work map the field [1]."));
    entries.push_back(
        sticky_system("critical reviewer of survey sections", "{\"items\": []}"));
    entries.push_back(sticky_user("Write the Introduction",
                                  "This survey introduces the topic and previews its "
                                  "organization across the sections that follow."));
    entries.push_back(sticky_user("Write the Conclusion",
                                  "The survey synthesized the field and outlined "
                                  "promising directions for future work."));
    entries.push_back(sticky_user("Write the Abstract",
                                  "We survey the field, organize its main threads, and "
                                  "distill open challenges."));
    entries.push_back(
        sticky_user("Review the full survey manuscript", "{\"flags\": []}"));
    entries.push_back(sticky_system("critical reviewer of survey front and back matter",
                                    "{\"items\": []}"));
    entries.push_back(sticky_system(
        "academic copy editor",
        "This section surveys the area with rigor [1]. Recent studies sharpen the "
        "picture [2]. Jointly, these works chart the field [1]."));
    return {{"kind", "mock_script"}, {"entries", entries}};
}

/// Script whose reflection replies are always critical, for bound tests.
/// Outline feedback keeps demanding a revision; the apply-feedback reply
/// returns a valid revised outline; section/persona feedback flags
/// everything each round.
inline json critical_generate_script() {
    json script = quiet_generate_script();
    json& entries = script["entries"];
    for (auto& e : entries) {
        if (!e.contains("match") || !e["match"].contains("system_contains")) continue;
        std::string needle = e["match"]["system_contains"].get<std::string>();
        if (needle == "critical reviewer of survey outlines")
            e["reply"] = json({{"items",
                                json::array({{{"target_path", "2"},
                                              {"issue", "coverage is too thin"},
                                              {"directive", "broaden the methods coverage"}}})}})
                             .dump();
        if (needle == "critical reviewer of survey sections")
            e["reply"] = json({{"items",
                                json::array({{{"target_path", "root"},
                                              {"issue", "argument needs sharpening"},
                                              {"directive", "tighten the synthesis"}}})}})
                             .dump();
        if (needle == "critical reviewer of survey front and back matter")
            e["reply"] = json({{"items",
                                json::array({{{"target_path", "abstract"},
                                              {"issue", "abstract omits findings"},
                                              {"directive", "state the principal findings"}}})}})
                             .dump();
    }
    entries.push_back(sticky_system("revising a survey outline in response",
                                    demo_outline_reply()));
    // Personas flag section 3 every round -> strict majority revises it.
    json flags = json({{"flags", json::array({{{"path", "3"},
                                               {"issue", "shallow treatment"},
                                               {"key_points", json::array({"add depth"})},
                                               {"queries", json::array()}}})}})
                     .dump();
    for (auto& e : entries)
        if (e.contains("match") && e["match"].contains("user_contains") &&
            e["match"]["user_contains"] == "Review the full survey manuscript")
            e["reply"] = flags;
    return script;
}

/// Judge script for evaluator runs: every rubric gets a parseable score.
inline json judge_script() {
    json entries = json::array();
    entries.push_back(sticky_user("Academic Formality", "<SCORE>8</SCORE>"));
    entries.push_back(sticky_user("Original Insights", "<SCORE>7</SCORE>"));
    entries.push_back(sticky_user(
        "Structural Coherence",
        "- Structure: <8/10>\n- Coverage: <7/10>\n- Critical Analysis: <6/10>\n"
        "<SCORE>(8+7+6)/3=7.0</SCORE>"));
    entries.push_back(sticky_user("avoiding off-topic content", "<SCORE>4</SCORE>"));
    entries.push_back(sticky_user("internal coherence and logical flow", "<SCORE>5</SCORE>"));
    return {{"kind", "mock_script"}, {"entries", entries}};
}

}  // namespace gen
