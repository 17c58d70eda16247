// Tests for the interpreter stage: language handling, intent classification
// with a single re-ask, query rewriting, and the pass-through mode.

#include <catch2/catch_amalgamated.hpp>

#include <memory>
#include <string>

#include "scisage/interpreter.hpp"

#include "generators.hpp"

using namespace scisage;

namespace {

struct Rig {
    std::shared_ptr<MockTransport> mock = std::make_shared<MockTransport>();
    GatewayOptions opts;
    RunConfig cfg;
    Logger log;
    std::unique_ptr<Gateway> gateway;

    Rig() {
        opts.max_retries = 0;
        opts.sleep_on_backoff = false;
        opts.rate_limit_per_sec = 100000.0;
        gateway = std::make_unique<Gateway>(mock, opts, &log);
    }

    Interpreter interpreter() { return Interpreter(*gateway, cfg, log); }

    void script_system(const std::string& system_needle, const std::string& reply,
                       bool sticky = true) {
        MockScriptEntry e;
        e.match_system_contains = system_needle;
        e.reply = reply;
        e.sticky = sticky;
        mock->push(e);
    }
};

constexpr const char* kTranslateNeedle = "multilingual academic assistant";
constexpr const char* kClassifyNeedle = "classifying user queries";
constexpr const char* kRewriteNeedle = "query rewriting expert";

} // namespace

TEST_CASE("parse_labeled_line finds labels case-insensitively and strips markup") {
    std::string text =
        "Preamble line\n"
        "**Language:** French\n"
        "- translation:  Large language models \n"
        "# Research Domain: computation and language\n"
        "**Query Style**: direct\n";
    CHECK(parse_labeled_line(text, "Language") == "French");
    CHECK(parse_labeled_line(text, "Query Style") == "direct");
    CHECK(parse_labeled_line(text, "Translation") == "Large language models");
    CHECK(parse_labeled_line(text, "research domain") == "computation and language");
    CHECK_FALSE(parse_labeled_line(text, "Research Topic").has_value());
    // A label with no colon does not match.
    CHECK_FALSE(parse_labeled_line("Language French", "Language").has_value());
}

TEST_CASE("english queries pass through translation untouched") {
    Rig rig;
    rig.script_system(kTranslateNeedle, "Language: English\nTranslation: ignored");
    auto out = rig.interpreter().detect_and_translate("  graph neural networks  ");
    CHECK(out == "graph neural networks");
}

TEST_CASE("non-english queries are replaced by the translation line") {
    Rig rig;
    rig.script_system(kTranslateNeedle,
                      "Language: German\nTranslation: survey of neural retrieval");
    auto out = rig.interpreter().detect_and_translate("Umfrage zu neuronalem Retrieval");
    CHECK(out == "survey of neural retrieval");
}

TEST_CASE("translation falls back to the whole reply, then to the original") {
    Rig rig;
    SECTION("reply without labels is used verbatim") {
        rig.script_system(kTranslateNeedle, "  survey of agent memory  ");
        CHECK(rig.interpreter().detect_and_translate("anything") ==
              "survey of agent memory");
    }
    SECTION("empty reply keeps the original and warns") {
        rig.script_system(kTranslateNeedle, "   ");
        CHECK(rig.interpreter().detect_and_translate("mi consulta") == "mi consulta");
        CHECK(rig.log.count_containing("translation reply was empty") == 1);
    }
    SECTION("empty query is rejected before any call") {
        CHECK_THROWS_AS(rig.interpreter().detect_and_translate("  "), InputError);
        CHECK(rig.mock->transcript().empty());
    }
}

TEST_CASE("intent classification parses the three labeled lines") {
    Rig rig;
    rig.script_system(kClassifyNeedle,
                      "Research Domain: computation and language\n"
                      "Query Type: survey\n"
                      "Research Topic: large language model agents");
    Intent intent = rig.interpreter().classify_intent("llm agents");
    CHECK(intent.domain == "computation and language");
    CHECK(intent.query_type == QueryType::survey);
    CHECK(intent.topic == "large language model agents");
}

TEST_CASE("unrecognized query types fall back to 'other' with a warning") {
    Rig rig;
    rig.script_system(kClassifyNeedle,
                      "Research Domain: robotics\n"
                      "Query Type: meta-analysis\n"
                      "Research Topic: soft grippers");
    Intent intent = rig.interpreter().classify_intent("soft grippers");
    CHECK(intent.query_type == QueryType::other);
    CHECK(rig.log.count_containing("unrecognized query type 'meta-analysis'") == 1);
}

TEST_CASE("unparseable classification is re-asked exactly once") {
    Rig rig;
    SECTION("second attempt succeeds") {
        rig.script_system(kClassifyNeedle, "no labels here at all", /*sticky=*/false);
        rig.script_system(kClassifyNeedle,
                          "Research Domain: physics\n"
                          "Query Type: survey\n"
                          "Research Topic: dark matter detectors",
                          /*sticky=*/false);
        Intent intent = rig.interpreter().classify_intent("dark matter");
        CHECK(intent.domain == "physics");
        CHECK(rig.mock->transcript().size() == 2);
        CHECK(rig.log.count_containing("re-asking once") == 1);
    }
    SECTION("two unparseable replies raise ClassificationError") {
        rig.script_system(kClassifyNeedle, "still no labels");
        CHECK_THROWS_AS(rig.interpreter().classify_intent("dark matter"),
                        ClassificationError);
        CHECK(rig.mock->transcript().size() == 2); // one re-ask, no third attempt
    }
}

TEST_CASE("rewrite is applied only when requested with a usable new query") {
    Rig rig;
    Intent intent;
    intent.domain = "computation and language";
    intent.query_type = QueryType::survey;
    intent.topic = "llm agents";

    SECTION("yes with a distinct rewritten query") {
        rig.script_system(kRewriteNeedle,
                          "Rewrite Needed: Yes\n"
                          "Rewritten Query: llm agent survey retrieval planning memory");
        auto rq = rig.interpreter().maybe_rewrite("llm agents", intent);
        CHECK(rq.was_rewritten);
        CHECK(rq.rewritten == "llm agent survey retrieval planning memory");
        CHECK(rq.original == "llm agents");
    }
    SECTION("no keeps the original") {
        rig.script_system(kRewriteNeedle, "Rewrite Needed: No");
        auto rq = rig.interpreter().maybe_rewrite("llm agents", intent);
        CHECK_FALSE(rq.was_rewritten);
        CHECK(rq.rewritten == "llm agents");
    }
    SECTION("yes but with an empty rewritten query keeps the original and warns") {
        rig.script_system(kRewriteNeedle,
                          "Rewrite Needed: yes\nRewritten Query:   ");
        auto rq = rig.interpreter().maybe_rewrite("llm agents", intent);
        CHECK_FALSE(rq.was_rewritten);
        CHECK(rq.rewritten == "llm agents");
        CHECK(rig.log.count_containing("no usable rewritten query") == 1);
    }
    SECTION("yes but the rewrite equals the original counts as no-op") {
        rig.script_system(kRewriteNeedle,
                          "Rewrite Needed: yes\nRewritten Query: llm agents");
        auto rq = rig.interpreter().maybe_rewrite("llm agents", intent);
        CHECK_FALSE(rq.was_rewritten);
    }
}

TEST_CASE("full interpret wires translation, classification and rewrite together") {
    Rig rig;
    rig.script_system(kTranslateNeedle, "Language: English");
    rig.script_system(kClassifyNeedle,
                      "Research Domain: computation and language\n"
                      "Query Type: survey\n"
                      "Research Topic: retrieval-augmented generation");
    rig.script_system(kRewriteNeedle,
                      "Rewrite Needed: Yes\n"
                      "Rewritten Query: retrieval augmented generation survey methods");
    auto [rq, intent] = rig.interpreter().interpret(" retrieval-augmented generation ");
    CHECK(rq.original == "retrieval-augmented generation");
    CHECK(rq.translated == "retrieval-augmented generation");
    CHECK(rq.rewritten == "retrieval augmented generation survey methods");
    CHECK(rq.was_rewritten);
    CHECK(intent.topic == "retrieval-augmented generation");
    CHECK(rig.mock->transcript().size() == 3);
}

TEST_CASE("disabled query understanding makes zero gateway calls") {
    Rig rig;
    rig.cfg.do_query_understanding = false;
    auto [rq, intent] = rig.interpreter().interpret("quantum error correction");
    CHECK(rig.mock->transcript().empty());
    CHECK(intent.domain == "general");
    CHECK(intent.query_type == QueryType::survey);
    CHECK(intent.topic == "quantum error correction");
    CHECK(rq.original == "quantum error correction");
    CHECK(rq.translated == rq.original);
    CHECK(rq.rewritten == rq.original);
    CHECK_FALSE(rq.was_rewritten);
}

TEST_CASE("interpret rejects blank queries up front") {
    Rig rig;
    CHECK_THROWS_AS(rig.interpreter().interpret("   "), InputError);
    CHECK(rig.mock->transcript().empty());
}

TEST_CASE("interpreter requests use the section writer model and configured endpoint") {
    Rig rig;
    rig.cfg.section_writer_model = "writer-x";
    rig.cfg.chat_endpoint = "mock://chat";
    rig.script_system(kTranslateNeedle, "Language: English");
    rig.interpreter().detect_and_translate("some query");
    REQUIRE(rig.mock->transcript().size() == 1);
    CHECK(rig.mock->transcript()[0].request.model == "writer-x");
    CHECK(rig.mock->transcript()[0].endpoint == "mock://chat");
    CHECK(rig.mock->transcript()[0].request.temperature == rig.cfg.generation_temperature);
}
