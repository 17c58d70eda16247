// Tests for the collector stage: venue lookup, signal normalization, the
// composite score, reranking, source clients and section retrieval.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "scisage/collector.hpp"

#include "generators.hpp"

using namespace scisage;
using Catch::Approx;

namespace {

PaperRecord record(const std::string& id, double relevance = 0.0, int year = 0,
                   int citations = 0) {
    PaperRecord r;
    r.id = id;
    r.title = "Title " + id;
    r.relevance = relevance;
    r.year = year;
    r.citation_count = citations;
    r.source = "test";
    return r;
}

RerankContext unit_context(int now_year = 2026) {
    RerankContext ctx;
    ctx.weights = {1.0, 1.0, 1.0, 1.0, 1.0};
    ctx.now_year = now_year;
    return ctx;
}

OutlineNode content_node(std::vector<std::string> queries) {
    OutlineNode n;
    n.title = "Agent Memory";
    n.is_content = true;
    n.depth = 1;
    n.search_queries = std::move(queries);
    return n;
}

Intent generic_intent() {
    Intent i;
    i.domain = "computation and language";
    i.query_type = QueryType::survey;
    i.topic = "llm agents";
    return i;
}

json fixture_with(json responses) {
    return {{"kind", "search_fixture"}, {"responses", std::move(responses)}};
}

} // namespace

TEST_CASE("venue table normalizes keys and defaults unknown venues to 0.5") {
    VenueTable t;
    t.set("  NeurIPS ", 0.9);
    CHECK(t.lookup("neurips") == 0.9);
    CHECK(t.lookup("NEURIPS  ") == 0.9);
    CHECK(t.lookup("unheard-of workshop") == 0.5);
    CHECK(t.lookup("") == 0.5);
}

TEST_CASE("venue table loads from a file and rejects out-of-range scores") {
    namespace fs = std::filesystem;
    fs::path path = fs::temp_directory_path() / "scisage_venues_test.json";
    {
        std::ofstream out(path);
        out << json({{"kind", "venue_table"},
                     {"venues", {{"ACL", 1.0}, {"Workshop X", 0.2}}}})
                   .dump();
    }
    VenueTable t = VenueTable::from_file(path.string());
    CHECK(t.lookup("acl") == 1.0);
    CHECK(t.lookup("workshop x") == 0.2);
    CHECK(t.lookup("other") == 0.5);

    {
        std::ofstream out(path);
        out << json({{"ACL", 1.5}}).dump(); // bare map form, bad score
    }
    CHECK_THROWS_AS(VenueTable::from_file(path.string()), ParseError);
    fs::remove(path);
}

TEST_CASE("recency normalization is linear inside the window and clamped outside") {
    CHECK(recency_norm(2026, 2026, 6) == 1.0);
    CHECK(recency_norm(2023, 2026, 6) == Approx(0.5));
    CHECK(recency_norm(2020, 2026, 6) == 0.0);
    CHECK(recency_norm(2010, 2026, 6) == 0.0);  // older than the window
    CHECK(recency_norm(2030, 2026, 6) == 1.0);  // future-dated clamps high
    CHECK(recency_norm(0, 2026, 6) == 0.0);     // unknown year
    CHECK(recency_norm(-5, 2026, 6) == 0.0);
}

TEST_CASE("citation normalization is log-scaled and capped") {
    CHECK(citation_norm(0, 1000) == 0.0);
    CHECK(citation_norm(-3, 1000) == 0.0);
    CHECK(citation_norm(1000, 1000) == Approx(1.0));
    CHECK(citation_norm(50000, 1000) == 1.0); // capped
    CHECK(citation_norm(10, 1000) ==
          Approx(std::log1p(10.0) / std::log1p(1000.0)));
    CHECK(citation_norm(10, 1000) < citation_norm(100, 1000));
}

TEST_CASE("author normalization is linear and capped") {
    CHECK(author_norm(0.0, 100.0) == 0.0);
    CHECK(author_norm(-1.0, 100.0) == 0.0);
    CHECK(author_norm(50.0, 100.0) == Approx(0.5));
    CHECK(author_norm(100.0, 100.0) == 1.0);
    CHECK(author_norm(250.0, 100.0) == 1.0);
}

TEST_CASE("composite score with unit weights sums the five normalized signals") {
    // relevance 1 + recency 1 + venue 0.5 (unknown) + author 0 + citations 1 = 3.5
    RerankContext ctx = unit_context();
    PaperRecord rec = record("p1", 1.0, ctx.now_year, ctx.citation_cap);
    CHECK(composite_score(rec, ctx) == Approx(3.5));
}

TEST_CASE("composite score respects weights, venue table and clamping") {
    VenueTable venues;
    venues.set("ACL", 1.0);
    RerankContext ctx;
    ctx.weights = {0.4, 0.2, 0.1, 0.1, 0.2};
    ctx.now_year = 2026;
    ctx.venues = &venues;

    PaperRecord rec = record("p1", 0.5, 2023, 10);
    rec.venue = "ACL";
    rec.author_signal = 50.0;
    double expected = 0.4 * 0.5 + 0.2 * 0.5 + 0.1 * 1.0 + 0.1 * 0.5 +
                      0.2 * (std::log1p(10.0) / std::log1p(1000.0));
    CHECK(composite_score(rec, ctx) == Approx(expected));

    // Out-of-range relevance is clamped into [0, 1].
    PaperRecord wild = record("p2", 7.0, 2026, 0);
    RerankContext only_rel = unit_context();
    only_rel.weights = {1.0, 0.0, 0.0, 0.0, 0.0};
    CHECK(composite_score(wild, only_rel) == 1.0);
    wild.relevance = -2.0;
    CHECK(composite_score(wild, only_rel) == 0.0);
}

TEST_CASE("rerank deduplicates by id keeping the higher-scoring duplicate") {
    RerankContext ctx = unit_context();
    ctx.weights = {1.0, 0.0, 0.0, 0.0, 0.0};
    std::vector<PaperRecord> in = {record("a", 0.2), record("a", 0.9), record("b", 0.5)};
    auto out = rerank(in, ctx, 10);
    REQUIRE(out.size() == 2);
    CHECK(out[0].id == "a");
    CHECK(out[0].relevance == 0.9);
    CHECK(out[0].composite_score == Approx(0.9));
    CHECK(out[1].id == "b");
}

TEST_CASE("rerank breaks score ties by year descending, then id ascending") {
    RerankContext ctx = unit_context();
    ctx.weights = {1.0, 0.0, 0.0, 0.0, 0.0}; // equal relevance => equal score
    std::vector<PaperRecord> in = {record("delta", 0.5, 2020), record("alpha", 0.5, 2024),
                                   record("charlie", 0.5, 2024), record("bravo", 0.5, 2022)};
    auto out = rerank(in, ctx, 10);
    REQUIRE(out.size() == 4);
    CHECK(out[0].id == "alpha");   // 2024, id ties broken ascending
    CHECK(out[1].id == "charlie"); // 2024
    CHECK(out[2].id == "bravo");   // 2022
    CHECK(out[3].id == "delta");   // 2020
}

TEST_CASE("rerank keeps only the top k") {
    RerankContext ctx = unit_context();
    ctx.weights = {1.0, 0.0, 0.0, 0.0, 0.0};
    std::vector<PaperRecord> in;
    for (int i = 0; i < 10; ++i)
        in.push_back(record("p" + std::to_string(i), 0.1 * i));
    auto out = rerank(in, ctx, 3);
    REQUIRE(out.size() == 3);
    CHECK(out[0].id == "p9");
    CHECK(out[1].id == "p8");
    CHECK(out[2].id == "p7");

    CHECK(rerank(in, ctx, 0).empty());
    CHECK(rerank(in, ctx, -4).empty());
    CHECK(rerank(in, ctx, 99).size() == 10);
}

TEST_CASE("relevance_from_rank spaces scores linearly from 1.0 down to 1/n") {
    CHECK(relevance_from_rank(0, 4) == 1.0);
    CHECK(relevance_from_rank(1, 4) == Approx(0.75));
    CHECK(relevance_from_rank(3, 4) == Approx(0.25));
    CHECK(relevance_from_rank(0, 0) == 0.0);
}

TEST_CASE("synthetic source is deterministic and honors limits") {
    SyntheticSource src("synthetic:test", 3);
    auto a = src.search("agent memory", 10);
    auto b = src.search("agent memory", 10);
    REQUIRE(a.size() == 3);
    CHECK(a == b); // same query, same records

    auto limited = src.search("agent memory", 2);
    CHECK(limited.size() == 2);

    auto other = src.search("different topic", 10);
    CHECK(other[0].id != a[0].id); // query shapes identity

    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK_FALSE(a[i].id.empty());
        CHECK(a[i].source == "synthetic:test");
        CHECK(a[i].relevance == Approx(relevance_from_rank(i, a.size())));
        CHECK(a[i].year >= 2019);
        CHECK(a[i].year <= 2024);
    }
}

TEST_CASE("synthetic source affinity falls back to 1.0 for unknown domains") {
    SyntheticSource src("s", 3, {{"physics", 0.2}});
    CHECK(src.domain_affinity("Physics ") == 0.2);
    CHECK(src.domain_affinity("biology") == 1.0);
}

TEST_CASE("fixture source replays scripted responses") {
    json fixture = fixture_with(json::array(
        {{{"source", "serper.dev"},
          {"query", "agent memory"},
          {"records",
           json::array({{{"title", "Memory in Agents"}, {"doi", "10.1/abc"}, {"year", 2023}},
                        {{"title", "Episodic Stores"}}})}},
         {{"source", "serper.dev"}, {"query", "broken"}, {"fail", true}},
         {{"source", "openalex"},
          {"query", "agent memory"},
          {"records", json::array({{{"title", "Agent Recall"}, {"relevance", 0.4}}})}}}));

    FixtureSource src("serper.dev", fixture);
    CHECK(src.source_id() == "serper.dev");

    auto recs = src.search("agent memory", 10);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].id == "10.1/abc");          // doi wins over title
    CHECK(recs[0].year == 2023);
    CHECK(recs[0].relevance == 1.0);          // rank-derived
    CHECK(recs[1].id == normalize_title("Episodic Stores"));
    CHECK(recs[1].relevance == Approx(0.5));
    CHECK(recs[1].source == "serper.dev");

    CHECK(src.search("unknown query", 10).empty());
    CHECK(src.search("agent memory", 1).size() == 1);
    CHECK_THROWS_AS(src.search("broken", 10), RetrievalError);

    // Responses for other sources are ignored by this client.
    FixtureSource other("openalex", fixture);
    auto oa = other.search("agent memory", 10);
    REQUIRE(oa.size() == 1);
    CHECK(oa[0].relevance == 0.4); // explicit relevance is kept
}

TEST_CASE("fixture source rejects wrong kinds") {
    CHECK_THROWS_AS(FixtureSource("s", json({{"kind", "other"}})), ParseError);
    CHECK_THROWS_AS(FixtureSource("s", json::object()), ParseError);
}

TEST_CASE("retrieval preconditions are enforced") {
    RunConfig cfg;
    Logger log;
    RerankContext ctx = rerank_context_from_config(cfg, 2026, nullptr);
    auto src = std::make_shared<SyntheticSource>("s");
    Collector collector({src}, cfg, log, ctx);

    OutlineNode non_content = content_node({"q"});
    non_content.is_content = false;
    CHECK_THROWS_AS(collector.retrieve_for_section(non_content, generic_intent()),
                    PreconditionError);

    OutlineNode no_queries = content_node({});
    CHECK_THROWS_AS(collector.retrieve_for_section(no_queries, generic_intent()),
                    PreconditionError);

    Collector empty({}, cfg, log, ctx);
    CHECK_THROWS_AS(empty.retrieve_for_section(content_node({"q"}), generic_intent()),
                    ConfigError);
}

TEST_CASE("retrieval fans out across queries and sources, deduplicating by id") {
    RunConfig cfg;
    cfg.limit_per_query = 10;
    Logger log;
    RerankContext ctx = rerank_context_from_config(cfg, 2026, nullptr);
    auto s1 = std::make_shared<SyntheticSource>("synthetic:one", 3);
    auto s2 = std::make_shared<SyntheticSource>("synthetic:two", 3);
    Collector collector({s1, s2}, cfg, log, ctx);

    auto recs = collector.retrieve_for_section(
        content_node({"agent memory", "tool use"}), generic_intent());
    // 2 queries x 2 sources x 3 records, all ids distinct (titles embed the source).
    CHECK(recs.size() == 12);
}

TEST_CASE("duplicate ids across sources keep the higher-relevance copy") {
    json fixture = fixture_with(json::array(
        {{{"source", "s1"},
          {"query", "q"},
          {"records", json::array({{{"title", "Shared Paper"}, {"relevance", 0.3}}})}},
         {{"source", "s2"},
          {"query", "q"},
          {"records", json::array({{{"title", "Shared Paper"}, {"relevance", 0.8},
                                    {"year", 2024}}})}}}));
    RunConfig cfg;
    Logger log;
    RerankContext ctx = rerank_context_from_config(cfg, 2026, nullptr);
    Collector collector({std::make_shared<FixtureSource>("s1", fixture),
                         std::make_shared<FixtureSource>("s2", fixture)},
                        cfg, log, ctx);

    auto recs = collector.retrieve_for_section(content_node({"q"}), generic_intent());
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].relevance == 0.8);
    CHECK(recs[0].year == 2024);
}

TEST_CASE("sources are prioritized by domain affinity and skipped once enough gathered") {
    RunConfig cfg;
    cfg.section_top_k = 1; // enough = 2 candidates
    cfg.limit_per_query = 10;
    Logger log;
    RerankContext ctx = rerank_context_from_config(cfg, 2026, nullptr);
    // "far" sorts first alphabetically but has lower affinity, so "near" is
    // queried first; its 3 records already exceed 2*k and "far" is skipped.
    auto near = std::make_shared<SyntheticSource>(
        "near", 3, std::map<std::string, double>{{"computation and language", 0.9}});
    auto far = std::make_shared<SyntheticSource>(
        "far", 3, std::map<std::string, double>{{"computation and language", 0.1}});
    Collector collector({far, near}, cfg, log, ctx);

    auto recs = collector.retrieve_for_section(content_node({"q"}), generic_intent());
    REQUIRE(recs.size() == 3);
    for (const auto& r : recs) CHECK(r.source == "near");
    CHECK(log.count_containing("skipping source 'far'") == 1);
}

TEST_CASE("partial source failure warns and continues; total failure raises") {
    json fixture = fixture_with(json::array(
        {{{"source", "good"},
          {"query", "q"},
          {"records", json::array({{{"title", "Survivor Paper"}}})}},
         {{"source", "bad"}, {"query", "q"}, {"fail", true}}}));
    RunConfig cfg;
    Logger log;
    RerankContext ctx = rerank_context_from_config(cfg, 2026, nullptr);

    SECTION("one failing source is tolerated") {
        Collector collector({std::make_shared<FixtureSource>("bad", fixture),
                             std::make_shared<FixtureSource>("good", fixture)},
                            cfg, log, ctx);
        auto recs = collector.retrieve_for_section(content_node({"q"}), generic_intent());
        REQUIRE(recs.size() == 1);
        CHECK(recs[0].title == "Survivor Paper");
        CHECK(log.count_containing("source 'bad' failed for query 'q'") == 1);
    }
    SECTION("all sources failing raises RetrievalError naming the section") {
        Collector collector({std::make_shared<FixtureSource>("bad", fixture)}, cfg, log, ctx);
        CHECK_THROWS_WITH(collector.retrieve_for_section(content_node({"q"}), generic_intent()),
                          Catch::Matchers::ContainsSubstring("Agent Memory"));
    }
}

TEST_CASE("records without ids are dropped with a warning") {
    struct NoIdSource : SourceClient {
        std::string source_id() const override { return "noid"; }
        std::vector<PaperRecord> search(const std::string&, int) override {
            PaperRecord ok;
            ok.id = "kept";
            ok.title = "Kept";
            PaperRecord broken; // no id
            broken.title = "Broken";
            return {broken, ok};
        }
    };
    RunConfig cfg;
    Logger log;
    RerankContext ctx = rerank_context_from_config(cfg, 2026, nullptr);
    Collector collector({std::make_shared<NoIdSource>()}, cfg, log, ctx);
    auto recs = collector.retrieve_for_section(content_node({"q"}), generic_intent());
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].id == "kept");
    CHECK(log.count_containing("record without id") == 1);
}

TEST_CASE("collect applies rerank and the section top-k") {
    RunConfig cfg;
    cfg.section_top_k = 4;
    cfg.limit_per_query = 10;
    Logger log;
    RerankContext ctx = rerank_context_from_config(cfg, 2026, nullptr);
    auto s1 = std::make_shared<SyntheticSource>("synthetic:one", 5);
    auto s2 = std::make_shared<SyntheticSource>("synthetic:two", 5);
    Collector collector({s1, s2}, cfg, log, ctx);

    auto papers = collector.collect(content_node({"agent memory", "tool use"}),
                                    generic_intent());
    REQUIRE(papers.size() == 4);
    for (std::size_t i = 1; i < papers.size(); ++i)
        CHECK(papers[i - 1].composite_score >= papers[i].composite_score);
    for (const auto& p : papers) CHECK(p.composite_score > 0.0);
}

TEST_CASE("rerank context derives from the run configuration") {
    RunConfig cfg;
    cfg.w_relevance = 0.5;
    cfg.w_citation = 0.3;
    cfg.recency_window_years = 4;
    cfg.citation_cap = 500;
    cfg.author_hindex_cap = 60.0;
    VenueTable venues;
    RerankContext ctx = rerank_context_from_config(cfg, 2031, &venues);
    CHECK(ctx.weights.w_relevance == 0.5);
    CHECK(ctx.weights.w_citation == 0.3);
    CHECK(ctx.now_year == 2031);
    CHECK(ctx.recency_window_years == 4);
    CHECK(ctx.citation_cap == 500);
    CHECK(ctx.author_cap == 60.0);
    CHECK(ctx.venues == &venues);
}

TEST_CASE("gateway-scored relevance replaces rank-derived scores when enabled") {
    RunConfig cfg;
    cfg.do_llm_relevance = true;
    cfg.judge_model = "judge-r";
    cfg.w_relevance = 1.0;
    cfg.w_recency = cfg.w_venue = cfg.w_author = cfg.w_citation = 0.0;
    Logger log;
    RerankContext ctx = rerank_context_from_config(cfg, 2026, nullptr);

    json fixture = fixture_with(json::array(
        {{{"source", "s"},
          {"query", "q1"},
          {"records", json::array({{{"title", "Paper Alpha"}},
                                   {{"title", "Paper Beta"}},
                                   {{"title", "Paper Gamma"}}})}}}));
    auto src = std::make_shared<FixtureSource>("s", fixture);

    auto mock = std::make_shared<MockTransport>();
    mock->push(gen::user_entry("Paper Alpha", "0.1"));
    mock->push(gen::user_entry("Paper Beta", "Relevance: 0.95"));
    mock->push(gen::user_entry("Paper Gamma", "definitely relevant!")); // unparseable
    GatewayOptions opts;
    opts.max_retries = 0;
    opts.sleep_on_backoff = false;
    opts.rate_limit_per_sec = 100000.0;
    Gateway gateway(mock, opts, &log);

    Collector collector({src}, cfg, log, ctx, &gateway);
    auto papers = collector.collect(content_node({"q1"}), generic_intent());

    // Beta 0.95 (judged) > Gamma 1/3 (rank-derived kept) > Alpha 0.1 (judged).
    REQUIRE(papers.size() == 3);
    CHECK(papers[0].id == normalize_title("Paper Beta"));
    CHECK(papers[0].relevance == Approx(0.95));
    CHECK(papers[1].id == normalize_title("Paper Gamma"));
    CHECK(papers[1].relevance == Approx(1.0 / 3.0));
    CHECK(papers[2].id == normalize_title("Paper Alpha"));
    CHECK(papers[2].relevance == Approx(0.1));
    CHECK(log.count_containing("llm relevance reply unparseable for 'papergamma'") == 1);

    // One judge call per gathered record, at temperature zero.
    REQUIRE(mock->transcript().size() == 3);
    for (const auto& t : mock->transcript()) {
        CHECK(t.request.model == "judge-r");
        CHECK(t.request.temperature == 0.0);
        CHECK(t.request.system_text().find("literature triage assistant") !=
              std::string::npos);
        CHECK(t.request.user_text().find("Agent Memory") != std::string::npos);
        CHECK(t.request.user_text().find("llm agents") != std::string::npos);
    }
}

TEST_CASE("judged relevance is clamped into the unit interval") {
    RunConfig cfg;
    cfg.do_llm_relevance = true;
    Logger log;
    RerankContext ctx = rerank_context_from_config(cfg, 2026, nullptr);
    json fixture = fixture_with(json::array(
        {{{"source", "s"},
          {"query", "q1"},
          {"records",
           json::array({{{"title", "Paper High"}}, {{"title", "Paper Low"}}})}}}));
    auto src = std::make_shared<FixtureSource>("s", fixture);
    auto mock = std::make_shared<MockTransport>();
    mock->push(gen::user_entry("Paper High", "7"));   // clamps to 1.0
    mock->push(gen::user_entry("Paper Low", "0"));    // parses to 0.0
    GatewayOptions opts;
    opts.max_retries = 0;
    opts.sleep_on_backoff = false;
    opts.rate_limit_per_sec = 100000.0;
    Gateway gateway(mock, opts, &log);

    Collector collector({src}, cfg, log, ctx, &gateway);
    auto papers = collector.collect(content_node({"q1"}), generic_intent());
    REQUIRE(papers.size() == 2);
    CHECK(papers[0].relevance == 1.0);
    CHECK(papers[1].relevance == 0.0);
}

TEST_CASE("relevance judging fails open per record on gateway errors") {
    RunConfig cfg;
    cfg.do_llm_relevance = true;
    Logger log;
    RerankContext ctx = rerank_context_from_config(cfg, 2026, nullptr);
    json fixture = fixture_with(json::array(
        {{{"source", "s"},
          {"query", "q1"},
          {"records",
           json::array({{{"title", "Paper Alpha"}}, {{"title", "Paper Beta"}}})}}}));
    auto src = std::make_shared<FixtureSource>("s", fixture);
    auto mock = std::make_shared<MockTransport>();
    MockScriptEntry boom;
    boom.match_user_contains = "Paper Alpha";
    boom.fail = true;
    boom.fail_message = "judge offline";
    mock->push(boom);
    mock->push(gen::user_entry("Paper Beta", "0.9"));
    GatewayOptions opts;
    opts.max_retries = 0;
    opts.sleep_on_backoff = false;
    opts.rate_limit_per_sec = 100000.0;
    Gateway gateway(mock, opts, &log);

    Collector collector({src}, cfg, log, ctx, &gateway);
    auto papers = collector.collect(content_node({"q1"}), generic_intent());
    REQUIRE(papers.size() == 2);
    CHECK(log.count_containing("llm relevance scoring failed for 'paperalpha'") == 1);
    // Alpha keeps its rank-derived 1.0 and still leads.
    CHECK(papers[0].id == normalize_title("Paper Alpha"));
    CHECK(papers[0].relevance == 1.0);
    CHECK(papers[1].relevance == Approx(0.9));
}

TEST_CASE("relevance judging warns and degrades without a wired gateway") {
    RunConfig cfg;
    cfg.do_llm_relevance = true;
    Logger log;
    RerankContext ctx = rerank_context_from_config(cfg, 2026, nullptr);
    auto src = std::make_shared<SyntheticSource>("s", 3);
    Collector collector({src}, cfg, log, ctx);
    auto papers = collector.collect(content_node({"q1"}), generic_intent());
    CHECK_FALSE(papers.empty());
    CHECK(log.count_containing("no gateway is wired") == 1);
}

TEST_CASE("the judge is never consulted while llm relevance is disabled") {
    RunConfig cfg;
    REQUIRE_FALSE(cfg.do_llm_relevance);
    Logger log;
    RerankContext ctx = rerank_context_from_config(cfg, 2026, nullptr);
    auto src = std::make_shared<SyntheticSource>("s", 3);
    auto mock = std::make_shared<MockTransport>();
    GatewayOptions opts;
    opts.sleep_on_backoff = false;
    opts.rate_limit_per_sec = 100000.0;
    Gateway gateway(mock, opts, &log);
    Collector collector({src}, cfg, log, ctx, &gateway);
    auto papers = collector.collect(content_node({"q1"}), generic_intent());
    CHECK_FALSE(papers.empty());
    CHECK(mock->transcript().empty());
}
