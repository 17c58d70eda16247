#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scisage/gateway.hpp"
#include "scisage/prompts.hpp"
#include "scisage/serialization.hpp"
#include "scisage/types.hpp"

namespace scisage {

// ---------------------------------------------------------------------------
// Venue prestige lookup
// ---------------------------------------------------------------------------

class VenueTable {
public:
    VenueTable() = default;

    static VenueTable from_file(const std::string& path) {
        VenueTable t;
        json j = read_artifact(path);
        const json& venues = j.contains("venues") ? j.at("venues") : j;
        if (!venues.is_object()) throw ParseError("venue prestige file must map venue -> score");
        for (auto it = venues.begin(); it != venues.end(); ++it) {
            if (it.key() == "kind") continue;
            double v = it.value().get<double>();
            if (v < 0.0 || v > 1.0)
                throw ParseError("venue prestige for '" + it.key() + "' outside [0, 1]");
            t.set(it.key(), v);
        }
        return t;
    }

    void set(const std::string& venue, double prestige) {
        table_[collapse_whitespace(to_lower(trim(venue)))] = prestige;
    }

    double lookup(const std::string& venue) const {
        auto it = table_.find(collapse_whitespace(to_lower(trim(venue))));
        return it == table_.end() ? 0.5 : it->second;
    }

private:
    std::map<std::string, double> table_;
};

// ---------------------------------------------------------------------------
// Composite scoring
// ---------------------------------------------------------------------------

struct RerankWeights {
    double w_relevance = 0.4;
    double w_recency = 0.2;
    double w_venue = 0.1;
    double w_author = 0.1;
    double w_citation = 0.2;
};

struct RerankContext {
    RerankWeights weights;
    int now_year = 0;
    int recency_window_years = 6;
    int citation_cap = 1000;
    double author_cap = 100.0;
    const VenueTable* venues = nullptr;
};

inline RerankContext rerank_context_from_config(const RunConfig& cfg, int now_year,
                                                const VenueTable* venues) {
    RerankContext ctx;
    ctx.weights = {cfg.w_relevance, cfg.w_recency, cfg.w_venue, cfg.w_author, cfg.w_citation};
    ctx.now_year = now_year;
    ctx.recency_window_years = cfg.recency_window_years;
    ctx.citation_cap = cfg.citation_cap;
    ctx.author_cap = cfg.author_hindex_cap;
    ctx.venues = venues;
    return ctx;
}

inline double recency_norm(int year, int now_year, int window_years) {
    if (year <= 0) return 0.0;
    double v = 1.0 - static_cast<double>(now_year - year) / static_cast<double>(window_years);
    return std::clamp(v, 0.0, 1.0);
}

inline double citation_norm(int citations, int cap) {
    if (citations <= 0) return 0.0;
    double v = std::log1p(static_cast<double>(citations)) / std::log1p(static_cast<double>(cap));
    return std::min(v, 1.0);
}

inline double author_norm(double signal, double cap) {
    if (signal <= 0.0) return 0.0;
    return std::min(1.0, signal / cap);
}

inline double composite_score(const PaperRecord& rec, const RerankContext& ctx) {
    static const VenueTable kDefaultVenues;
    const VenueTable& venues = ctx.venues ? *ctx.venues : kDefaultVenues;
    const RerankWeights& w = ctx.weights;
    return w.w_relevance * std::clamp(rec.relevance, 0.0, 1.0) +
           w.w_recency * recency_norm(rec.year, ctx.now_year, ctx.recency_window_years) +
           w.w_venue * venues.lookup(rec.venue) +
           w.w_author * author_norm(rec.author_signal, ctx.author_cap) +
           w.w_citation * citation_norm(rec.citation_count, ctx.citation_cap);
}

inline double composite_score(const PaperRecord& rec, const RerankWeights& weights,
                              int now_year) {
    RerankContext ctx;
    ctx.weights = weights;
    ctx.now_year = now_year;
    return composite_score(rec, ctx);
}

/// Deduplicates by id (keeping the max-composite duplicate), sorts by
/// composite score descending with (year desc, id asc) tie-breaks, and
/// returns the top-k, each record carrying its score.
inline std::vector<PaperRecord> rerank(const std::vector<PaperRecord>& records,
                                       const RerankContext& ctx, int k) {
    std::map<std::string, PaperRecord> best;
    for (const auto& rec : records) {
        PaperRecord scored = rec;
        scored.composite_score = composite_score(rec, ctx);
        auto it = best.find(scored.id);
        if (it == best.end() || scored.composite_score > it->second.composite_score)
            best[scored.id] = std::move(scored);
    }
    std::vector<PaperRecord> out;
    out.reserve(best.size());
    for (auto& [id, rec] : best) out.push_back(std::move(rec));
    std::sort(out.begin(), out.end(), [](const PaperRecord& a, const PaperRecord& b) {
        if (a.composite_score != b.composite_score) return a.composite_score > b.composite_score;
        if (a.year != b.year) return a.year > b.year;
        return a.id < b.id;
    });
    if (k < 0) k = 0;
    if (static_cast<std::size_t>(k) < out.size()) out.resize(static_cast<std::size_t>(k));
    return out;
}

// ---------------------------------------------------------------------------
// Source clients
// ---------------------------------------------------------------------------

/// Behavioral contract for one literature source.
class SourceClient {
public:
    virtual ~SourceClient() = default;
    virtual std::string source_id() const = 0;
    /// Returns ≤ limit records in the source's own relevance order; each
    /// record carries a non-empty id and this source's tag.
    virtual std::vector<PaperRecord> search(const std::string& query, int limit) = 0;
    /// How promising this source is for a research domain, in [0,1].
    virtual double domain_affinity(const std::string& domain) const {
        (void)domain;
        return 1.0;
    }
};

/// Rank-derived relevance: the source's first result gets 1.0, the last gets
/// 1/n, linearly spaced.
inline double relevance_from_rank(std::size_t index, std::size_t total) {
    if (total == 0) return 0.0;
    return static_cast<double>(total - index) / static_cast<double>(total);
}

/// Offline deterministic source: fabricates stable records from the query
/// text alone, so fixture-less mock runs still exercise the full pipeline.
class SyntheticSource : public SourceClient {
public:
    explicit SyntheticSource(std::string source_id, int per_query = 3,
                             std::map<std::string, double> affinity = {})
        : source_id_(std::move(source_id)),
          per_query_(per_query),
          affinity_(std::move(affinity)) {}

    std::string source_id() const override { return source_id_; }

    std::vector<PaperRecord> search(const std::string& query, int limit) override {
        int n = std::min(per_query_, limit);
        std::vector<PaperRecord> out;
        for (int i = 0; i < n; ++i) {
            std::uint64_t h = fnv1a64(source_id_ + "|" + query + "|" + std::to_string(i));
            PaperRecord rec;
            rec.title = "On " + query + ": study " + std::to_string(i + 1) + " (" +
                        source_id_ + ")";
            rec.id = make_paper_id("", rec.title);
            rec.abstract = "An investigation of " + query + " covering aspect " +
                           std::to_string(i + 1) + ".";
            rec.authors = {"Author " + fnv1a64_hex(rec.title).substr(0, 6)};
            rec.year = 2019 + static_cast<int>(h % 6);
            rec.venue = (h % 3 == 0) ? "Journal of Synthetic Studies" : "Proc. Synthetic Conf.";
            rec.citation_count = static_cast<int>(h % 500);
            rec.author_signal = static_cast<double>(h % 80);
            rec.source = source_id_;
            rec.relevance = relevance_from_rank(static_cast<std::size_t>(i),
                                                static_cast<std::size_t>(n));
            out.push_back(std::move(rec));
        }
        return out;
    }

    double domain_affinity(const std::string& domain) const override {
        auto it = affinity_.find(collapse_whitespace(to_lower(trim(domain))));
        return it == affinity_.end() ? 1.0 : it->second;
    }

private:
    std::string source_id_;
    int per_query_;
    std::map<std::string, double> affinity_;
};

/// Replays recorded search responses from a fixture file:
/// {"kind":"search_fixture","responses":[{"source":s,"query":q,
///   "records":[...]} | {"source":s,"query":q,"fail":true}]}
class FixtureSource : public SourceClient {
public:
    FixtureSource(std::string source_id, const json& fixture,
                  std::map<std::string, double> affinity = {})
        : source_id_(std::move(source_id)), affinity_(std::move(affinity)) {
        if (fixture.value("kind", "") != "search_fixture")
            throw ParseError("search fixture must have kind 'search_fixture'");
        for (const auto& r : jsonio::req_arr(fixture, "responses")) {
            if (jsonio::req_str(r, "source") != source_id_) continue;
            Entry e;
            e.fail = r.value("fail", false);
            if (!e.fail) {
                std::size_t total =
                    r.contains("records") ? r.at("records").size() : std::size_t{0};
                std::size_t idx = 0;
                for (const auto& rec : jsonio::req_arr(r, "records"))
                    e.records.push_back(lenient_record(rec, source_id_, idx++, total));
            }
            responses_[jsonio::req_str(r, "query")] = std::move(e);
        }
    }

    std::string source_id() const override { return source_id_; }

    std::vector<PaperRecord> search(const std::string& query, int limit) override {
        auto it = responses_.find(query);
        if (it == responses_.end()) return {};
        if (it->second.fail) throw RetrievalError("fixture-scripted failure for source '" +
                                                  source_id_ + "', query '" + query + "'");
        std::vector<PaperRecord> out = it->second.records;
        if (static_cast<int>(out.size()) > limit) out.resize(static_cast<std::size_t>(limit));
        return out;
    }

    double domain_affinity(const std::string& domain) const override {
        auto it = affinity_.find(collapse_whitespace(to_lower(trim(domain))));
        return it == affinity_.end() ? 1.0 : it->second;
    }

    /// Parses a fixture record, requiring only a title; id derives from
    /// doi/title exactly like live records.
    static PaperRecord lenient_record(const json& j, const std::string& source,
                                      std::size_t rank, std::size_t total) {
        PaperRecord rec;
        rec.title = jsonio::req_str(j, "title");
        rec.id = make_paper_id(j.value("doi", ""), rec.title);
        rec.abstract = j.value("abstract", "");
        if (j.contains("authors"))
            for (const auto& a : j.at("authors")) rec.authors.push_back(a.get<std::string>());
        rec.year = j.value("year", 0);
        rec.venue = j.value("venue", "");
        rec.citation_count = j.value("citation_count", 0);
        rec.author_signal = j.value("author_signal", 0.0);
        rec.source = source;
        rec.relevance = j.contains("relevance") ? j.at("relevance").get<double>()
                                                : relevance_from_rank(rank, total);
        if (j.contains("full_text")) rec.full_text = j.at("full_text").get<std::string>();
        return rec;
    }

private:
    struct Entry {
        std::vector<PaperRecord> records;
        bool fail = false;
    };
    std::string source_id_;
    std::map<std::string, Entry> responses_;
    std::map<std::string, double> affinity_;
};

// ---------------------------------------------------------------------------
// Collector
// ---------------------------------------------------------------------------

class Collector {
public:
    /// `gateway` is only consulted when `do_llm_relevance` is enabled.
    Collector(std::vector<std::shared_ptr<SourceClient>> sources, const RunConfig& cfg,
              Logger& log, RerankContext ctx, Gateway* gateway = nullptr)
        : sources_(std::move(sources)), cfg_(cfg), log_(log), ctx_(std::move(ctx)),
          gateway_(gateway) {}

    /// Fan-out over node.search_queries × prioritized sources, deduplicated
    /// by id; sources are ordered by domain affinity and later ones are
    /// skipped once 2·k candidates have been gathered.
    std::vector<PaperRecord> retrieve_for_section(const OutlineNode& node,
                                                  const Intent& intent) const {
        if (!node.is_content)
            throw PreconditionError("retrieval requires a content node: '" + node.title + "'");
        if (node.search_queries.empty())
            throw PreconditionError("content node '" + node.title + "' has no search queries");
        if (sources_.empty()) throw ConfigError("no retrieval sources configured");

        std::vector<std::shared_ptr<SourceClient>> ordered = sources_;
        std::stable_sort(ordered.begin(), ordered.end(),
                         [&](const auto& a, const auto& b) {
                             return a->domain_affinity(intent.domain) >
                                    b->domain_affinity(intent.domain);
                         });

        std::vector<PaperRecord> gathered;
        std::map<std::string, std::size_t> index_by_id;
        std::size_t failed_sources = 0;
        const std::size_t enough = static_cast<std::size_t>(cfg_.section_top_k) * 2;
        for (std::size_t si = 0; si < ordered.size(); ++si) {
            if (gathered.size() >= enough) {
                log_.info("section '" + node.title + "': gathered " +
                          std::to_string(gathered.size()) + " candidates; skipping source '" +
                          ordered[si]->source_id() + "'");
                continue;
            }
            SourceClient& src = *ordered[si];
            bool any_ok = false;
            for (const auto& query : node.search_queries) {
                try {
                    auto records = src.search(query, cfg_.limit_per_query);
                    any_ok = true;
                    for (auto& rec : records) {
                        if (rec.id.empty()) {
                            log_.warn("source '" + src.source_id() +
                                      "' returned a record without id; dropped");
                            continue;
                        }
                        if (rec.source.empty()) rec.source = src.source_id();
                        auto it = index_by_id.find(rec.id);
                        if (it == index_by_id.end()) {
                            index_by_id[rec.id] = gathered.size();
                            gathered.push_back(std::move(rec));
                        } else if (rec.relevance > gathered[it->second].relevance) {
                            gathered[it->second] = std::move(rec);
                        }
                    }
                } catch (const Error& e) {
                    log_.warn("source '" + src.source_id() + "' failed for query '" + query +
                              "': " + e.what());
                }
            }
            if (!any_ok) ++failed_sources;
        }
        if (failed_sources == ordered.size() && gathered.empty())
            throw RetrievalError("all retrieval sources failed for section '" + node.title +
                                 "'");
        return gathered;
    }

    /// Replaces each record's rank-derived relevance with a gateway-judged
    /// score in [0, 1].  Fails open per record: unusable judgments keep the
    /// rank-derived value with a warning.
    std::vector<PaperRecord> score_llm_relevance(std::vector<PaperRecord> records,
                                                 const OutlineNode& node,
                                                 const Intent& intent) const {
        if (!gateway_) {
            log_.warn("llm relevance scoring requested but no gateway is wired; "
                      "using rank-derived relevance");
            return records;
        }
        for (auto& rec : records) {
            ChatRequest req;
            req.model = cfg_.judge_model;
            req.messages = {
                {"system", prompts::kRelevanceSystem},
                {"user", substitute(prompts::kRelevanceUser,
                                    {{"TOPIC", intent.topic},
                                     {"SECTION", node.title},
                                     {"QUERIES", join(node.search_queries, "; ")},
                                     {"TITLE", rec.title},
                                     {"ABSTRACT", rec.abstract}})}};
            req.temperature = 0.0;
            req.max_tokens = cfg_.max_output_tokens;
            try {
                ChatResponse resp = gateway_->complete(cfg_.chat_endpoint, req);
                auto score = parse_unit_score(resp.content);
                if (!score) {
                    log_.warn("llm relevance reply unparseable for '" + rec.id +
                              "'; keeping rank-derived relevance");
                    continue;
                }
                rec.relevance = *score;
            } catch (const Error& e) {
                log_.warn("llm relevance scoring failed for '" + rec.id + "': " +
                          std::string(e.what()) + "; keeping rank-derived relevance");
            }
        }
        return records;
    }

    /// First number found in the reply, clamped into [0, 1].
    static std::optional<double> parse_unit_score(const std::string& reply) {
        std::size_t i = 0;
        while (i < reply.size() && !(reply[i] >= '0' && reply[i] <= '9')) ++i;
        if (i == reply.size()) return std::nullopt;
        std::string digits;
        while (i < reply.size() &&
               ((reply[i] >= '0' && reply[i] <= '9') || reply[i] == '.'))
            digits += reply[i++];
        try {
            return std::clamp(std::stod(digits), 0.0, 1.0);
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }

    /// Retrieval (+ optional gateway relevance scoring) + rerank to the
    /// section's paper list P_i.
    std::vector<PaperRecord> collect(const OutlineNode& node, const Intent& intent) const {
        std::vector<PaperRecord> gathered = retrieve_for_section(node, intent);
        if (cfg_.do_llm_relevance)
            gathered = score_llm_relevance(std::move(gathered), node, intent);
        return rerank(gathered, ctx_, cfg_.section_top_k);
    }

    const RerankContext& context() const { return ctx_; }

private:
    std::vector<std::shared_ptr<SourceClient>> sources_;
    const RunConfig& cfg_;
    Logger& log_;
    RerankContext ctx_;
    Gateway* gateway_ = nullptr;
};

}  // namespace scisage

// ---------------------------------------------------------------------------
// Live HTTP sources (optional, compiled only with networking enabled)
// ---------------------------------------------------------------------------

#if defined(SCISAGE_ENABLE_HTTP)
#include <httplib.h>

namespace scisage {

/// Scholarly works API client (OpenAlex-style JSON).
class WorksApiSource : public SourceClient {
public:
    explicit WorksApiSource(std::string endpoint) : endpoint_(std::move(endpoint)) {}

    std::string source_id() const override { return "works-api"; }

    std::vector<PaperRecord> search(const std::string& query, int limit) override {
        auto [base, path] = split_endpoint(endpoint_);
        httplib::Client client(base);
        client.set_connection_timeout(20);
        client.set_read_timeout(60);
        httplib::Params params{{"search", query}, {"per-page", std::to_string(limit)}};
        auto res = client.Get(path, params, httplib::Headers{});
        if (!res) throw RetrievalError("network failure contacting " + base);
        if (res->status != 200)
            throw RetrievalError("works api returned status " + std::to_string(res->status));
        json j = parse_json_text(res->body);
        std::vector<PaperRecord> out;
        if (!j.contains("results")) return out;
        const json& results = j.at("results");
        std::size_t total = results.size();
        std::size_t idx = 0;
        for (const auto& w : results) {
            PaperRecord rec;
            rec.title = w.value("display_name", "");
            if (trim(rec.title).empty()) continue;
            std::string doi = w.value("doi", "");
            rec.id = make_paper_id(doi, rec.title);
            rec.year = w.value("publication_year", 0);
            rec.citation_count = w.value("cited_by_count", 0);
            if (w.contains("primary_location") && w.at("primary_location").is_object()) {
                const json& loc = w.at("primary_location");
                if (loc.contains("source") && loc.at("source").is_object())
                    rec.venue = loc.at("source").value("display_name", "");
            }
            if (w.contains("authorships"))
                for (const auto& a : w.at("authorships"))
                    if (a.contains("author") && a.at("author").is_object())
                        rec.authors.push_back(a.at("author").value("display_name", ""));
            if (w.contains("abstract_inverted_index") &&
                w.at("abstract_inverted_index").is_object())
                rec.abstract = reconstruct_abstract(w.at("abstract_inverted_index"));
            rec.source = source_id();
            rec.relevance = relevance_from_rank(idx, total);
            ++idx;
            out.push_back(std::move(rec));
            if (static_cast<int>(out.size()) >= limit) break;
        }
        return out;
    }

    static std::string reconstruct_abstract(const json& inverted) {
        std::map<int, std::string> by_pos;
        for (auto it = inverted.begin(); it != inverted.end(); ++it)
            for (const auto& pos : it.value()) by_pos[pos.get<int>()] = it.key();
        std::string out;
        for (const auto& [pos, word] : by_pos) {
            if (!out.empty()) out += ' ';
            out += word;
        }
        return out;
    }

private:
    std::string endpoint_;
};

/// General web search client (serper.dev-style JSON API).
class WebSearchSource : public SourceClient {
public:
    WebSearchSource(std::string endpoint, std::string api_key_env)
        : endpoint_(std::move(endpoint)), api_key_env_(std::move(api_key_env)) {}

    std::string source_id() const override { return "web-search"; }

    std::vector<PaperRecord> search(const std::string& query, int limit) override {
        auto [base, path] = split_endpoint(endpoint_);
        if (path == "/") path = "/search";
        httplib::Client client(base);
        client.set_connection_timeout(20);
        client.set_read_timeout(60);
        httplib::Headers headers;
        if (const char* key = std::getenv(api_key_env_.c_str()); key && *key)
            headers.emplace("X-API-KEY", key);
        json body = {{"q", query}, {"num", limit}};
        auto res = client.Post(path, headers, body.dump(), "application/json");
        if (!res) throw RetrievalError("network failure contacting " + base);
        if (res->status != 200)
            throw RetrievalError("web search returned status " + std::to_string(res->status));
        json j = parse_json_text(res->body);
        std::vector<PaperRecord> out;
        if (!j.contains("organic")) return out;
        const json& organic = j.at("organic");
        std::size_t total = organic.size();
        std::size_t idx = 0;
        for (const auto& item : organic) {
            PaperRecord rec;
            rec.title = item.value("title", "");
            if (trim(rec.title).empty()) continue;
            rec.id = make_paper_id("", rec.title);
            rec.abstract = item.value("snippet", "");
            rec.venue = item.value("link", "");
            rec.source = source_id();
            rec.relevance = relevance_from_rank(idx, total);
            ++idx;
            out.push_back(std::move(rec));
            if (static_cast<int>(out.size()) >= limit) break;
        }
        return out;
    }

    double domain_affinity(const std::string& domain) const override {
        (void)domain;
        return 0.6;  // general web results trail scholarly APIs for any domain
    }

private:
    std::string endpoint_;
    std::string api_key_env_;
};

}  // namespace scisage
#endif  // SCISAGE_ENABLE_HTTP
