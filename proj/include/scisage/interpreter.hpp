#pragma once

#include <optional>
#include <string>

#include "scisage/gateway.hpp"
#include "scisage/prompts.hpp"
#include "scisage/types.hpp"

namespace scisage {

/// Finds a line beginning with `label:` (case-insensitive) and returns the
/// trimmed remainder.
inline std::optional<std::string> parse_labeled_line(const std::string& text,
                                                     const std::string& label) {
    for (const auto& line : split_lines(text)) {
        std::string t = trim(line);
        // Tolerate simple markdown emphasis around the label.
        while (!t.empty() && (t.front() == '*' || t.front() == '-' || t.front() == '#'))
            t = trim(t.substr(1));
        if (t.size() <= label.size()) continue;
        if (!istarts_with(t, label)) continue;
        std::string rest = trim(t.substr(label.size()));
        while (!rest.empty() && rest.front() == '*') rest = trim(rest.substr(1));
        if (rest.empty() || rest.front() != ':') continue;
        std::string value = trim(rest.substr(1));
        while (!value.empty() && value.front() == '*') value = trim(value.substr(1));
        return value;
    }
    return std::nullopt;
}

/// Turns the raw user query Q into English text Q_E, a structured Intent, and
/// a retrieval-optimized rewrite Q_R.
class Interpreter {
public:
    Interpreter(Gateway& gateway, const RunConfig& cfg, Logger& log)
        : gateway_(gateway), cfg_(cfg), log_(log) {}

    std::string detect_and_translate(const std::string& query) const {
        std::string q = trim(query);
        if (q.empty()) throw InputError("query is empty");
        ChatResponse resp = ask(prompts::kTranslateSystem,
                                substitute(prompts::kTranslateUser, {{"QUERY", q}}));
        auto language = parse_labeled_line(resp.content, "Language");
        auto translation = parse_labeled_line(resp.content, "Translation");
        if (language && to_lower(*language) == "english") return q;
        if (translation && !trim(*translation).empty()) return trim(*translation);
        std::string whole = trim(resp.content);
        if (!whole.empty()) return whole;
        log_.warn("translation reply was empty; keeping original query");
        return q;
    }

    Intent classify_intent(const std::string& q_e) const {
        if (trim(q_e).empty()) throw InputError("query is empty");
        std::string user = substitute(prompts::kClassifyUser, {{"QUERY", trim(q_e)}});
        auto attempt = [&]() -> std::optional<Intent> {
            ChatResponse resp = ask(prompts::kClassifySystem, user);
            auto domain = parse_labeled_line(resp.content, "Research Domain");
            auto type_label = parse_labeled_line(resp.content, "Query Type");
            auto topic = parse_labeled_line(resp.content, "Research Topic");
            if (!domain || !type_label || !topic || trim(*domain).empty() ||
                trim(*topic).empty())
                return std::nullopt;
            Intent intent;
            intent.domain = trim(*domain);
            intent.topic = trim(*topic);
            if (auto qt = query_type_from_string(*type_label)) {
                intent.query_type = *qt;
            } else {
                intent.query_type = QueryType::other;
                log_.warn("unrecognized query type '" + trim(*type_label) +
                          "', falling back to 'other'");
            }
            return intent;
        };
        if (auto intent = attempt()) return *intent;
        log_.warn("intent classification reply was unparseable; re-asking once");
        if (auto intent = attempt()) return *intent;
        throw ClassificationError("intent classification failed: reply did not contain "
                                  "Research Domain / Query Type / Research Topic lines");
    }

    RewrittenQuery maybe_rewrite(const std::string& q_e, const Intent& intent) const {
        std::string q = trim(q_e);
        if (q.empty()) throw InputError("query is empty");
        ChatResponse resp =
            ask(prompts::kRewriteSystem,
                substitute(prompts::kRewriteUser, {{"QUERY", q},
                                                   {"DOMAIN", intent.domain},
                                                   {"QUERY_TYPE", to_string(intent.query_type)},
                                                   {"TOPIC", intent.topic}}));
        RewrittenQuery out;
        out.original = q;
        out.translated = q;
        auto needed = parse_labeled_line(resp.content, "Rewrite Needed");
        auto rewritten = parse_labeled_line(resp.content, "Rewritten Query");
        bool wants_rewrite = needed && to_lower(trim(*needed)).starts_with("yes");
        if (wants_rewrite && rewritten && !trim(*rewritten).empty() &&
            trim(*rewritten) != q) {
            out.rewritten = trim(*rewritten);
            out.was_rewritten = true;
        } else {
            if (wants_rewrite)
                log_.warn("rewrite requested but reply carried no usable rewritten query; "
                          "keeping original");
            out.rewritten = q;
            out.was_rewritten = false;
        }
        return out;
    }

    /// Full interpreter stage: Q -> (Q_R, I).  When query understanding is
    /// disabled, the raw query passes through with a neutral default intent
    /// and no gateway calls are made.
    std::pair<RewrittenQuery, Intent> interpret(const std::string& query) const {
        std::string q = trim(query);
        if (q.empty()) throw InputError("query is empty");
        if (!cfg_.do_query_understanding) {
            Intent intent;
            intent.domain = "general";
            intent.query_type = QueryType::survey;
            intent.topic = q;
            RewrittenQuery rq;
            rq.original = q;
            rq.translated = q;
            rq.rewritten = q;
            rq.was_rewritten = false;
            return {rq, intent};
        }
        std::string q_e = detect_and_translate(q);
        Intent intent = classify_intent(q_e);
        RewrittenQuery rq = maybe_rewrite(q_e, intent);
        rq.original = q;
        rq.translated = q_e;
        return {rq, intent};
    }

private:
    ChatResponse ask(const std::string& system, const std::string& user) const {
        ChatRequest req;
        req.model = cfg_.section_writer_model;
        req.messages = {{"system", system}, {"user", user}};
        req.temperature = cfg_.generation_temperature;
        req.max_tokens = cfg_.max_output_tokens;
        return gateway_.complete(cfg_.chat_endpoint, req);
    }

    Gateway& gateway_;
    const RunConfig& cfg_;
    Logger& log_;
};

}  // namespace scisage
