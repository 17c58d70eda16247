#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "scisage/serialization.hpp"
#include "scisage/types.hpp"

namespace scisage {

// ---------------------------------------------------------------------------
// Flat key/value config files
//
// Format: one `key: value` (or `key = value`) pair per line; `#` starts a
// comment; blank lines ignored.  Lists accept `[a, b, c]` or a bare
// comma-separated form.  Booleans accept true/false/True/False.
// ---------------------------------------------------------------------------

namespace cfgdetail {

inline bool parse_bool(const std::string& raw, const std::string& key) {
    std::string v = to_lower(trim(raw));
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError("config key '" + key + "': expected a boolean, got '" + raw + "'");
}

inline int parse_int(const std::string& raw, const std::string& key) {
    try {
        std::size_t used = 0;
        int v = std::stoi(trim(raw), &used);
        if (used != trim(raw).size()) throw std::invalid_argument("trailing");
        return v;
    } catch (...) {
        throw ConfigError("config key '" + key + "': expected an integer, got '" + raw + "'");
    }
}

inline double parse_double(const std::string& raw, const std::string& key) {
    try {
        std::size_t used = 0;
        double v = std::stod(trim(raw), &used);
        if (used != trim(raw).size()) throw std::invalid_argument("trailing");
        return v;
    } catch (...) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + raw + "'");
    }
}

inline std::vector<std::string> parse_list(const std::string& raw) {
    std::string v = trim(raw);
    if (!v.empty() && v.front() == '[' && v.back() == ']') v = v.substr(1, v.size() - 2);
    std::vector<std::string> out;
    for (auto& piece : split(v, ',')) {
        std::string item = trim(piece);
        if (!item.empty() && item.front() == '"' && item.back() == '"' && item.size() >= 2)
            item = item.substr(1, item.size() - 2);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline std::string render_list(const std::vector<std::string>& items) {
    return "[" + join(items, ", ") + "]";
}

inline std::string render_bool(bool b) { return b ? "true" : "false"; }

inline std::string render_double(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace cfgdetail

/// Applies one `key`/`value` pair onto `cfg`.  Unknown keys raise ConfigError.
inline void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
    using namespace cfgdetail;
    if (key == "search_url")
        cfg.search_url = parse_list(value);
    else if (key == "chat_endpoint")
        cfg.chat_endpoint = trim(value);
    else if (key == "api_key_env")
        cfg.api_key_env = trim(value);
    else if (key == "outline_max_reflections")
        cfg.outline_max_reflections = parse_int(value, key);
    else if (key == "outline_max_sections")
        cfg.outline_max_sections = parse_int(value, key);
    else if (key == "outline_min_depth")
        cfg.outline_min_depth = parse_int(value, key);
    else if (key == "outline_generate_models")
        cfg.outline_generate_models = parse_list(value);
    else if (key == "section_writer_model")
        cfg.section_writer_model = trim(value);
    else if (key == "do_section_reflection")
        cfg.do_section_reflection = parse_bool(value, key);
    else if (key == "section_reflection_model")
        cfg.section_reflection_model = trim(value);
    else if (key == "section_reflection_max_turns")
        cfg.section_reflection_max_turns = parse_int(value, key);
    else if (key == "do_global_reflection")
        cfg.do_global_reflection = parse_bool(value, key);
    else if (key == "global_reflection_max_turns")
        cfg.global_reflection_max_turns = parse_int(value, key);
    else if (key == "global_abstract_conclusion_max_turns")
        cfg.global_abstract_conclusion_max_turns = parse_int(value, key);
    else if (key == "do_query_understanding")
        cfg.do_query_understanding = parse_bool(value, key);
    else if (key == "judge_model")
        cfg.judge_model = trim(value);
    else if (key == "rate_limit_per_sec")
        cfg.rate_limit_per_sec = parse_double(value, key);
    else if (key == "max_retries")
        cfg.max_retries = parse_int(value, key);
    else if (key == "backoff_initial_ms")
        cfg.backoff_initial_ms = parse_int(value, key);
    else if (key == "backoff_factor")
        cfg.backoff_factor = parse_double(value, key);
    else if (key == "generation_temperature")
        cfg.generation_temperature = parse_double(value, key);
    else if (key == "max_output_tokens")
        cfg.max_output_tokens = parse_int(value, key);
    else if (key == "w_relevance")
        cfg.w_relevance = parse_double(value, key);
    else if (key == "w_recency")
        cfg.w_recency = parse_double(value, key);
    else if (key == "w_venue")
        cfg.w_venue = parse_double(value, key);
    else if (key == "w_author")
        cfg.w_author = parse_double(value, key);
    else if (key == "w_citation")
        cfg.w_citation = parse_double(value, key);
    else if (key == "recency_window_years")
        cfg.recency_window_years = parse_int(value, key);
    else if (key == "citation_cap")
        cfg.citation_cap = parse_int(value, key);
    else if (key == "author_hindex_cap")
        cfg.author_hindex_cap = parse_double(value, key);
    else if (key == "limit_per_query")
        cfg.limit_per_query = parse_int(value, key);
    else if (key == "section_top_k")
        cfg.section_top_k = parse_int(value, key);
    else if (key == "do_llm_relevance")
        cfg.do_llm_relevance = parse_bool(value, key);
    else if (key == "search_fixture")
        cfg.search_fixture = trim(value);
    else if (key == "venue_prestige_file")
        cfg.venue_prestige_file = trim(value);
    else if (key == "templates_dir")
        cfg.templates_dir = trim(value);
    else if (key == "glossary")
        cfg.glossary = trim(value);
    else if (key == "max_fulltext_chars")
        cfg.max_fulltext_chars = parse_int(value, key);
    else if (key == "max_visuals_per_section")
        cfg.max_visuals_per_section = parse_int(value, key);
    else if (key == "max_concurrency")
        cfg.max_concurrency = parse_int(value, key);
    else
        throw ConfigError("unknown config key '" + key + "'");
}

/// Parses config text into `cfg` (later lines win over earlier ones).
inline void apply_config_text(RunConfig& cfg, const std::string& text) {
    int lineno = 0;
    for (const auto& raw_line : split_lines(text)) {
        ++lineno;
        std::string line = raw_line;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto sep = line.find(':');
        auto eq = line.find('=');
        if (eq != std::string::npos && (sep == std::string::npos || eq < sep)) sep = eq;
        if (sep == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected 'key: value', got '" + line + "'");
        std::string key = trim(line.substr(0, sep));
        std::string value = trim(line.substr(sep + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        apply_config_entry(cfg, key, value);
    }
}

/// Validates cross-field constraints after all sources are applied.
inline void validate_config(const RunConfig& cfg) {
    auto nonneg_int = [](int v, const char* name) {
        if (v < 0) throw ConfigError(std::string("config key '") + name + "' must be >= 0");
    };
    nonneg_int(cfg.outline_max_reflections, "outline_max_reflections");
    nonneg_int(cfg.section_reflection_max_turns, "section_reflection_max_turns");
    nonneg_int(cfg.global_reflection_max_turns, "global_reflection_max_turns");
    nonneg_int(cfg.global_abstract_conclusion_max_turns, "global_abstract_conclusion_max_turns");
    nonneg_int(cfg.max_retries, "max_retries");
    nonneg_int(cfg.backoff_initial_ms, "backoff_initial_ms");
    if (cfg.outline_max_sections < 1)
        throw ConfigError("config key 'outline_max_sections' must be >= 1");
    if (cfg.outline_min_depth < 1)
        throw ConfigError("config key 'outline_min_depth' must be >= 1");
    if (cfg.outline_generate_models.empty())
        throw ConfigError("config key 'outline_generate_models' must not be empty");
    for (const auto& m : cfg.outline_generate_models)
        if (trim(m).empty())
            throw ConfigError("config key 'outline_generate_models' has an empty entry");
    if (trim(cfg.section_writer_model).empty())
        throw ConfigError("config key 'section_writer_model' must not be empty");
    if (trim(cfg.section_reflection_model).empty())
        throw ConfigError("config key 'section_reflection_model' must not be empty");
    if (trim(cfg.judge_model).empty())
        throw ConfigError("config key 'judge_model' must not be empty");
    if (trim(cfg.chat_endpoint).empty())
        throw ConfigError("config key 'chat_endpoint' must not be empty");
    if (cfg.rate_limit_per_sec <= 0.0)
        throw ConfigError("config key 'rate_limit_per_sec' must be > 0");
    if (cfg.backoff_factor < 1.0)
        throw ConfigError("config key 'backoff_factor' must be >= 1");
    auto nonneg_w = [](double v, const char* name) {
        if (v < 0.0) throw ConfigError(std::string("config key '") + name + "' must be >= 0");
    };
    nonneg_w(cfg.w_relevance, "w_relevance");
    nonneg_w(cfg.w_recency, "w_recency");
    nonneg_w(cfg.w_venue, "w_venue");
    nonneg_w(cfg.w_author, "w_author");
    nonneg_w(cfg.w_citation, "w_citation");
    if (cfg.w_relevance + cfg.w_recency + cfg.w_venue + cfg.w_author + cfg.w_citation <= 0.0)
        throw ConfigError("ranking weights must not all be zero");
    if (cfg.recency_window_years < 1)
        throw ConfigError("config key 'recency_window_years' must be >= 1");
    if (cfg.citation_cap < 1) throw ConfigError("config key 'citation_cap' must be >= 1");
    if (cfg.author_hindex_cap <= 0.0)
        throw ConfigError("config key 'author_hindex_cap' must be > 0");
    if (cfg.limit_per_query < 1) throw ConfigError("config key 'limit_per_query' must be >= 1");
    if (cfg.section_top_k < 1) throw ConfigError("config key 'section_top_k' must be >= 1");
    if (cfg.max_fulltext_chars < 0)
        throw ConfigError("config key 'max_fulltext_chars' must be >= 0");
    if (cfg.max_visuals_per_section < 0)
        throw ConfigError("config key 'max_visuals_per_section' must be >= 0");
    if (cfg.max_concurrency < 1) throw ConfigError("config key 'max_concurrency' must be >= 1");
}

/// Loads configuration with precedence: built-in defaults < file < overrides.
/// Each override is a `key=value` or `key: value` string (e.g. from --set).
inline RunConfig load_config(const std::string& file_path,
                             const std::vector<std::string>& overrides) {
    RunConfig cfg;
    if (!file_path.empty()) {
        if (!std::filesystem::exists(file_path))
            throw ConfigError("config file not found: " + file_path);
        apply_config_text(cfg, read_text_file(file_path));
    }
    for (const auto& ov : overrides) {
        auto sep = ov.find('=');
        auto colon = ov.find(':');
        if (colon != std::string::npos && (sep == std::string::npos || colon < sep)) sep = colon;
        if (sep == std::string::npos)
            throw ConfigError("override must look like key=value, got '" + ov + "'");
        apply_config_entry(cfg, trim(ov.substr(0, sep)), trim(ov.substr(sep + 1)));
    }
    validate_config(cfg);
    return cfg;
}

/// Renders the fully resolved configuration in the same flat file format,
/// with keys in a fixed order so output is reproducible.
inline std::string render_config(const RunConfig& cfg) {
    using namespace cfgdetail;
    std::ostringstream os;
    os << "api_key_env: " << cfg.api_key_env << "\n";
    os << "author_hindex_cap: " << render_double(cfg.author_hindex_cap) << "\n";
    os << "backoff_factor: " << render_double(cfg.backoff_factor) << "\n";
    os << "backoff_initial_ms: " << cfg.backoff_initial_ms << "\n";
    os << "chat_endpoint: " << cfg.chat_endpoint << "\n";
    os << "citation_cap: " << cfg.citation_cap << "\n";
    os << "do_global_reflection: " << render_bool(cfg.do_global_reflection) << "\n";
    os << "do_llm_relevance: " << render_bool(cfg.do_llm_relevance) << "\n";
    os << "do_query_understanding: " << render_bool(cfg.do_query_understanding) << "\n";
    os << "do_section_reflection: " << render_bool(cfg.do_section_reflection) << "\n";
    os << "generation_temperature: " << render_double(cfg.generation_temperature) << "\n";
    os << "global_abstract_conclusion_max_turns: " << cfg.global_abstract_conclusion_max_turns
       << "\n";
    os << "global_reflection_max_turns: " << cfg.global_reflection_max_turns << "\n";
    os << "glossary: " << cfg.glossary << "\n";
    os << "judge_model: " << cfg.judge_model << "\n";
    os << "limit_per_query: " << cfg.limit_per_query << "\n";
    os << "max_concurrency: " << cfg.max_concurrency << "\n";
    os << "max_fulltext_chars: " << cfg.max_fulltext_chars << "\n";
    os << "max_output_tokens: " << cfg.max_output_tokens << "\n";
    os << "max_retries: " << cfg.max_retries << "\n";
    os << "max_visuals_per_section: " << cfg.max_visuals_per_section << "\n";
    os << "outline_generate_models: " << render_list(cfg.outline_generate_models) << "\n";
    os << "outline_max_reflections: " << cfg.outline_max_reflections << "\n";
    os << "outline_max_sections: " << cfg.outline_max_sections << "\n";
    os << "outline_min_depth: " << cfg.outline_min_depth << "\n";
    os << "rate_limit_per_sec: " << render_double(cfg.rate_limit_per_sec) << "\n";
    os << "recency_window_years: " << cfg.recency_window_years << "\n";
    os << "search_fixture: " << cfg.search_fixture << "\n";
    os << "search_url: " << render_list(cfg.search_url) << "\n";
    os << "section_reflection_max_turns: " << cfg.section_reflection_max_turns << "\n";
    os << "section_reflection_model: " << cfg.section_reflection_model << "\n";
    os << "section_top_k: " << cfg.section_top_k << "\n";
    os << "section_writer_model: " << cfg.section_writer_model << "\n";
    os << "templates_dir: " << cfg.templates_dir << "\n";
    os << "venue_prestige_file: " << cfg.venue_prestige_file << "\n";
    os << "w_author: " << render_double(cfg.w_author) << "\n";
    os << "w_citation: " << render_double(cfg.w_citation) << "\n";
    os << "w_recency: " << render_double(cfg.w_recency) << "\n";
    os << "w_relevance: " << render_double(cfg.w_relevance) << "\n";
    os << "w_venue: " << render_double(cfg.w_venue) << "\n";
    return os.str();
}

}  // namespace scisage
