#pragma once

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "scisage/evaluator.hpp"
#include "scisage/pipeline.hpp"

namespace scisage::cli {

constexpr int kExitOk = 0;
constexpr int kExitUserError = 1;      // bad arguments, config, or input files
constexpr int kExitPipelineError = 2;  // a stage failed during the run

inline GatewayOptions gateway_options_from(const RunConfig& cfg) {
    GatewayOptions opts;
    opts.max_retries = cfg.max_retries;
    opts.backoff_initial_ms = cfg.backoff_initial_ms;
    opts.backoff_factor = cfg.backoff_factor;
    opts.rate_limit_per_sec = cfg.rate_limit_per_sec;
    return opts;
}

/// Builds the transport.  `mock_out` receives the mock transport (when one is
/// used) so callers can dump the transcript afterwards.
inline std::shared_ptr<Transport> make_transport(const RunConfig& cfg,
                                                 const std::string& mock_script_path,
                                                 std::shared_ptr<MockTransport>* mock_out) {
    if (!mock_script_path.empty()) {
        auto mock = std::make_shared<MockTransport>();
        mock->load_script(read_artifact(mock_script_path));
        if (mock_out) *mock_out = mock;
        return mock;
    }
    const char* key = std::getenv(cfg.api_key_env.c_str());
    if (!key || !*key)
        throw InputError("environment variable " + cfg.api_key_env +
                         " is not set (required when --mock-script is not given)");
#ifdef SCISAGE_ENABLE_HTTP
    return std::make_shared<HttpTransport>(cfg.api_key_env);
#else
    throw ConfigError("this build has no HTTP transport; run with --mock-script");
#endif
}

inline std::vector<std::shared_ptr<SourceClient>> make_live_sources(const RunConfig& cfg) {
#ifdef SCISAGE_ENABLE_HTTP
    std::vector<std::shared_ptr<SourceClient>> sources;
    for (const auto& url : cfg.search_url) {
        if (icontains(url, "openalex"))
            sources.push_back(std::make_shared<WorksApiSource>(url));
        else
            sources.push_back(std::make_shared<WebSearchSource>(url, "SCISAGE_SEARCH_API_KEY"));
    }
    return sources;
#else
    (void)cfg;
    throw ConfigError("this build has no HTTP retrieval clients; run with --mock-script");
#endif
}

// ---------------------------------------------------------------------------
// Artifact inspection
// ---------------------------------------------------------------------------

namespace detail {

inline std::string snippet(const std::string& text, std::size_t width = 60) {
    std::string flat = collapse_whitespace(text);
    if (flat.size() <= width) return flat;
    return flat.substr(0, width - 3) + "...";
}

inline void render_outline_tree(const json& j, std::ostream& out) {
    out << j.value("root_title", "(untitled)") << "\n";
    std::function<void(const json&, int)> walk = [&](const json& nodes, int indent) {
        int i = 0;
        for (const auto& n : nodes) {
            ++i;
            out << std::string(static_cast<std::size_t>(indent) * 2, ' ') << i << ". "
                << n.value("title", "(untitled)");
            if (!n.value("is_content", true)) out << "  [structural]";
            if (n.contains("search_queries") && !n["search_queries"].empty())
                out << "  (" << n["search_queries"].size() << " queries)";
            out << "\n";
            if (n.contains("children")) walk(n["children"], indent + 1);
        }
    };
    if (j.contains("sections")) walk(j["sections"], 1);
}

inline void render_reflection_log(const json& j, std::ostream& out) {
    out << "reflection log: level " << j.value("level", "?") << "\n";
    int i = 0;
    for (const auto& rec : j.value("records", json::array())) {
        ++i;
        bool accepted = rec.value("accepted", false);
        std::size_t items = rec.contains("feedback") && rec["feedback"].contains("items")
                                ? rec["feedback"]["items"].size()
                                : 0;
        out << "  trial " << i << ": " << (accepted ? "accept" : "revise") << ", " << items
            << " feedback item(s), artifact " << rec.value("artifact_hash", "?") << "\n";
        const json fb_items = rec.value("feedback", json::object()).value("items", json::array());
        for (const auto& item : fb_items)
            out << "    - [" << item.value("target_path", "root") << "] "
                << snippet(item.value("issue", "")) << "\n";
    }
    if (i == 0) out << "  (no reflections)\n";
}

inline void render_rank_table(const json& j, std::ostream& out) {
    out << "retrieval for node " << j.value("node_ref", "?") << "\n";
    int rank = 0;
    for (const auto& r : j.value("records", json::array())) {
        ++rank;
        out << "  " << std::setw(3) << rank << ". score=" << std::fixed << std::setprecision(4)
            << r.value("composite_score", 0.0) << " year=" << r.value("year", 0) << "  "
            << snippet(r.value("title", "?"), 70) << "\n";
    }
    out.unsetf(std::ios::fixed);
}

inline void render_eval_report(const json& j, std::ostream& out) {
    out << "evaluation report: " << j.value("topic", "?") << "\n";
    out << "  dimension scores (0-100):\n";
    const json dims = j.value("dimensions", json::object());
    for (const auto& [name, score] : dims.items())
        out << "    " << std::setw(20) << std::left << name << std::right << std::fixed
            << std::setprecision(2) << score.value("scaled", 0.0) << "  (raw "
            << score.value("raw", 0.0) << ")\n";
    for (const auto& d : j.value("failed_dimensions", json::array()))
        out << "    " << d.get<std::string>() << ": FAILED\n";
    if (j.value("excluded_items", 0) > 0)
        out << "  excluded judge items: " << j["excluded_items"].get<int>() << "\n";
    if (j.value("reference_evaluated", false)) {
        const json& m = j["reference"];
        out << "  reference accuracy: tp=" << m.value("tp", 0)
            << " precision=" << std::setprecision(4) << m.value("precision", 0.0)
            << " recall=" << m.value("recall", 0.0) << " f1=" << m.value("f1", 0.0) << "\n";
    }
    out.unsetf(std::ios::fixed);
}

inline void render_transcript(const json& j, std::ostream& out) {
    const json& exchanges = j.value("exchanges", json::array());
    out << "transcript: " << exchanges.size() << " exchange(s)\n";
    int i = 0;
    for (const auto& e : exchanges) {
        ++i;
        const json& req = e.value("request", json::object());
        std::string user;
        for (const auto& m : req.value("messages", json::array()))
            if (m.value("role", "") == "user") user = m.value("content", "");
        out << "  " << i << ". model=" << req.value("model", "?")
            << (e.value("failed", false) ? " [failed]" : "") << "  user: " << snippet(user)
            << "\n";
    }
}

inline void render_document_summary(const json& j, std::ostream& out) {
    out << j.value("title", "(untitled)") << "\n";
    out << "  abstract: " << snippet(j.value("abstract", ""), 80) << "\n";
    out << "  sections:\n";
    for (const auto& s : j.value("sections", json::array()))
        out << "    [" << s.value("node_ref", "?") << "] " << s.value("title", "?") << " ("
            << s.value("body", "").size() << " chars, " << s.value("cited_ids", json::array()).size()
            << " citations)\n";
    out << "  references: " << j.value("references", json::array()).size() << "\n";
}

}  // namespace detail

/// Pretty-prints an artifact file according to its "kind" tag.
/// Throws InputError for files this tool does not understand.
inline void inspect_artifact(const std::string& path, std::ostream& out) {
    json j;
    try {
        j = read_artifact(path);
    } catch (const Error& e) {
        throw InputError("cannot inspect '" + path + "': " + e.what());
    }
    const std::string kind = j.is_object() ? j.value("kind", "") : "";
    if (kind == "outline")
        detail::render_outline_tree(j, out);
    else if (kind == "reflection_log")
        detail::render_reflection_log(j, out);
    else if (kind == "retrieval")
        detail::render_rank_table(j, out);
    else if (kind == "eval_report")
        detail::render_eval_report(j, out);
    else if (kind == "transcript")
        detail::render_transcript(j, out);
    else if (kind == "survey_document")
        detail::render_document_summary(j, out);
    else if (kind == "intent" || kind == "mock_script" || kind == "search_fixture" ||
             kind == "outline_template" || kind == "revision_plan" || kind == "section_draft")
        out << j.dump(2) << "\n";
    else
        throw InputError("unrecognized artifact kind in '" + path + "'");
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct GenerateArgs {
    std::string query;
    std::string config_path;
    std::string out_dir;
    std::string mock_script;
    std::vector<std::string> overrides;
    std::string format = "both";  // markdown | latex | both
};

inline int run_generate(const GenerateArgs& args, std::ostream& out, std::ostream& err) {
    Logger log;
    RunConfig cfg;
    std::shared_ptr<MockTransport> mock;
    PipelineEnv env;
    std::shared_ptr<Transport> transport;
    std::unique_ptr<Gateway> gateway;
    // Setup failures are user errors: bad config, bad script, missing secret.
    try {
        if (args.query.empty()) throw InputError("--query must not be empty");
        if (args.out_dir.empty()) throw InputError("--out must not be empty");
        if (args.format != "markdown" && args.format != "latex" && args.format != "both")
            throw InputError("--format must be markdown, latex, or both");
        cfg = load_config(args.config_path, args.overrides);
        transport = make_transport(cfg, args.mock_script, &mock);
        gateway = std::make_unique<Gateway>(transport, gateway_options_from(cfg), &log);
        env.gateway = gateway.get();
        env.log = &log;
        env.sources = mock ? make_mock_sources(cfg) : make_live_sources(cfg);
        env.export_markdown = args.format != "latex";
        env.export_latex = args.format != "markdown";
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUserError;
    }

    const std::filesystem::path out_dir(args.out_dir);
    auto flush_run_records = [&]() {
        try {
            write_text_file(out_dir / "run_log.txt", log.dump());
            write_text_file(out_dir / "config_resolved.cfg", render_config(cfg));
            if (mock) write_artifact(out_dir / "transcript.json", mock->transcript_json());
        } catch (const Error& e) {
            err << "warning: could not write run records: " << e.what() << "\n";
        }
    };

    try {
        PipelineResult result = run_pipeline(args.query, cfg, env, out_dir);
        flush_run_records();
        out << "survey written to " << (out_dir / "document.json").string() << "\n";
        out << "sections: " << result.document.sections.size()
            << ", references: " << result.document.references.size() << "\n";
        return kExitOk;
    } catch (const ConfigError& e) {
        flush_run_records();
        err << "error: " << e.what() << "\n";
        return kExitUserError;
    } catch (const InputError& e) {
        flush_run_records();
        err << "error: " << e.what() << "\n";
        return kExitUserError;
    } catch (const Error& e) {
        flush_run_records();
        err << "pipeline error: " << e.what() << "\n";
        return kExitPipelineError;
    }
}

struct EvaluateArgs {
    std::string doc_path;
    std::string gold_path;
    std::string topic;
    std::string config_path;
    std::string out_dir;
    std::string mock_script;
    std::vector<std::string> overrides;
};

inline int run_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err) {
    Logger log;
    RunConfig cfg;
    SurveyDocument doc;
    std::set<std::string> gold;
    std::shared_ptr<MockTransport> mock;
    std::shared_ptr<Transport> transport;
    std::unique_ptr<Gateway> gateway;
    std::string topic;
    try {
        if (args.doc_path.empty()) throw InputError("--doc must not be empty");
        cfg = load_config(args.config_path, args.overrides);
        doc = survey_document_from_json(read_artifact(args.doc_path));
        if (!args.gold_path.empty()) gold = load_gold_refs(read_text_file(args.gold_path));
        topic = args.topic.empty() ? doc.title : args.topic;
        transport = make_transport(cfg, args.mock_script, &mock);
        gateway = std::make_unique<Gateway>(transport, gateway_options_from(cfg), &log);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUserError;
    }

    try {
        Evaluator evaluator(*gateway, cfg, log);
        EvalReport report = evaluator.evaluate_document(doc, gold, topic);
        if (!args.out_dir.empty()) {
            const std::filesystem::path out_dir(args.out_dir);
            write_artifact(out_dir / "eval_report.json", to_json(report));
            write_text_file(out_dir / "run_log.txt", log.dump());
            if (mock) write_artifact(out_dir / "transcript.json", mock->transcript_json());
            out << "report written to " << (out_dir / "eval_report.json").string() << "\n";
        }
        detail::render_eval_report(to_json(report), out);
        return kExitOk;
    } catch (const Error& e) {
        err << "evaluation error: " << e.what() << "\n";
        return kExitPipelineError;
    }
}

inline int run_inspect(const std::string& path, std::ostream& out, std::ostream& err) {
    try {
        inspect_artifact(path, out);
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUserError;
    }
}

// ---------------------------------------------------------------------------
// Argument parsing
// ---------------------------------------------------------------------------

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-agent scientific survey generation"};
    app.require_subcommand(1);

    GenerateArgs gen;
    CLI::App* generate = app.add_subcommand("generate", "Generate a survey for a query");
    generate->add_option("--query", gen.query, "Research query or topic")->required();
    generate->add_option("--config", gen.config_path, "Config file (flat key: value lines)");
    generate->add_option("--out", gen.out_dir, "Output directory for artifacts")->required();
    generate->add_option("--mock-script", gen.mock_script, "Scripted replies; enables mock mode");
    generate->add_option("--set", gen.overrides, "Override a config key (key=value, repeatable)");
    generate->add_option("--format", gen.format, "Export format: markdown, latex, or both");

    EvaluateArgs ev;
    CLI::App* evaluate = app.add_subcommand("evaluate", "Judge a generated survey document");
    evaluate->add_option("--doc", ev.doc_path, "survey document artifact (JSON)")->required();
    evaluate->add_option("--gold", ev.gold_path, "Gold reference list (one id per line)");
    evaluate->add_option("--topic", ev.topic, "Topic the survey should cover");
    evaluate->add_option("--config", ev.config_path, "Config file");
    evaluate->add_option("--out", ev.out_dir, "Directory for the evaluation report");
    evaluate->add_option("--mock-script", ev.mock_script, "Scripted replies; enables mock mode");
    evaluate->add_option("--set", ev.overrides, "Override a config key (key=value, repeatable)");

    std::string inspect_path;
    CLI::App* inspect = app.add_subcommand("inspect", "Pretty-print a stage artifact");
    inspect->add_option("path", inspect_path, "Artifact file to inspect")->required();

    // CLI11 consumes argv-style reversed vectors; feed it the std::string form.
    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "error: " << e.what() << "\n";
        return kExitUserError;
    }

    if (generate->parsed()) return run_generate(gen, out, err);
    if (evaluate->parsed()) return run_evaluate(ev, out, err);
    if (inspect->parsed()) return run_inspect(inspect_path, out, err);
    err << "error: no command given\n";
    return kExitUserError;
}

}  // namespace scisage::cli
