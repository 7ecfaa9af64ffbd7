// coplan - co-simulation planning toolkit
//
// Subcommands: ingest, recommend, validate, autofix, run, query, export-meta.
// Exit status: 0 success/passed, 1 validation failed, 2 usage or input error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>

#include "coplan/catalog.hpp"
#include "coplan/info_model.hpp"
#include "coplan/kernel.hpp"
#include "coplan/recommender.hpp"
#include "coplan/scenario.hpp"
#include "coplan/topics.hpp"
#include "coplan/triple_store.hpp"
#include "coplan/units.hpp"
#include "coplan/validator.hpp"

namespace fs = std::filesystem;
using namespace coplan;

namespace {

struct CommonOpts {
    std::string catalog_path;
    std::string info_model_path;
    std::string scenario_path;
    std::string store_path;
    std::string taxonomy_path;
    std::string out_dir = ".";
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--catalog", o.catalog_path, "catalog file");
    cmd->add_option("--info-model", o.info_model_path, "information model file");
    cmd->add_option("--scenario", o.scenario_path, "scenario file");
    cmd->add_option("--store", o.store_path, "pre-built N-Triples store file");
    cmd->add_option("--taxonomy", o.taxonomy_path, "topic taxonomy file");
    cmd->add_option("--out-dir", o.out_dir, "output directory");
}

bool use_color() {
    return std::getenv("COPLAN_NO_COLOR") == nullptr && isatty(1);
}

std::string paint(const std::string& text, const char* code) {
    if (!use_color()) return text;
    return std::string("\033[") + code + "m" + text + "\033[0m";
}

struct Inputs {
    Taxonomy taxonomy;
    bool have_taxonomy = false;
    std::optional<Catalog> catalog;
    std::optional<InfoModel> info_model;
    std::optional<Scenario> scenario;
    TripleStore store;

    const Taxonomy* tax() const { return have_taxonomy ? &taxonomy : nullptr; }
};

Inputs load_inputs(const CommonOpts& o, bool want_scenario = true) {
    Inputs in;
    if (!o.taxonomy_path.empty()) {
        in.taxonomy = Taxonomy::load(o.taxonomy_path);
        in.have_taxonomy = true;
    }
    if (!o.store_path.empty()) in.store = TripleStore::load(o.store_path);
    if (!o.catalog_path.empty()) {
        std::vector<std::string> warnings;
        in.catalog = load_catalog(o.catalog_path, in.tax(), UnitTable::builtin(), &warnings);
        for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
        in.store.insert_all(to_triples(*in.catalog));
    }
    if (!o.info_model_path.empty()) {
        in.info_model = load_info_model(o.info_model_path, in.tax());
        for (const auto& w : in.info_model->warnings) std::cerr << "warning: " << w << "\n";
        in.store.insert_all(to_triples(*in.info_model));
    }
    if (want_scenario && !o.scenario_path.empty()) {
        if (!in.catalog) throw Error("--scenario requires --catalog");
        in.scenario = load_scenario(o.scenario_path, *in.catalog);
        in.store.insert_all(to_triples(*in.scenario));
    }
    return in;
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
}

int cmd_ingest(const CommonOpts& o, const std::string& out_file) {
    Inputs in = load_inputs(o);
    if (in.store.size() == 0) throw Error("nothing to ingest: give --catalog/--info-model/--scenario");
    fs::path out = out_file.empty() ? fs::path(o.out_dir) / "store.nt" : fs::path(out_file);
    write_file(out, in.store.serialize());
    std::cout << in.store.size() << " triples -> " << out.string() << "\n";
    return 0;
}

int cmd_recommend(const CommonOpts& o, const std::string& attribute, MatchWeights weights,
                  bool via_store) {
    Inputs in = load_inputs(o, false);
    if (!in.info_model) throw Error("recommend requires --info-model");
    if (!in.catalog && !via_store) throw Error("recommend requires --catalog (or --store with --via-store)");
    AttrRef ref = parse_attr_ref(attribute, 0);
    auto recs = via_store
                    ? recommend_via_store(*in.info_model, ref, in.store, in.taxonomy, weights)
                    : recommend(*in.info_model, ref, *in.catalog, in.taxonomy, weights);

    std::cout << paint("score  component            variable         unit topic range", "1") << "\n";
    for (const auto& r : recs) {
        char line[256];
        std::snprintf(line, sizeof(line), "%.3f  %-20s %-16s %.2f %.2f  %.2f   %s", r.score,
                      r.component.c_str(), r.variable.c_str(), r.unit_score, r.topic_score,
                      r.range_score, r.explanation.c_str());
        std::cout << line << "\n";
    }
    auto comp = component_scores(recs);
    if (!comp.empty()) {
        std::cout << "component scores (max over variables):\n";
        for (const auto& [id, score] : comp) std::cout << "  " << id << " " << fmt_number(score) << "\n";
    }
    fs::path report = fs::path(o.out_dir) / ("recommend_" + ref.object + "." + ref.attribute + ".txt");
    write_file(report, render_report(recs));
    std::cout << "report -> " << report.string() << "\n";
    return 0;
}

int cmd_validate(const CommonOpts& o) {
    Inputs in = load_inputs(o);
    if (!in.scenario) throw Error("validate requires --scenario and --catalog");
    ValidationReport report =
        validate(*in.scenario, *in.catalog, in.info_model ? &*in.info_model : nullptr, in.tax());
    for (const auto& f : report.findings) {
        const char* color = f.severity == Severity::error ? "31" : "33";
        std::cout << paint(to_string(f.severity), color) << " " << f.code << " " << f.location
                  << " " << f.message << "\n";
    }
    std::cout << (report.passed ? "passed" : "failed") << " (" << report.findings.size()
              << " finding(s))\n";
    return report.passed ? 0 : 1;
}

int cmd_autofix(const CommonOpts& o, const std::string& out_file) {
    Inputs in = load_inputs(o);
    if (!in.scenario) throw Error("autofix requires --scenario and --catalog");
    Scenario fixed = autofix_units(*in.scenario, *in.catalog);
    fs::path out = out_file.empty() ? fs::path(o.out_dir) / (fixed.name + "-fixed.scn")
                                    : fs::path(out_file);
    write_file(out, write_scenario(fixed));
    std::cout << "fixed scenario -> " << out.string() << "\n";
    return 0;
}

int cmd_run(const CommonOpts& o, long duration_s, bool force) {
    Inputs in = load_inputs(o);
    if (!in.scenario) throw Error("run requires --scenario and --catalog");
    ValidationReport report =
        validate(*in.scenario, *in.catalog, in.info_model ? &*in.info_model : nullptr, in.tax());
    if (!report.passed && !force) {
        std::cout << render_report(report);
        std::cout << "validation failed; use --force to run anyway\n";
        return 1;
    }
    RunResult result =
        run(*in.scenario, *in.catalog, duration_s, in.info_model ? &*in.info_model : nullptr);

    write_file(fs::path(o.out_dir) / "samples.csv", render_samples_csv(result));
    std::string criteria_text;
    for (const auto& [name, value] : result.criteria)
        criteria_text += name + " " + fmt_number(value) + "\n";
    write_file(fs::path(o.out_dir) / "criteria.txt", criteria_text);
    write_file(fs::path(o.out_dir) / "results.nt", results_to_triples(result).serialize());

    std::cout << result.samples.size() << " samples recorded\n";
    for (const auto& [name, value] : result.criteria)
        std::cout << name << " = " << fmt_number(value) << "\n";
    std::cout << "outputs -> " << (fs::path(o.out_dir) / "samples.csv").string() << ", criteria.txt, results.nt\n";
    return 0;
}

int cmd_query(const CommonOpts& o, const std::string& name, const std::string& arg) {
    Inputs in = load_inputs(o);
    const TripleStore& store = in.store;
    if (name == "components-by-domain") {
        if (arg.empty()) throw Error("components-by-domain requires a domain term");
        auto res = store.query(
            {{var("c"), PatternSlot{iri(vocab::isA)}, PatternSlot{literal("component")}},
             {var("c"), PatternSlot{iri(vocab::inDomain)},
              PatternSlot{iri(mint_iri("domain", arg))}}});
        for (const auto& row : res.rows)
            std::cout << unmint_iri("component", row.at("c").value).value_or(row.at("c").value)
                      << "\n";
    } else if (name == "criteria-with-sources") {
        auto res = store.query({{var("t"), PatternSlot{iri(vocab::transformOutput)}, var("c")},
                                {var("t"), PatternSlot{iri(vocab::transformInput)}, var("a")}});
        for (const auto& row : res.rows)
            std::cout << unmint_iri("criterion", row.at("c").value).value_or(row.at("c").value)
                      << " <- "
                      << unmint_iri("attribute", row.at("a").value).value_or(row.at("a").value)
                      << "\n";
    } else if (name == "variables-by-dimension") {
        if (arg.empty()) throw Error("variables-by-dimension requires a unit expression");
        UnitSpec wanted = parse_unit(arg);
        // conjunctive query plus dimension post-filter (the query subset has
        // no numeric built-ins)
        auto res = store.query({{var("v"), PatternSlot{iri(vocab::isA)},
                                 PatternSlot{literal("variable")}},
                                {var("v"), PatternSlot{iri(vocab::hasUnit)}, var("u")}});
        for (const auto& row : res.rows) {
            UnitSpec u = parse_unit(row.at("u").value);
            if (same_dimension(u, wanted))
                std::cout << unmint_iri("variable", row.at("v").value).value_or(row.at("v").value)
                          << " " << row.at("u").value << "\n";
        }
    } else if (name == "attributes-without-candidate") {
        if (!in.info_model) throw Error("attributes-without-candidate requires --info-model");
        bool any = false;
        for (const auto& d : in.info_model->domains)
            for (const auto& obj : d.objects)
                for (const auto& a : obj.attributes) {
                    AttrRef ref{obj.name, a.name};
                    auto recs = recommend_via_store(*in.info_model, ref, store, in.taxonomy);
                    if (recs.empty()) {
                        std::cout << ref.str() << "\n";
                        any = true;
                    }
                }
        if (!any) std::cout << "(none)\n";
    } else {
        throw Error("unknown query '" + name +
                    "'; available: components-by-domain <term>, attributes-without-candidate, "
                    "criteria-with-sources, variables-by-dimension <unit-expr>");
    }
    return 0;
}

int cmd_export_meta(const CommonOpts& o, const std::string& component) {
    Inputs in = load_inputs(o, false);
    if (!in.catalog) throw Error("export-meta requires --catalog");
    bool found = false;
    for (const auto& c : in.catalog->components) {
        if (!component.empty() && c.id != component) continue;
        found = true;
        fs::path out = fs::path(o.out_dir) / (c.id + ".meta.json");
        write_file(out, export_meta(c));
        std::cout << c.id << " -> " << out.string() << "\n";
    }
    if (!found) throw Error("unknown component '" + component + "'");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"co-simulation planning toolkit"};
    app.require_subcommand(1);

    CommonOpts opts;

    auto* ingest = app.add_subcommand("ingest", "merge inputs into an N-Triples store file");
    add_common(ingest, opts);
    std::string ingest_out;
    ingest->add_option("--out", ingest_out, "store output file (default <out-dir>/store.nt)");

    auto* rec = app.add_subcommand("recommend", "rank catalog variables for an attribute");
    add_common(rec, opts);
    std::string rec_attr;
    rec->add_option("attribute", rec_attr, "<object>.<attribute>")->required();
    MatchWeights weights;
    rec->add_option("--w-unit", weights.unit, "unit aspect weight");
    rec->add_option("--w-topic", weights.topic, "topic aspect weight");
    rec->add_option("--w-range", weights.range, "range aspect weight");
    bool via_store = false;
    rec->add_flag("--via-store", via_store, "evaluate over the triple store instead of in memory");

    auto* val = app.add_subcommand("validate", "check a scenario for coherence");
    add_common(val, opts);

    auto* fix = app.add_subcommand("autofix", "insert missing unit transforms");
    add_common(fix, opts);
    std::string fix_out;
    fix->add_option("--out", fix_out, "fixed scenario output file");

    auto* runc = app.add_subcommand("run", "execute a scenario on the built-in kernel");
    add_common(runc, opts);
    long duration = 0;
    runc->add_option("--duration", duration, "duration in seconds")->required();
    bool force = false;
    runc->add_flag("--force", force, "run even if validation fails");

    auto* query = app.add_subcommand("query", "run a predefined query");
    add_common(query, opts);
    std::string query_name, query_arg;
    query->add_option("name", query_name, "query name")->required();
    query->add_option("arg", query_arg, "query argument");

    auto* meta = app.add_subcommand("export-meta", "export component meta descriptions");
    add_common(meta, opts);
    std::string meta_component;
    meta->add_option("--component", meta_component, "only this component id");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*ingest) return cmd_ingest(opts, ingest_out);
        if (*rec) return cmd_recommend(opts, rec_attr, weights, via_store);
        if (*val) return cmd_validate(opts);
        if (*fix) return cmd_autofix(opts, fix_out);
        if (*runc) return cmd_run(opts, duration, force);
        if (*query) return cmd_query(opts, query_name, query_arg);
        if (*meta) return cmd_export_meta(opts, meta_component);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
