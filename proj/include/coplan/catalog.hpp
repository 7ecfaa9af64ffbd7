#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "coplan/common.hpp"
#include "coplan/info_model.hpp"
#include "coplan/topics.hpp"
#include "coplan/triple_store.hpp"
#include "coplan/units.hpp"
#include "coplan/vocab.hpp"

namespace coplan {

enum class Causality { input, output, parameter, calculatedParameter };
enum class Variability { constant, fixed, discrete, continuous };

inline const char* to_string(Causality c) {
    switch (c) {
        case Causality::input: return "input";
        case Causality::output: return "output";
        case Causality::parameter: return "parameter";
        case Causality::calculatedParameter: return "calculatedParameter";
    }
    return "input";
}

inline const char* to_string(Variability v) {
    switch (v) {
        case Variability::constant: return "constant";
        case Variability::fixed: return "fixed";
        case Variability::discrete: return "discrete";
        case Variability::continuous: return "continuous";
    }
    return "continuous";
}

inline Causality parse_causality(const std::string& s) {
    if (s == "input") return Causality::input;
    if (s == "output") return Causality::output;
    if (s == "parameter") return Causality::parameter;
    if (s == "calculatedParameter") return Causality::calculatedParameter;
    throw Error("invalid causality '" + s +
                "': must be one of input, output, parameter, calculatedParameter");
}

inline Variability parse_variability(const std::string& s) {
    if (s == "constant") return Variability::constant;
    if (s == "fixed") return Variability::fixed;
    if (s == "discrete") return Variability::discrete;
    if (s == "continuous") return Variability::continuous;
    throw Error("invalid variability '" + s +
                "': must be one of constant, fixed, discrete, continuous");
}

/// FMI-style variable declaration of a catalog component.
struct VariableSpec {
    std::string name;
    Causality causality = Causality::input;
    Variability variability = Variability::continuous;
    UnitSpec unit;
    TopicRef topic;
    std::optional<double> min;
    std::optional<double> max;
    std::optional<double> start;

    bool is_flow() const { return causality == Causality::input || causality == Causality::output; }

    friend bool operator==(const VariableSpec& a, const VariableSpec& b) {
        return a.name == b.name && a.causality == b.causality && a.variability == b.variability &&
               a.unit.symbol == b.unit.symbol && a.topic == b.topic && a.min == b.min &&
               a.max == b.max && a.start == b.start;
    }
};

struct GeneralInfo {
    std::string name;
    std::string contact;
    std::string software_type = "simulation_model";
    std::string license;

    friend bool operator==(const GeneralInfo&, const GeneralInfo&) = default;
};

struct TechnicalInfo {
    std::string api = "component_api";
    std::string platform;
    std::string builtin;  // kernel builtin kind; empty means plan-only

    friend bool operator==(const TechnicalInfo&, const TechnicalInfo&) = default;
};

struct MathematicalInfo {
    double temporal_resolution_s = 1.0;
    std::string spatial_resolution;

    friend bool operator==(const MathematicalInfo&, const MathematicalInfo&) = default;
};

struct ComponentRecord {
    std::string id;
    GeneralInfo general;
    TechnicalInfo technical;
    MathematicalInfo mathematical;
    std::vector<TopicRef> domains;
    std::vector<VariableSpec> variables;

    const VariableSpec* find_variable(const std::string& name) const {
        for (const auto& v : variables)
            if (v.name == name) return &v;
        return nullptr;
    }

    friend bool operator==(const ComponentRecord&, const ComponentRecord&) = default;
};

struct Catalog {
    std::vector<ComponentRecord> components;  // sorted by id

    const ComponentRecord* find(const std::string& id) const {
        for (const auto& c : components)
            if (c.id == id) return &c;
        return nullptr;
    }

    friend bool operator==(const Catalog&, const Catalog&) = default;
};

namespace detail {

inline const std::set<std::string>& software_types() {
    static const std::set<std::string> s = {"simulation_model", "modeling_framework",
                                            "data_analysis_tool", "controller"};
    return s;
}

inline const std::set<std::string>& api_kinds() {
    static const std::set<std::string> s = {"component_api", "fmi", "other"};
    return s;
}

/// key=value pairs where values may contain spaces: a new key starts at a
/// whitespace-preceded identifier followed by '='.
inline std::map<std::string, std::string> parse_kv_freetext(std::string_view text,
                                                            std::size_t lineno) {
    auto is_ident = [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
               c == '_';
    };
    std::vector<std::pair<std::size_t, std::size_t>> keys;  // (start, eq position)
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (i != 0 && text[i - 1] != ' ' && text[i - 1] != '\t') continue;
        std::size_t j = i;
        while (j < text.size() && is_ident(text[j])) ++j;
        if (j > i && j < text.size() && text[j] == '=') keys.push_back({i, j});
    }
    if (keys.empty() && !trim(text).empty())
        throw ParseError(lineno, "expected key=value pairs, got '" + std::string(trim(text)) + "'");
    std::map<std::string, std::string> kv;
    for (std::size_t k = 0; k < keys.size(); ++k) {
        auto [start, eq] = keys[k];
        std::size_t value_end = k + 1 < keys.size() ? keys[k + 1].first : text.size();
        std::string key(text.substr(start, eq - start));
        if (kv.count(key)) throw ParseError(lineno, "duplicate key '" + key + "'");
        kv[key] = std::string(trim(text.substr(eq + 1, value_end - eq - 1)));
    }
    return kv;
}

inline void check_component(const ComponentRecord& c) {
    if (!software_types().count(c.general.software_type))
        throw Error("component '" + c.id + "': invalid software_type '" +
                    c.general.software_type + "'");
    if (!api_kinds().count(c.technical.api))
        throw Error("component '" + c.id + "': invalid api '" + c.technical.api +
                    "': must be one of component_api, fmi, other");
    if (!(c.mathematical.temporal_resolution_s > 0))
        throw Error("component '" + c.id + "': temporal_resolution_s must be positive");
    std::set<std::string> names;
    for (const auto& v : c.variables) {
        if (!names.insert(v.name).second)
            throw Error("component '" + c.id + "': duplicate variable '" + v.name + "'");
        if (v.min && v.max && *v.min > *v.max)
            throw Error("component '" + c.id + "': variable '" + v.name + "' has min > max");
        if (v.causality == Causality::parameter && v.variability != Variability::constant &&
            v.variability != Variability::fixed)
            throw Error("component '" + c.id + "': parameter '" + v.name +
                        "' must have constant or fixed variability");
    }
}

}  // namespace detail

inline Catalog parse_catalog(std::istream& in, const Taxonomy* taxonomy = nullptr,
                             const UnitTable& units = UnitTable::builtin(),
                             std::vector<std::string>* warnings = nullptr) {
    Catalog catalog;
    ComponentRecord* comp = nullptr;
    std::set<std::string> ids;

    auto warn = [&](const std::string& msg) {
        if (warnings) warnings->push_back(msg);
    };
    auto resolve_topic = [&](const std::string& term, const std::string& where) {
        TopicRef t{term, !taxonomy || taxonomy->has(term)};
        if (!t.registered) warn("unregistered topic '" + term + "' on " + where);
        return t;
    };

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto sp = t.find_first_of(" \t");
        std::string kw(sp == std::string_view::npos ? t : t.substr(0, sp));
        std::string_view rest = sp == std::string_view::npos ? std::string_view{} : t.substr(sp + 1);
        try {
            if (kw == "component") {
                std::string id(trim(rest));
                if (id.empty()) throw ParseError(lineno, "component requires an id");
                if (!ids.insert(id).second)
                    throw ParseError(lineno, "duplicate component id '" + id + "'");
                catalog.components.push_back({});
                comp = &catalog.components.back();
                comp->id = id;
                comp->general.name = id;
            } else if (!comp) {
                throw ParseError(lineno, "'" + kw + "' outside a component block");
            } else if (kw == "general") {
                auto kv = detail::parse_kv_freetext(rest, lineno);
                if (kv.count("name")) comp->general.name = kv.at("name");
                if (kv.count("contact")) comp->general.contact = kv.at("contact");
                if (kv.count("software_type")) comp->general.software_type = kv.at("software_type");
                if (kv.count("license")) comp->general.license = kv.at("license");
            } else if (kw == "technical") {
                auto kv = detail::parse_kv_freetext(rest, lineno);
                if (kv.count("api")) comp->technical.api = kv.at("api");
                if (kv.count("platform")) comp->technical.platform = kv.at("platform");
                if (kv.count("builtin")) comp->technical.builtin = kv.at("builtin");
            } else if (kw == "mathematical") {
                auto kv = detail::parse_kv_freetext(rest, lineno);
                if (kv.count("temporal_resolution_s"))
                    comp->mathematical.temporal_resolution_s =
                        require_number(kv.at("temporal_resolution_s"), lineno,
                                       "temporal_resolution_s");
                if (kv.count("spatial_resolution"))
                    comp->mathematical.spatial_resolution = kv.at("spatial_resolution");
            } else if (kw == "domains") {
                for (const auto& term : split(std::string(trim(rest)), ','))
                    comp->domains.push_back(
                        resolve_topic(std::string(trim(term)), "component " + comp->id));
            } else if (kw == "variable") {
                auto toks = tokens(rest);
                if (toks.empty()) throw ParseError(lineno, "variable requires a name");
                VariableSpec v;
                v.name = toks[0];
                auto kv = detail::parse_kv_freetext(rest.substr(rest.find(v.name) + v.name.size()),
                                                    lineno);
                if (!kv.count("causality")) throw ParseError(lineno, "variable requires causality=");
                v.causality = parse_causality(kv.at("causality"));
                if (!kv.count("variability"))
                    throw ParseError(lineno, "variable requires variability=");
                v.variability = parse_variability(kv.at("variability"));
                if (!kv.count("unit")) throw ParseError(lineno, "variable requires unit=");
                v.unit = parse_unit(kv.at("unit"), units);
                if (!kv.count("topic")) throw ParseError(lineno, "variable requires topic=");
                v.topic = resolve_topic(kv.at("topic"), "variable " + comp->id + "." + v.name);
                if (kv.count("min")) v.min = require_number(kv.at("min"), lineno, "min");
                if (kv.count("max")) v.max = require_number(kv.at("max"), lineno, "max");
                if (kv.count("start")) v.start = require_number(kv.at("start"), lineno, "start");
                comp->variables.push_back(std::move(v));
            } else {
                throw ParseError(lineno, "unknown keyword '" + kw + "'");
            }
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(lineno, e.what());
        }
    }
    for (auto& c : catalog.components) {
        std::sort(c.variables.begin(), c.variables.end(),
                  [](const auto& a, const auto& b) { return a.name < b.name; });
        detail::check_component(c);
    }
    std::sort(catalog.components.begin(), catalog.components.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    return catalog;
}

inline Catalog load_catalog(const std::string& path, const Taxonomy* taxonomy = nullptr,
                            const UnitTable& units = UnitTable::builtin(),
                            std::vector<std::string>* warnings = nullptr) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open catalog: " + path);
    return parse_catalog(in, taxonomy, units, warnings);
}

inline TripleStore to_triples(const Catalog& catalog) {
    TripleStore store;
    auto lit = [](const std::string& s) { return literal(s); };
    for (const auto& c : catalog.components) {
        Term cterm = iri(mint_iri("component", c.id));
        store.insert(cterm, iri(vocab::isA), lit("component"));
        store.insert(cterm, iri(vocab::hasName), lit(c.general.name));
        if (!c.general.contact.empty())
            store.insert(cterm, iri(vocab::hasContact), lit(c.general.contact));
        store.insert(cterm, iri(vocab::softwareType), lit(c.general.software_type));
        if (!c.general.license.empty())
            store.insert(cterm, iri(vocab::hasLicense), lit(c.general.license));
        store.insert(cterm, iri(vocab::hasApi), lit(c.technical.api));
        if (!c.technical.platform.empty())
            store.insert(cterm, iri(vocab::hasPlatform), lit(c.technical.platform));
        if (!c.technical.builtin.empty())
            store.insert(cterm, iri(vocab::builtinKind), lit(c.technical.builtin));
        store.insert(cterm, iri(vocab::temporalResolution),
                     lit(fmt_number(c.mathematical.temporal_resolution_s)));
        if (!c.mathematical.spatial_resolution.empty())
            store.insert(cterm, iri(vocab::spatialResolution),
                         lit(c.mathematical.spatial_resolution));
        for (const auto& d : c.domains)
            store.insert(cterm, iri(vocab::inDomain), iri(mint_iri("domain", d.term)));
        for (const auto& v : c.variables) {
            Term vterm = iri(mint_iri("variable", c.id + "." + v.name));
            store.insert(cterm, iri(vocab::hasVariable), vterm);
            store.insert(vterm, iri(vocab::isA), lit("variable"));
            store.insert(vterm, iri(vocab::hasCausality), lit(to_string(v.causality)));
            store.insert(vterm, iri(vocab::hasVariability), lit(to_string(v.variability)));
            store.insert(vterm, iri(vocab::hasUnit), lit(v.unit.symbol));
            store.insert(vterm, iri(vocab::hasTopic), lit(v.topic.term));
            if (v.min) store.insert(vterm, iri(vocab::hasMin), lit(fmt_number(*v.min)));
            if (v.max) store.insert(vterm, iri(vocab::hasMax), lit(fmt_number(*v.max)));
            if (v.start) store.insert(vterm, iri(vocab::hasStart), lit(fmt_number(*v.start)));
        }
    }
    return store;
}

inline Catalog catalog_from_triples(const TripleStore& store, const Taxonomy* taxonomy = nullptr,
                                    const UnitTable& units = UnitTable::builtin()) {
    detail::check_known_vocabulary(store);
    Catalog catalog;
    for (const auto& s : detail::subjects_of_kind(store, "component")) {
        auto id = unmint_iri("component", s);
        if (!id) throw Error("malformed component iri <" + s + ">");
        ComponentRecord c;
        c.id = *id;
        c.general.name = detail::require_literal(store, s, vocab::hasName);
        c.general.contact = detail::literal_of(store, s, vocab::hasContact).value_or("");
        c.general.software_type = detail::require_literal(store, s, vocab::softwareType);
        c.general.license = detail::literal_of(store, s, vocab::hasLicense).value_or("");
        c.technical.api = detail::require_literal(store, s, vocab::hasApi);
        c.technical.platform = detail::literal_of(store, s, vocab::hasPlatform).value_or("");
        c.technical.builtin = detail::literal_of(store, s, vocab::builtinKind).value_or("");
        c.mathematical.temporal_resolution_s =
            *parse_number(detail::require_literal(store, s, vocab::temporalResolution));
        c.mathematical.spatial_resolution =
            detail::literal_of(store, s, vocab::spatialResolution).value_or("");
        for (const auto& d : detail::objects_of(store, s, vocab::inDomain)) {
            auto term = unmint_iri("domain", d.value);
            if (!term) throw Error("malformed domain iri <" + d.value + ">");
            c.domains.push_back(TopicRef{*term, !taxonomy || taxonomy->has(*term)});
        }
        for (const auto& vt : detail::objects_of(store, s, vocab::hasVariable)) {
            auto ref = unmint_iri("variable", vt.value);
            if (!ref) throw Error("malformed variable iri <" + vt.value + ">");
            auto dot = ref->find('.');
            VariableSpec v;
            v.name = dot == std::string::npos ? *ref : ref->substr(dot + 1);
            v.causality =
                parse_causality(detail::require_literal(store, vt.value, vocab::hasCausality));
            v.variability =
                parse_variability(detail::require_literal(store, vt.value, vocab::hasVariability));
            v.unit = parse_unit(detail::require_literal(store, vt.value, vocab::hasUnit), units);
            std::string topic = detail::require_literal(store, vt.value, vocab::hasTopic);
            v.topic = {topic, !taxonomy || taxonomy->has(topic)};
            if (auto m = detail::literal_of(store, vt.value, vocab::hasMin)) v.min = *parse_number(*m);
            if (auto m = detail::literal_of(store, vt.value, vocab::hasMax)) v.max = *parse_number(*m);
            if (auto m = detail::literal_of(store, vt.value, vocab::hasStart))
                v.start = *parse_number(*m);
            c.variables.push_back(std::move(v));
        }
        detail::check_component(c);
        catalog.components.push_back(std::move(c));
    }
    std::sort(catalog.components.begin(), catalog.components.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    return catalog;
}

/// Meta-description export: a key-value document with the component's models,
/// their `params` (parameter/calculatedParameter causality) and `attrs`
/// (input/output causality), each annotated with unit, min, max.
inline std::string export_meta(const ComponentRecord& c) {
    using ordered_json = nlohmann::ordered_json;
    auto entry = [](const VariableSpec& v) {
        ordered_json e;
        e["name"] = v.name;
        e["unit"] = v.unit.symbol;
        e["min"] = v.min ? ordered_json(*v.min) : ordered_json(nullptr);
        e["max"] = v.max ? ordered_json(*v.max) : ordered_json(nullptr);
        return e;
    };
    ordered_json model;
    model["name"] = c.general.name;
    model["params"] = ordered_json::array();
    model["attrs"] = ordered_json::array();
    // variables are kept sorted by name, so both lists come out sorted
    for (const auto& v : c.variables)
        (v.is_flow() ? model["attrs"] : model["params"]).push_back(entry(v));
    ordered_json doc;
    doc["type"] = "time-based";
    doc["models"][c.general.name] = model;
    return doc.dump(2) + "\n";
}

}  // namespace coplan
