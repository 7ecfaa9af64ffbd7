#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "coplan/catalog.hpp"
#include "coplan/common.hpp"
#include "coplan/triple_store.hpp"
#include "coplan/units.hpp"
#include "coplan/vocab.hpp"

namespace coplan {

struct SimulatorInstance {
    std::string id;
    std::string component;
    std::map<std::string, std::string> params;  // parameter name -> value text
    long step_s = 1;

    friend bool operator==(const SimulatorInstance&, const SimulatorInstance&) = default;
};

struct Entity {
    std::string id;
    std::string simulator;
    std::string model;

    friend bool operator==(const Entity&, const Entity&) = default;
};

struct Endpoint {
    std::string entity;
    std::string variable;

    std::string str() const { return entity + "." + variable; }

    friend auto operator<=>(const Endpoint&, const Endpoint&) = default;
};

struct Connection {
    Endpoint source;
    Endpoint target;
    bool time_shifted = false;
    std::optional<ConversionFn> transform;

    std::string str() const { return source.str() + "->" + target.str(); }

    friend bool operator==(const Connection& a, const Connection& b) {
        if (!(a.source == b.source && a.target == b.target && a.time_shifted == b.time_shifted))
            return false;
        if (a.transform.has_value() != b.transform.has_value()) return false;
        return !a.transform || (a.transform->factor == b.transform->factor &&
                                a.transform->offset == b.transform->offset);
    }
};

struct Scenario {
    std::string name;
    long base_step_s = 1;
    std::vector<SimulatorInstance> simulators;  // sorted by id
    std::vector<Entity> entities;               // sorted by id
    std::vector<Connection> connections;        // sorted by (source, target)

    const SimulatorInstance* find_simulator(const std::string& id) const {
        for (const auto& s : simulators)
            if (s.id == id) return &s;
        return nullptr;
    }

    const Entity* find_entity(const std::string& id) const {
        for (const auto& e : entities)
            if (e.id == id) return &e;
        return nullptr;
    }

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

namespace detail {

inline void sort_scenario(Scenario& s) {
    std::sort(s.simulators.begin(), s.simulators.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    std::sort(s.entities.begin(), s.entities.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    std::sort(s.connections.begin(), s.connections.end(), [](const auto& a, const auto& b) {
        return std::tie(a.source, a.target) < std::tie(b.source, b.target);
    });
}

/// Referential checks only; semantic checks (causality, units, ranges, cycles)
/// belong to the validator.
inline void check_scenario(const Scenario& s, const Catalog& catalog) {
    if (s.base_step_s < 1) throw Error("base_step must be >= 1");
    std::set<std::string> sim_ids;
    for (const auto& sim : s.simulators) {
        if (!sim_ids.insert(sim.id).second) throw Error("duplicate simulator '" + sim.id + "'");
        const ComponentRecord* comp = catalog.find(sim.component);
        if (!comp)
            throw Error("simulator '" + sim.id + "': unknown component '" + sim.component + "'");
        if (sim.step_s < 1 || sim.step_s % s.base_step_s != 0)
            throw Error("simulator '" + sim.id + "': step " + std::to_string(sim.step_s) +
                        " is not a positive multiple of base step " +
                        std::to_string(s.base_step_s));
        for (const auto& [pname, pvalue] : sim.params) {
            const VariableSpec* v = comp->find_variable(pname);
            if (!v)
                throw Error("simulator '" + sim.id + "': unknown variable '" + pname + "'");
            if (v->is_flow())
                throw Error("simulator '" + sim.id + "': '" + pname +
                            "' is not a parameter-causality variable");
        }
    }
    std::set<std::string> entity_ids;
    for (const auto& e : s.entities) {
        if (!entity_ids.insert(e.id).second) throw Error("duplicate entity '" + e.id + "'");
        if (!s.find_simulator(e.simulator))
            throw Error("entity '" + e.id + "': unknown simulator '" + e.simulator + "'");
    }
    std::set<Endpoint> targets;
    for (const auto& c : s.connections) {
        for (const auto* ep : {&c.source, &c.target}) {
            const Entity* e = s.find_entity(ep->entity);
            if (!e) throw Error("connection " + c.str() + ": unknown entity '" + ep->entity + "'");
            const ComponentRecord* comp = catalog.find(s.find_simulator(e->simulator)->component);
            if (comp && !comp->find_variable(ep->variable))
                throw Error("connection " + c.str() + ": unknown variable '" + ep->variable +
                            "' on component '" + comp->id + "'");
        }
        if (!targets.insert(c.target).second)
            throw Error("duplicate connection target " + c.target.str());
    }
}

inline Endpoint parse_endpoint(std::string_view text, std::size_t lineno) {
    auto dot = text.find('.');
    if (dot == std::string_view::npos || dot == 0 || dot + 1 == text.size())
        throw ParseError(lineno,
                         "endpoint must be <entity>.<variable>: '" + std::string(text) + "'");
    return {std::string(text.substr(0, dot)), std::string(text.substr(dot + 1))};
}

}  // namespace detail

inline Scenario parse_scenario(std::istream& in, const Catalog& catalog) {
    Scenario scn;
    bool seen_header = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto toks = tokens(t);
        const std::string& kw = toks[0];
        if (kw == "scenario") {
            if (toks.size() < 3 || !starts_with(toks[2], "base_step="))
                throw ParseError(lineno, "expected: scenario <name> base_step=<s>");
            scn.name = toks[1];
            scn.base_step_s = static_cast<long>(
                require_number(toks[2].substr(10), lineno, "base_step"));
            seen_header = true;
        } else if (!seen_header) {
            throw ParseError(lineno, "scenario header must come first");
        } else if (kw == "simulator") {
            if (toks.size() < 2) throw ParseError(lineno, "simulator requires an id");
            SimulatorInstance sim;
            sim.id = toks[1];
            bool have_component = false, have_step = false;
            for (std::size_t i = 2; i < toks.size(); ++i) {
                if (starts_with(toks[i], "component=")) {
                    sim.component = toks[i].substr(10);
                    have_component = true;
                } else if (starts_with(toks[i], "step=")) {
                    sim.step_s = static_cast<long>(require_number(toks[i].substr(5), lineno, "step"));
                    have_step = true;
                } else if (toks[i] == "param") {
                    if (i + 1 >= toks.size()) throw ParseError(lineno, "param requires name=value");
                    auto eq = toks[i + 1].find('=');
                    if (eq == std::string::npos)
                        throw ParseError(lineno, "param requires name=value");
                    sim.params[toks[i + 1].substr(0, eq)] = toks[i + 1].substr(eq + 1);
                    ++i;
                } else {
                    throw ParseError(lineno, "unexpected token '" + toks[i] + "'");
                }
            }
            if (!have_component || !have_step)
                throw ParseError(lineno, "simulator requires component= and step=");
            scn.simulators.push_back(std::move(sim));
        } else if (kw == "entity") {
            if (toks.size() != 4 || !starts_with(toks[2], "simulator=") ||
                !starts_with(toks[3], "model="))
                throw ParseError(lineno, "expected: entity <id> simulator=<sid> model=<m>");
            scn.entities.push_back({toks[1], toks[2].substr(10), toks[3].substr(6)});
        } else if (kw == "connect") {
            if (toks.size() < 4 || toks[2] != "->")
                throw ParseError(lineno,
                                 "expected: connect <eid>.<var> -> <eid>.<var> "
                                 "[time_shifted] [transform=<factor>[,<offset>]]");
            Connection c;
            c.source = detail::parse_endpoint(toks[1], lineno);
            c.target = detail::parse_endpoint(toks[3], lineno);
            for (std::size_t i = 4; i < toks.size(); ++i) {
                if (toks[i] == "time_shifted") {
                    c.time_shifted = true;
                } else if (starts_with(toks[i], "transform=")) {
                    auto parts = split(toks[i].substr(10), ',');
                    if (parts.empty() || parts.size() > 2)
                        throw ParseError(lineno, "transform must be <factor>[,<offset>]");
                    ConversionFn fn;
                    fn.factor = require_number(parts[0], lineno, "transform factor");
                    fn.offset = parts.size() == 2
                                    ? require_number(parts[1], lineno, "transform offset")
                                    : 0.0;
                    c.transform = fn;
                } else {
                    throw ParseError(lineno, "unexpected token '" + toks[i] + "'");
                }
            }
            scn.connections.push_back(std::move(c));
        } else {
            throw ParseError(lineno, "unknown keyword '" + kw + "'");
        }
    }
    if (!seen_header) throw Error("empty scenario");
    detail::sort_scenario(scn);
    detail::check_scenario(scn, catalog);
    return scn;
}

inline Scenario load_scenario(const std::string& path, const Catalog& catalog) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open scenario: " + path);
    return parse_scenario(in, catalog);
}

inline std::string write_scenario(const Scenario& s) {
    std::string out = "scenario " + s.name + " base_step=" + std::to_string(s.base_step_s) + "\n";
    for (const auto& sim : s.simulators) {
        out += "simulator " + sim.id + " component=" + sim.component +
               " step=" + std::to_string(sim.step_s);
        for (const auto& [k, v] : sim.params) out += " param " + k + "=" + v;
        out += "\n";
    }
    for (const auto& e : s.entities)
        out += "entity " + e.id + " simulator=" + e.simulator + " model=" + e.model + "\n";
    for (const auto& c : s.connections) {
        out += "connect " + c.source.str() + " -> " + c.target.str();
        if (c.time_shifted) out += " time_shifted";
        if (c.transform) {
            out += " transform=" + fmt_number(c.transform->factor);
            if (c.transform->offset != 0.0) out += "," + fmt_number(c.transform->offset);
        }
        out += "\n";
    }
    return out;
}

inline TripleStore to_triples(const Scenario& s) {
    TripleStore store;
    auto lit = [](const std::string& v) { return literal(v); };
    Term scn = iri(mint_iri("scenario", s.name));
    store.insert(scn, iri(vocab::isA), lit("scenario"));
    store.insert(scn, iri(vocab::baseStepSeconds), lit(std::to_string(s.base_step_s)));
    for (const auto& sim : s.simulators) {
        Term st = iri(mint_iri("simulator", sim.id));
        store.insert(scn, iri(vocab::hasSimulator), st);
        store.insert(st, iri(vocab::isA), lit("simulator"));
        store.insert(st, iri(vocab::instanceOf), iri(mint_iri("component", sim.component)));
        store.insert(st, iri(vocab::stepSeconds), lit(std::to_string(sim.step_s)));
        for (const auto& [k, v] : sim.params)
            store.insert(st, iri(vocab::hasParam), lit(k + "=" + v));
    }
    for (const auto& e : s.entities) {
        Term et = iri(mint_iri("entity", e.id));
        store.insert(scn, iri(vocab::hasEntity), et);
        store.insert(et, iri(vocab::isA), lit("entity"));
        store.insert(et, iri(vocab::ofSimulator), iri(mint_iri("simulator", e.simulator)));
        store.insert(et, iri(vocab::hasModel), lit(e.model));
    }
    for (const auto& c : s.connections) {
        Term ct = iri(mint_iri("connection", c.str()));
        store.insert(scn, iri(vocab::hasConnection), ct);
        store.insert(ct, iri(vocab::isA), lit("connection"));
        store.insert(ct, iri(vocab::connectsFrom), lit(c.source.str()));
        store.insert(ct, iri(vocab::connectsTo), lit(c.target.str()));
        store.insert(ct, iri(vocab::timeShifted), lit(c.time_shifted ? "true" : "false"));
        if (c.transform) {
            store.insert(ct, iri(vocab::transformFactor), lit(fmt_number(c.transform->factor)));
            if (c.transform->offset != 0.0)
                store.insert(ct, iri(vocab::transformOffset),
                             lit(fmt_number(c.transform->offset)));
        }
    }
    return store;
}

inline Scenario scenario_from_triples(const TripleStore& store, const Catalog& catalog) {
    detail::check_known_vocabulary(store);
    auto scns = detail::subjects_of_kind(store, "scenario");
    if (scns.empty()) throw Error("missing mandatory predicate coplan:isA \"scenario\"");
    const std::string& subject = scns.front();
    Scenario s;
    auto name = unmint_iri("scenario", subject);
    if (!name) throw Error("malformed scenario iri <" + subject + ">");
    s.name = *name;
    s.base_step_s = static_cast<long>(
        *parse_number(detail::require_literal(store, subject, vocab::baseStepSeconds)));
    for (const auto& st : detail::objects_of(store, subject, vocab::hasSimulator)) {
        auto id = unmint_iri("simulator", st.value);
        if (!id) throw Error("malformed simulator iri <" + st.value + ">");
        SimulatorInstance sim;
        sim.id = *id;
        auto comps = detail::objects_of(store, st.value, vocab::instanceOf);
        if (comps.empty())
            throw Error("missing mandatory predicate coplan:instanceOf on <" + st.value + ">");
        auto cid = unmint_iri("component", comps.front().value);
        if (!cid) throw Error("malformed component iri <" + comps.front().value + ">");
        sim.component = *cid;
        sim.step_s = static_cast<long>(
            *parse_number(detail::require_literal(store, st.value, vocab::stepSeconds)));
        for (const auto& p : detail::objects_of(store, st.value, vocab::hasParam)) {
            auto eq = p.value.find('=');
            if (eq == std::string::npos) throw Error("malformed param literal '" + p.value + "'");
            sim.params[p.value.substr(0, eq)] = p.value.substr(eq + 1);
        }
        s.simulators.push_back(std::move(sim));
    }
    for (const auto& et : detail::objects_of(store, subject, vocab::hasEntity)) {
        auto id = unmint_iri("entity", et.value);
        if (!id) throw Error("malformed entity iri <" + et.value + ">");
        auto sims = detail::objects_of(store, et.value, vocab::ofSimulator);
        if (sims.empty())
            throw Error("missing mandatory predicate coplan:ofSimulator on <" + et.value + ">");
        auto sid = unmint_iri("simulator", sims.front().value);
        s.entities.push_back({*id, sid.value_or(""),
                              detail::require_literal(store, et.value, vocab::hasModel)});
    }
    for (const auto& ct : detail::objects_of(store, subject, vocab::hasConnection)) {
        Connection c;
        c.source = detail::parse_endpoint(
            detail::require_literal(store, ct.value, vocab::connectsFrom), 0);
        c.target =
            detail::parse_endpoint(detail::require_literal(store, ct.value, vocab::connectsTo), 0);
        c.time_shifted = detail::require_literal(store, ct.value, vocab::timeShifted) == "true";
        if (auto f = detail::literal_of(store, ct.value, vocab::transformFactor)) {
            ConversionFn fn;
            fn.factor = *parse_number(*f);
            fn.offset =
                parse_number(detail::literal_of(store, ct.value, vocab::transformOffset)
                                 .value_or("0"))
                    .value_or(0.0);
            c.transform = fn;
        }
        s.connections.push_back(std::move(c));
    }
    detail::sort_scenario(s);
    detail::check_scenario(s, catalog);
    return s;
}

}  // namespace coplan
