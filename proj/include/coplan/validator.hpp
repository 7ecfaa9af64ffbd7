#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "coplan/catalog.hpp"
#include "coplan/common.hpp"
#include "coplan/info_model.hpp"
#include "coplan/scenario.hpp"
#include "coplan/topics.hpp"
#include "coplan/units.hpp"

namespace coplan {

enum class Severity { error, warning, info };

inline const char* to_string(Severity s) {
    switch (s) {
        case Severity::error: return "error";
        case Severity::warning: return "warning";
        case Severity::info: return "info";
    }
    return "info";
}

struct Finding {
    Severity severity = Severity::info;
    std::string code;
    std::string location;
    std::string message;
};

struct ValidationReport {
    std::vector<Finding> findings;
    bool passed = true;

    bool has_code(const std::string& code) const {
        for (const auto& f : findings)
            if (f.code == code) return true;
        return false;
    }

    std::vector<std::string> codes() const {
        std::vector<std::string> out;
        for (const auto& f : findings) out.push_back(f.code);
        return out;
    }
};

inline std::string render_report(const ValidationReport& report) {
    std::string out;
    for (const auto& f : report.findings)
        out += std::string(to_string(f.severity)) + " " + f.code + " " + f.location + " " +
               f.message + "\n";
    return out;
}

namespace detail {

struct ResolvedEndpoint {
    const ComponentRecord* component = nullptr;
    const VariableSpec* variable = nullptr;
};

inline ResolvedEndpoint resolve_endpoint(const Scenario& s, const Catalog& catalog,
                                         const Endpoint& ep) {
    const Entity* e = s.find_entity(ep.entity);
    if (!e) return {};
    const SimulatorInstance* sim = s.find_simulator(e->simulator);
    if (!sim) return {};
    const ComponentRecord* comp = catalog.find(sim->component);
    if (!comp) return {};
    return {comp, comp->find_variable(ep.variable)};
}

/// Strongly connected components over entity ids (iterative Tarjan), edges
/// taken from the non-time-shifted connections only.
inline std::vector<std::vector<std::string>> nontrivial_sccs(
    const std::vector<std::string>& nodes,
    const std::map<std::string, std::vector<std::string>>& adj) {
    std::map<std::string, int> index, lowlink;
    std::set<std::string> on_stack;
    std::vector<std::string> stack;
    std::vector<std::vector<std::string>> sccs;
    int next_index = 0;

    struct Frame {
        std::string node;
        std::size_t child = 0;
    };

    for (const auto& root : nodes) {
        if (index.count(root)) continue;
        std::vector<Frame> frames{{root, 0}};
        index[root] = lowlink[root] = next_index++;
        stack.push_back(root);
        on_stack.insert(root);
        while (!frames.empty()) {
            Frame& f = frames.back();
            auto it = adj.find(f.node);
            static const std::vector<std::string> empty;
            const auto& edges = it == adj.end() ? empty : it->second;
            if (f.child < edges.size()) {
                const std::string& next = edges[f.child++];
                if (!index.count(next)) {
                    index[next] = lowlink[next] = next_index++;
                    stack.push_back(next);
                    on_stack.insert(next);
                    frames.push_back({next, 0});
                } else if (on_stack.count(next)) {
                    lowlink[f.node] = std::min(lowlink[f.node], index[next]);
                }
            } else {
                if (lowlink[f.node] == index[f.node]) {
                    std::vector<std::string> scc;
                    while (true) {
                        std::string n = stack.back();
                        stack.pop_back();
                        on_stack.erase(n);
                        scc.push_back(n);
                        if (n == f.node) break;
                    }
                    bool self_loop = false;
                    if (scc.size() == 1) {
                        auto ai = adj.find(scc[0]);
                        if (ai != adj.end())
                            self_loop = std::find(ai->second.begin(), ai->second.end(), scc[0]) !=
                                        ai->second.end();
                    }
                    if (scc.size() > 1 || self_loop) {
                        std::sort(scc.begin(), scc.end());
                        sccs.push_back(std::move(scc));
                    }
                }
                std::string done = f.node;
                frames.pop_back();
                if (!frames.empty())
                    lowlink[frames.back().node] =
                        std::min(lowlink[frames.back().node], lowlink[done]);
            }
        }
    }
    std::sort(sccs.begin(), sccs.end());
    return sccs;
}

struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
};

inline Interval variable_interval(const VariableSpec& v, const std::optional<ConversionFn>& conv) {
    Interval r;
    if (v.min) r.lo = conv ? (*conv)(*v.min) : *v.min;
    if (v.max) r.hi = conv ? (*conv)(*v.max) : *v.max;
    if (r.lo > r.hi) std::swap(r.lo, r.hi);
    return r;
}

}  // namespace detail

/// Applies every registered check (E001-E007, W001-W005); findings sorted by
/// (severity, code, location). W004 coverage runs only when an info model is
/// supplied.
inline ValidationReport validate(const Scenario& scenario, const Catalog& catalog,
                                 const InfoModel* info_model = nullptr,
                                 const Taxonomy* taxonomy = nullptr) {
    ValidationReport report;
    auto add = [&](Severity sev, const char* code, const std::string& location,
                   const std::string& message) {
        report.findings.push_back({sev, code, location, message});
    };

    // E005: dangling references at any level.
    std::set<std::string> broken_entities;
    for (const auto& sim : scenario.simulators) {
        if (!catalog.find(sim.component))
            add(Severity::error, "E005", "simulator " + sim.id,
                "unknown component '" + sim.component + "'");
    }
    for (const auto& e : scenario.entities) {
        const SimulatorInstance* sim = scenario.find_simulator(e.simulator);
        if (!sim) {
            add(Severity::error, "E005", "entity " + e.id,
                "unknown simulator '" + e.simulator + "'");
            broken_entities.insert(e.id);
        } else if (!catalog.find(sim->component)) {
            broken_entities.insert(e.id);  // root cause already reported on the simulator
        }
    }

    for (const auto& c : scenario.connections) {
        const std::string loc = "connection " + c.str();
        bool broken = false;
        for (const auto* ep : {&c.source, &c.target}) {
            if (!scenario.find_entity(ep->entity)) {
                add(Severity::error, "E005", loc, "unknown entity '" + ep->entity + "'");
                broken = true;
            } else if (broken_entities.count(ep->entity)) {
                broken = true;
            } else if (!detail::resolve_endpoint(scenario, catalog, *ep).variable) {
                add(Severity::error, "E005", loc, "unknown variable '" + ep->str() + "'");
                broken = true;
            }
        }
        if (broken) continue;

        const VariableSpec& src = *detail::resolve_endpoint(scenario, catalog, c.source).variable;
        const VariableSpec& tgt = *detail::resolve_endpoint(scenario, catalog, c.target).variable;

        if (src.causality != Causality::output)
            add(Severity::error, "E001", loc,
                "source variable has causality " + std::string(to_string(src.causality)) +
                    ", expected output");
        if (tgt.causality != Causality::input)
            add(Severity::error, "E002", loc,
                "target variable has causality " + std::string(to_string(tgt.causality)) +
                    ", expected input");

        if (!same_dimension(src.unit, tgt.unit)) {
            add(Severity::error, "E003", loc,
                "connected variables have different dimensions: " + src.unit.symbol + " " +
                    src.unit.dimension.str() + " vs " + tgt.unit.symbol + " " +
                    tgt.unit.dimension.str());
        } else {
            ConversionFn expected = conversion(src.unit, tgt.unit);
            if (!same_unit(src.unit, tgt.unit) && !c.transform)
                add(Severity::warning, "W001", loc,
                    "units differ (" + src.unit.symbol + " -> " + tgt.unit.symbol +
                        ") and no transform declared; required conversion factor " +
                        fmt_number(expected.factor) +
                        (expected.offset != 0.0 ? ", offset " + fmt_number(expected.offset) : ""));
            if (c.transform &&
                (!nearly_equal(c.transform->factor, expected.factor, 1e-9) ||
                 !nearly_equal(c.transform->offset, expected.offset, 1e-9)))
                add(Severity::error, "E007", loc,
                    "declared transform (x" + fmt_number(c.transform->factor) + "+" +
                        fmt_number(c.transform->offset) + ") contradicts unit conversion (x" +
                        fmt_number(expected.factor) + "+" + fmt_number(expected.offset) + ")");

            detail::Interval s = detail::variable_interval(src, expected);
            detail::Interval t = detail::variable_interval(tgt, std::nullopt);
            bool src_bounded = src.min || src.max;
            bool tgt_bounded = tgt.min || tgt.max;
            if (src_bounded && tgt_bounded) {
                if (s.hi < t.lo || s.lo > t.hi)
                    add(Severity::error, "E004", loc,
                        "source range [" + fmt_number(s.lo) + "," + fmt_number(s.hi) +
                            "] disjoint from target range [" + fmt_number(t.lo) + "," +
                            fmt_number(t.hi) + "]");
                else if (!(s.lo >= t.lo && s.hi <= t.hi))
                    add(Severity::warning, "W002", loc,
                        "source range [" + fmt_number(s.lo) + "," + fmt_number(s.hi) +
                            "] only partially overlaps target range [" + fmt_number(t.lo) + "," +
                            fmt_number(t.hi) + "]");
            }
        }

        if (c.time_shifted && !src.start)
            add(Severity::warning, "W005", loc,
                "time-shifted source '" + c.source.str() +
                    "' has no start value; 0 will be used at t=0");
    }

    // W003: declared inputs with no incoming connection.
    for (const auto& e : scenario.entities) {
        if (broken_entities.count(e.id)) continue;
        const SimulatorInstance* sim = scenario.find_simulator(e.simulator);
        const ComponentRecord* comp = sim ? catalog.find(sim->component) : nullptr;
        if (!comp) continue;
        for (const auto& v : comp->variables) {
            if (v.causality != Causality::input) continue;
            bool connected = false;
            for (const auto& c : scenario.connections)
                if (c.target.entity == e.id && c.target.variable == v.name) connected = true;
            if (!connected)
                add(Severity::warning, "W003", "variable " + e.id + "." + v.name,
                    "declared input has no incoming connection");
        }
    }

    // E006: connection cycles not broken by a time-shifted edge.
    {
        std::vector<std::string> nodes;
        for (const auto& e : scenario.entities) nodes.push_back(e.id);
        std::map<std::string, std::vector<std::string>> adj;
        for (const auto& c : scenario.connections)
            if (!c.time_shifted && scenario.find_entity(c.source.entity) &&
                scenario.find_entity(c.target.entity))
                adj[c.source.entity].push_back(c.target.entity);
        for (const auto& scc : detail::nontrivial_sccs(nodes, adj)) {
            std::string members;
            for (std::size_t i = 0; i < scc.size(); ++i) {
                if (i) members += ',';
                members += scc[i];
            }
            add(Severity::error, "E006", "cycle " + members,
                "connection cycle contains no time_shifted edge");
        }
    }

    // W004: required information-model flows with no realizing component in
    // the scenario. A derived attribute needs a producing output variable, an
    // input attribute a consuming input variable, matched by (same dimension
    // and topic exact-or-ancestor). Unconnected inputs are W003's business.
    if (info_model) {
        for (const auto& flow : required_flows(*info_model)) {
            const Attribute* attr = info_model->find_attribute(flow.attribute);
            if (!attr) continue;  // load_info_model guarantees resolution
            Causality wanted =
                attr->role == AttributeRole::derived ? Causality::output : Causality::input;
            bool realized = false;
            for (const auto& sim : scenario.simulators) {
                const ComponentRecord* comp = catalog.find(sim.component);
                if (!comp) continue;
                for (const auto& v : comp->variables) {
                    if (v.causality != wanted) continue;
                    if (!same_dimension(v.unit, attr->unit)) continue;
                    bool topic_ok =
                        v.topic.term == attr->topic.term ||
                        (taxonomy && taxonomy->related(v.topic.term, attr->topic.term));
                    if (topic_ok) {
                        realized = true;
                        break;
                    }
                }
                if (realized) break;
            }
            if (!realized)
                add(Severity::warning, "W004",
                    "flow " + flow.attribute.str() + "->" + flow.criterion,
                    "required flow (transform '" + flow.transform +
                        "') has no realizing component in the scenario");
        }
    }

    std::sort(report.findings.begin(), report.findings.end(),
              [](const Finding& a, const Finding& b) {
                  return std::tie(a.severity, a.code, a.location) <
                         std::tie(b.severity, b.code, b.location);
              });
    report.passed = std::none_of(report.findings.begin(), report.findings.end(),
                                 [](const Finding& f) { return f.severity == Severity::error; });
    return report;
}

/// Resolves every W001 by attaching the derived conversion as the connection's
/// transform; everything else is left untouched. Idempotent.
inline Scenario autofix_units(const Scenario& scenario, const Catalog& catalog) {
    Scenario fixed = scenario;
    for (auto& c : fixed.connections) {
        if (c.transform) continue;
        const VariableSpec* src = detail::resolve_endpoint(fixed, catalog, c.source).variable;
        const VariableSpec* tgt = detail::resolve_endpoint(fixed, catalog, c.target).variable;
        if (!src || !tgt) continue;
        if (!same_dimension(src->unit, tgt->unit)) continue;  // E003 is never "fixed"
        if (same_unit(src->unit, tgt->unit)) continue;
        c.transform = conversion(src->unit, tgt->unit);
    }
    return fixed;
}

}  // namespace coplan
