#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "coplan/common.hpp"
#include "coplan/topics.hpp"
#include "coplan/triple_store.hpp"
#include "coplan/units.hpp"
#include "coplan/vocab.hpp"

namespace coplan {

enum class AttributeRole { input, derived };

inline const char* to_string(AttributeRole r) {
    return r == AttributeRole::input ? "input" : "derived";
}

struct ValueRange {
    double min = 0;
    double max = 0;

    friend bool operator==(const ValueRange&, const ValueRange&) = default;
};

struct Attribute {
    std::string name;
    UnitSpec unit;
    TopicRef topic;
    AttributeRole role = AttributeRole::input;
    std::optional<ValueRange> range;

    friend bool operator==(const Attribute& a, const Attribute& b) {
        return a.name == b.name && a.unit.symbol == b.unit.symbol && a.topic == b.topic &&
               a.role == b.role && a.range == b.range;
    }
};

struct DomainObject {
    std::string name;
    std::vector<Attribute> attributes;

    friend bool operator==(const DomainObject&, const DomainObject&) = default;
};

struct Domain {
    std::string name;
    std::vector<DomainObject> objects;

    friend bool operator==(const Domain&, const Domain&) = default;
};

struct Criterion {
    std::string name;
    UnitSpec unit;

    friend bool operator==(const Criterion& a, const Criterion& b) {
        return a.name == b.name && a.unit.symbol == b.unit.symbol;
    }
};

struct Facet {
    std::string name;
    std::vector<Criterion> criteria;

    friend bool operator==(const Facet&, const Facet&) = default;
};

struct EvaluationFunction {
    std::string name;
    std::vector<Facet> facets;

    friend bool operator==(const EvaluationFunction&, const EvaluationFunction&) = default;
};

enum class TransformKind { direct, sum, mean, min, max, weighted_sum, affine };

/// Reference to an attribute as `<object>.<attribute>`.
struct AttrRef {
    std::string object;
    std::string attribute;

    std::string str() const { return object + "." + attribute; }

    friend auto operator<=>(const AttrRef&, const AttrRef&) = default;
};

inline AttrRef parse_attr_ref(std::string_view text, std::size_t lineno) {
    auto dot = text.find('.');
    if (dot == std::string_view::npos || dot == 0 || dot + 1 == text.size())
        throw ParseError(lineno, "attribute reference must be <object>.<attribute>: '" +
                                     std::string(text) + "'");
    return {std::string(text.substr(0, dot)), std::string(text.substr(dot + 1))};
}

struct TransformationFunction {
    std::string name;
    TransformKind kind = TransformKind::direct;
    std::vector<double> weights;  // weighted_sum only
    double affine_a = 1.0, affine_b = 0.0;
    std::vector<AttrRef> inputs;  // ordered; order is significant for weighted_sum
    std::string output;           // criterion name

    bool is_aggregate() const {
        return kind == TransformKind::sum || kind == TransformKind::mean ||
               kind == TransformKind::min || kind == TransformKind::max ||
               kind == TransformKind::weighted_sum;
    }

    std::string kind_str() const {
        switch (kind) {
            case TransformKind::direct: return "direct";
            case TransformKind::sum: return "sum";
            case TransformKind::mean: return "mean";
            case TransformKind::min: return "min";
            case TransformKind::max: return "max";
            case TransformKind::weighted_sum: {
                std::string out = "weighted_sum(";
                for (std::size_t i = 0; i < weights.size(); ++i) {
                    if (i) out += ',';
                    out += fmt_number(weights[i]);
                }
                return out + ")";
            }
            case TransformKind::affine:
                return "affine(" + fmt_number(affine_a) + "," + fmt_number(affine_b) + ")";
        }
        return "direct";
    }

    friend bool operator==(const TransformationFunction& a, const TransformationFunction& b) {
        return a.name == b.name && a.kind_str() == b.kind_str() && a.inputs == b.inputs &&
               a.output == b.output;
    }
};

/// A flow the scenario must realize: one per (attribute, transformation,
/// criterion) path of the information model.
struct FlowRequirement {
    AttrRef attribute;
    std::string transform;
    std::string criterion;
};

/// The SEP information model: domains with objects and attributes on one side,
/// the evaluation function (facets, criteria) on the other, linked by
/// transformation functions.
struct InfoModel {
    std::string source_name;
    std::vector<Domain> domains;
    std::optional<EvaluationFunction> evaluation;
    std::vector<TransformationFunction> transforms;
    std::vector<std::string> warnings;  // unregistered topics etc.

    const Attribute* find_attribute(const AttrRef& ref) const {
        for (const auto& d : domains)
            for (const auto& o : d.objects)
                if (o.name == ref.object)
                    for (const auto& a : o.attributes)
                        if (a.name == ref.attribute) return &a;
        return nullptr;
    }

    const Criterion* find_criterion(const std::string& name) const {
        if (!evaluation) return nullptr;
        for (const auto& f : evaluation->facets)
            for (const auto& c : f.criteria)
                if (c.name == name) return &c;
        return nullptr;
    }

    friend bool operator==(const InfoModel& a, const InfoModel& b) {
        return a.domains == b.domains && a.evaluation == b.evaluation &&
               a.transforms == b.transforms;
    }
};

namespace detail {

inline std::map<std::string, std::string> parse_kv(const std::vector<std::string>& toks,
                                                   std::size_t first, std::size_t lineno) {
    std::map<std::string, std::string> kv;
    for (std::size_t i = first; i < toks.size(); ++i) {
        auto eq = toks[i].find('=');
        if (eq == std::string::npos)
            throw ParseError(lineno, "expected key=value, got '" + toks[i] + "'");
        kv[toks[i].substr(0, eq)] = toks[i].substr(eq + 1);
    }
    return kv;
}

inline std::optional<ValueRange> parse_range(const std::string& text, std::size_t lineno) {
    auto dots = text.find("..");
    if (dots == std::string::npos)
        throw ParseError(lineno, "range must be <min>..<max>: '" + text + "'");
    ValueRange r{require_number(text.substr(0, dots), lineno, "range min"),
                 require_number(text.substr(dots + 2), lineno, "range max")};
    if (r.min > r.max) throw ParseError(lineno, "range min > max: '" + text + "'");
    return r;
}

inline void sort_model(InfoModel& m) {
    auto by_name = [](const auto& a, const auto& b) { return a.name < b.name; };
    for (auto& d : m.domains) {
        for (auto& o : d.objects) std::sort(o.attributes.begin(), o.attributes.end(), by_name);
        std::sort(d.objects.begin(), d.objects.end(), by_name);
    }
    std::sort(m.domains.begin(), m.domains.end(), by_name);
    if (m.evaluation) {
        for (auto& f : m.evaluation->facets)
            std::sort(f.criteria.begin(), f.criteria.end(), by_name);
        std::sort(m.evaluation->facets.begin(), m.evaluation->facets.end(), by_name);
    }
    std::sort(m.transforms.begin(), m.transforms.end(),
              [](const auto& a, const auto& b) { return a.name < b.name; });
}

inline void check_model(InfoModel& m, const Taxonomy* taxonomy) {
    if (m.domains.empty() && !m.evaluation) throw Error("empty model");

    std::set<std::string> domain_names;
    for (const auto& d : m.domains)
        if (!domain_names.insert(d.name).second) throw Error("duplicate domain '" + d.name + "'");

    std::set<std::string> object_names;
    for (const auto& d : m.domains) {
        for (const auto& o : d.objects) {
            if (!object_names.insert(o.name).second)
                throw Error("duplicate object '" + o.name + "'");
            std::set<std::string> attr_names;
            for (const auto& a : o.attributes) {
                if (!attr_names.insert(a.name).second)
                    throw Error("duplicate attribute '" + o.name + "." + a.name + "'");
                if (taxonomy && !taxonomy->has(a.topic.term))
                    m.warnings.push_back("unregistered topic '" + a.topic.term + "' on attribute " +
                                         o.name + "." + a.name);
            }
        }
    }

    std::set<std::string> criterion_names;
    if (m.evaluation) {
        for (const auto& f : m.evaluation->facets)
            for (const auto& c : f.criteria)
                if (!criterion_names.insert(c.name).second)
                    throw Error("duplicate criterion '" + c.name + "'");
    }

    std::set<std::string> transform_names;
    for (const auto& t : m.transforms) {
        if (!transform_names.insert(t.name).second)
            throw Error("duplicate transform '" + t.name + "'");
        if (t.inputs.empty()) throw Error("transform '" + t.name + "' has no inputs");
        if ((t.kind == TransformKind::direct || t.kind == TransformKind::affine) &&
            t.inputs.size() != 1)
            throw Error("transform '" + t.name + "' requires exactly one input");
        if (t.kind == TransformKind::weighted_sum && t.weights.size() != t.inputs.size())
            throw Error("transform '" + t.name + "': weight count " +
                        std::to_string(t.weights.size()) + " != input count " +
                        std::to_string(t.inputs.size()));
        const Criterion* crit = m.find_criterion(t.output);
        if (!crit)
            throw Error("transform '" + t.name + "': dangling criterion reference '" + t.output +
                        "'");
        for (const auto& in : t.inputs) {
            const Attribute* attr = m.find_attribute(in);
            if (!attr)
                throw Error("transform '" + t.name + "': dangling attribute reference '" +
                            in.str() + "'");
            // direct and aggregate transforms are unit checked; affine declares
            // its output unit via the criterion.
            if (t.kind != TransformKind::affine &&
                !same_dimension(attr->unit, crit->unit))
                throw Error("transform '" + t.name + "': input " + in.str() + " (" +
                            attr->unit.symbol + ") and criterion " + t.output + " (" +
                            crit->unit.symbol + ") have different dimensions");
        }
    }
}

}  // namespace detail

inline InfoModel parse_info_model(std::istream& in, const Taxonomy* taxonomy = nullptr,
                                  const UnitTable& units = UnitTable::builtin()) {
    InfoModel model;
    Domain* domain = nullptr;
    DomainObject* object = nullptr;
    Facet* facet = nullptr;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto toks = tokens(t);
        const std::string& kw = toks[0];
        auto need_name = [&]() -> const std::string& {
            if (toks.size() < 2) throw ParseError(lineno, kw + " requires a name");
            return toks[1];
        };
        try {
            if (kw == "domain") {
                model.domains.push_back({need_name(), {}});
                domain = &model.domains.back();
                object = nullptr;
            } else if (kw == "object") {
                if (!domain) throw ParseError(lineno, "object outside a domain block");
                domain->objects.push_back({need_name(), {}});
                object = &domain->objects.back();
            } else if (kw == "attribute") {
                if (!object) throw ParseError(lineno, "attribute outside an object block");
                auto kv = detail::parse_kv(toks, 2, lineno);
                Attribute a;
                a.name = need_name();
                if (!kv.count("unit")) throw ParseError(lineno, "attribute requires unit=");
                a.unit = parse_unit(kv.at("unit"), units);
                if (!kv.count("topic")) throw ParseError(lineno, "attribute requires topic=");
                a.topic = {kv.at("topic"), !taxonomy || taxonomy->has(kv.at("topic"))};
                if (!kv.count("role")) throw ParseError(lineno, "attribute requires role=");
                const std::string& role = kv.at("role");
                if (role == "input")
                    a.role = AttributeRole::input;
                else if (role == "derived")
                    a.role = AttributeRole::derived;
                else
                    throw ParseError(lineno, "role must be input or derived, got '" + role + "'");
                if (kv.count("range")) a.range = detail::parse_range(kv.at("range"), lineno);
                object->attributes.push_back(std::move(a));
            } else if (kw == "evaluation") {
                if (model.evaluation) throw ParseError(lineno, "multiple evaluation blocks");
                model.evaluation = EvaluationFunction{need_name(), {}};
                facet = nullptr;
            } else if (kw == "facet") {
                if (!model.evaluation) throw ParseError(lineno, "facet outside evaluation block");
                model.evaluation->facets.push_back({need_name(), {}});
                facet = &model.evaluation->facets.back();
            } else if (kw == "criterion") {
                if (!facet) throw ParseError(lineno, "criterion outside a facet block");
                auto kv = detail::parse_kv(toks, 2, lineno);
                if (!kv.count("unit")) throw ParseError(lineno, "criterion requires unit=");
                facet->criteria.push_back({need_name(), parse_unit(kv.at("unit"), units)});
            } else if (kw == "transform") {
                auto kv = detail::parse_kv(toks, 2, lineno);
                TransformationFunction tf;
                tf.name = need_name();
                if (!kv.count("kind")) throw ParseError(lineno, "transform requires kind=");
                const std::string& kind = kv.at("kind");
                if (kind == "direct")
                    tf.kind = TransformKind::direct;
                else if (kind == "sum")
                    tf.kind = TransformKind::sum;
                else if (kind == "mean")
                    tf.kind = TransformKind::mean;
                else if (kind == "min")
                    tf.kind = TransformKind::min;
                else if (kind == "max")
                    tf.kind = TransformKind::max;
                else if (starts_with(kind, "weighted_sum(") && kind.back() == ')') {
                    tf.kind = TransformKind::weighted_sum;
                    for (const auto& w : split(kind.substr(13, kind.size() - 14), ','))
                        tf.weights.push_back(require_number(w, lineno, "weight"));
                } else if (starts_with(kind, "affine(") && kind.back() == ')') {
                    tf.kind = TransformKind::affine;
                    auto ab = split(kind.substr(7, kind.size() - 8), ',');
                    if (ab.size() != 2) throw ParseError(lineno, "affine requires (a,b)");
                    tf.affine_a = require_number(ab[0], lineno, "affine a");
                    tf.affine_b = require_number(ab[1], lineno, "affine b");
                } else {
                    throw ParseError(lineno, "unknown transform kind '" + kind + "'");
                }
                if (!kv.count("inputs")) throw ParseError(lineno, "transform requires inputs=");
                for (const auto& ref : split(kv.at("inputs"), ','))
                    tf.inputs.push_back(parse_attr_ref(ref, lineno));
                if (!kv.count("output")) throw ParseError(lineno, "transform requires output=");
                tf.output = kv.at("output");
                model.transforms.push_back(std::move(tf));
            } else {
                throw ParseError(lineno, "unknown keyword '" + kw + "'");
            }
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(lineno, e.what());
        }
    }
    detail::sort_model(model);
    detail::check_model(model, taxonomy);
    return model;
}

inline InfoModel load_info_model(const std::string& path, const Taxonomy* taxonomy = nullptr,
                                 const UnitTable& units = UnitTable::builtin()) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open info model: " + path);
    InfoModel m = parse_info_model(in, taxonomy, units);
    m.source_name = path;
    return m;
}

inline TripleStore to_triples(const InfoModel& model) {
    TripleStore store;
    auto lit = [](const std::string& s) { return literal(s); };
    for (const auto& d : model.domains) {
        Term dterm = iri(mint_iri("domain", d.name));
        store.insert(dterm, iri(vocab::isA), lit("domain"));
        for (const auto& o : d.objects) {
            Term oterm = iri(mint_iri("object", o.name));
            store.insert(oterm, iri(vocab::isA), lit("object"));
            store.insert(oterm, iri(vocab::inDomain), dterm);
            for (const auto& a : o.attributes) {
                Term aterm = iri(mint_iri("attribute", o.name + "." + a.name));
                store.insert(oterm, iri(vocab::hasAttribute), aterm);
                store.insert(aterm, iri(vocab::isA), lit("attribute"));
                store.insert(aterm, iri(vocab::hasUnit), lit(a.unit.symbol));
                store.insert(aterm, iri(vocab::hasTopic), lit(a.topic.term));
                store.insert(aterm, iri(vocab::hasRole), lit(to_string(a.role)));
                if (a.range)
                    store.insert(aterm, iri(vocab::hasRange),
                                 lit(fmt_number(a.range->min) + ".." + fmt_number(a.range->max)));
            }
        }
    }
    if (model.evaluation) {
        Term eterm = iri(mint_iri("evaluation", model.evaluation->name));
        store.insert(eterm, iri(vocab::isA), lit("evaluation"));
        for (const auto& f : model.evaluation->facets) {
            Term fterm = iri(mint_iri("facet", f.name));
            store.insert(eterm, iri(vocab::hasFacet), fterm);
            store.insert(fterm, iri(vocab::isA), lit("facet"));
            for (const auto& c : f.criteria) {
                Term cterm = iri(mint_iri("criterion", c.name));
                store.insert(fterm, iri(vocab::hasCriterion), cterm);
                store.insert(cterm, iri(vocab::isA), lit("criterion"));
                store.insert(cterm, iri(vocab::hasUnit), lit(c.unit.symbol));
            }
        }
    }
    for (const auto& t : model.transforms) {
        Term tterm = iri(mint_iri("transform", t.name));
        store.insert(tterm, iri(vocab::isA), lit("transform"));
        store.insert(tterm, iri(vocab::transformKind), lit(t.kind_str()));
        std::string ordered;
        for (std::size_t i = 0; i < t.inputs.size(); ++i) {
            store.insert(tterm, iri(vocab::transformInput),
                         iri(mint_iri("attribute", t.inputs[i].str())));
            if (i) ordered += ',';
            ordered += t.inputs[i].str();
        }
        store.insert(tterm, iri("coplan:inputList"), lit(ordered));
        store.insert(tterm, iri(vocab::transformOutput), iri(mint_iri("criterion", t.output)));
    }
    return store;
}

namespace detail {

/// Objects of all triples (subject, pred, ?o) in canonical order.
inline std::vector<Term> objects_of(const TripleStore& store, const std::string& subject,
                                    const char* pred) {
    std::vector<Term> out;
    auto res = store.match({PatternSlot{iri(subject)}, PatternSlot{iri(pred)}, var("o")});
    for (const auto& row : res.rows) out.push_back(row.at("o"));
    return out;
}

inline std::optional<std::string> literal_of(const TripleStore& store, const std::string& subject,
                                             const char* pred) {
    auto objs = objects_of(store, subject, pred);
    if (objs.empty()) return std::nullopt;
    return objs.front().value;
}

inline std::string require_literal(const TripleStore& store, const std::string& subject,
                                   const char* pred) {
    auto v = literal_of(store, subject, pred);
    if (!v)
        throw Error("missing mandatory predicate " + std::string(pred) + " on <" + subject + ">");
    return *v;
}

/// Subjects carrying (s, coplan:isA, "<kind>").
inline std::vector<std::string> subjects_of_kind(const TripleStore& store,
                                                 const std::string& kind) {
    std::vector<std::string> out;
    auto res = store.query({{var("s"), PatternSlot{iri(vocab::isA)}, PatternSlot{literal(kind)}}});
    for (const auto& row : res.rows) out.push_back(row.at("s").value);
    return out;
}

/// Rejects coplan-vocabulary predicates we do not know; foreign-vocabulary
/// triples are tolerated and ignored.
inline void check_known_vocabulary(const TripleStore& store) {
    static const std::set<std::string> known = {
        vocab::isA,           vocab::inDomain,      vocab::hasAttribute,
        vocab::hasUnit,       vocab::hasTopic,      vocab::hasRole,
        vocab::hasRange,      vocab::hasFacet,      vocab::hasCriterion,
        vocab::transformInput, vocab::transformOutput, vocab::transformKind,
        "coplan:inputList",   vocab::hasName,       vocab::hasContact,
        vocab::softwareType,  vocab::hasLicense,    vocab::hasApi,
        vocab::hasPlatform,   vocab::builtinKind,   vocab::temporalResolution,
        vocab::spatialResolution, vocab::hasVariable, vocab::hasCausality,
        vocab::hasVariability, vocab::hasMin,       vocab::hasMax,
        vocab::hasStart,      vocab::instanceOf,    vocab::hasEntity,
        vocab::hasSimulator,  vocab::hasConnection, vocab::connectsFrom,
        vocab::connectsTo,    vocab::timeShifted,   vocab::hasParam,
        vocab::stepSeconds,   vocab::baseStepSeconds, vocab::ofSimulator,
        vocab::hasModel,      vocab::transformFactor, vocab::transformOffset,
        vocab::ofEntity,      vocab::ofVariable,    vocab::atTime,
        vocab::hasValue};
    for (const auto& t : store.triples())
        if (starts_with(t.predicate.value, "coplan:") && !known.count(t.predicate.value))
            throw Error("unknown predicate " + t.predicate.value);
}

}  // namespace detail

inline InfoModel from_triples(const TripleStore& store, const Taxonomy* taxonomy = nullptr,
                              const UnitTable& units = UnitTable::builtin()) {
    detail::check_known_vocabulary(store);
    InfoModel model;

    std::map<std::string, Domain> domains;
    for (const auto& s : detail::subjects_of_kind(store, "domain")) {
        auto name = unmint_iri("domain", s);
        if (!name) throw Error("malformed domain iri <" + s + ">");
        domains[*name] = {*name, {}};
    }
    for (const auto& s : detail::subjects_of_kind(store, "object")) {
        auto name = unmint_iri("object", s);
        if (!name) throw Error("malformed object iri <" + s + ">");
        auto dom = detail::objects_of(store, s, vocab::inDomain);
        if (dom.empty())
            throw Error("missing mandatory predicate coplan:inDomain on <" + s + ">");
        auto dname = unmint_iri("domain", dom.front().value);
        if (!dname || !domains.count(*dname))
            throw Error("object <" + s + "> references unknown domain");
        DomainObject obj{*name, {}};
        for (const auto& aterm : detail::objects_of(store, s, vocab::hasAttribute)) {
            auto aref = unmint_iri("attribute", aterm.value);
            if (!aref) throw Error("malformed attribute iri <" + aterm.value + ">");
            auto dot = aref->find('.');
            Attribute a;
            a.name = dot == std::string::npos ? *aref : aref->substr(dot + 1);
            a.unit = parse_unit(detail::require_literal(store, aterm.value, vocab::hasUnit), units);
            std::string topic = detail::require_literal(store, aterm.value, vocab::hasTopic);
            a.topic = {topic, !taxonomy || taxonomy->has(topic)};
            std::string role = detail::require_literal(store, aterm.value, vocab::hasRole);
            if (role == "input")
                a.role = AttributeRole::input;
            else if (role == "derived")
                a.role = AttributeRole::derived;
            else
                throw Error("bad role literal '" + role + "'");
            if (auto r = detail::literal_of(store, aterm.value, vocab::hasRange))
                a.range = detail::parse_range(*r, 0);
            obj.attributes.push_back(std::move(a));
        }
        domains[*dname].objects.push_back(std::move(obj));
    }
    for (auto& [name, d] : domains) model.domains.push_back(std::move(d));

    auto evals = detail::subjects_of_kind(store, "evaluation");
    if (!evals.empty()) {
        auto ename = unmint_iri("evaluation", evals.front());
        model.evaluation = EvaluationFunction{*ename, {}};
        for (const auto& fterm : detail::objects_of(store, evals.front(), vocab::hasFacet)) {
            auto fname = unmint_iri("facet", fterm.value);
            if (!fname) throw Error("malformed facet iri <" + fterm.value + ">");
            Facet f{*fname, {}};
            for (const auto& cterm : detail::objects_of(store, fterm.value, vocab::hasCriterion)) {
                auto cname = unmint_iri("criterion", cterm.value);
                if (!cname) throw Error("malformed criterion iri <" + cterm.value + ">");
                f.criteria.push_back(
                    {*cname,
                     parse_unit(detail::require_literal(store, cterm.value, vocab::hasUnit),
                                units)});
            }
            model.evaluation->facets.push_back(std::move(f));
        }
    }

    for (const auto& s : detail::subjects_of_kind(store, "transform")) {
        auto name = unmint_iri("transform", s);
        if (!name) throw Error("malformed transform iri <" + s + ">");
        TransformationFunction tf;
        tf.name = *name;
        std::string kind = detail::require_literal(store, s, vocab::transformKind);
        if (kind == "direct")
            tf.kind = TransformKind::direct;
        else if (kind == "sum")
            tf.kind = TransformKind::sum;
        else if (kind == "mean")
            tf.kind = TransformKind::mean;
        else if (kind == "min")
            tf.kind = TransformKind::min;
        else if (kind == "max")
            tf.kind = TransformKind::max;
        else if (starts_with(kind, "weighted_sum(")) {
            tf.kind = TransformKind::weighted_sum;
            for (const auto& w : split(kind.substr(13, kind.size() - 14), ','))
                tf.weights.push_back(*parse_number(w));
        } else if (starts_with(kind, "affine(")) {
            tf.kind = TransformKind::affine;
            auto ab = split(kind.substr(7, kind.size() - 8), ',');
            tf.affine_a = *parse_number(ab[0]);
            tf.affine_b = *parse_number(ab[1]);
        } else {
            throw Error("bad transform kind literal '" + kind + "'");
        }
        std::string ordered = detail::require_literal(store, s, "coplan:inputList");
        for (const auto& ref : split(ordered, ',')) tf.inputs.push_back(parse_attr_ref(ref, 0));
        auto outs = detail::objects_of(store, s, vocab::transformOutput);
        if (outs.empty())
            throw Error("missing mandatory predicate coplan:transformOutput on <" + s + ">");
        auto cname = unmint_iri("criterion", outs.front().value);
        if (!cname) throw Error("malformed criterion iri <" + outs.front().value + ">");
        tf.output = *cname;
        model.transforms.push_back(std::move(tf));
    }

    detail::sort_model(model);
    detail::check_model(model, taxonomy);
    return model;
}

inline std::vector<FlowRequirement> required_flows(const InfoModel& model) {
    std::vector<FlowRequirement> out;
    for (const auto& t : model.transforms)
        for (const auto& in : t.inputs) out.push_back({in, t.name, t.output});
    return out;
}

}  // namespace coplan
