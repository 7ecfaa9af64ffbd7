#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coplan/catalog.hpp"
#include "coplan/common.hpp"
#include "coplan/info_model.hpp"
#include "coplan/topics.hpp"
#include "coplan/triple_store.hpp"
#include "coplan/units.hpp"
#include "coplan/vocab.hpp"

namespace coplan {

enum class MatchDirection { need_producer, need_consumer };

/// Aspect weights; must sum to 1. Defaults put units first because correct
/// coupling hinges on them, topics second, ranges third.
struct MatchWeights {
    double unit = 0.5;
    double topic = 0.3;
    double range = 0.2;

    void check() const {
        if (unit < 0 || topic < 0 || range < 0)
            throw Error("weights must be nonnegative");
        if (!nearly_equal(unit + topic + range, 1.0, 1e-12))
            throw Error("weights must sum to 1, got " + fmt_number(unit + topic + range));
    }
};

struct Recommendation {
    std::string component;
    std::string variable;
    double score = 0;
    double unit_score = 0;
    double topic_score = 0;
    double range_score = 0;
    std::optional<ConversionFn> conversion;  // offered -> required units
    std::string explanation;
};

/// nullopt = candidate excluded (dimension mismatch).
inline std::optional<std::pair<double, std::optional<ConversionFn>>> score_unit(
    const UnitSpec& required, const UnitSpec& offered) {
    if (!same_dimension(required, offered)) return std::nullopt;
    if (same_unit(required, offered)) return {{1.0, std::nullopt}};
    return {{0.8, conversion(offered, required)}};
}

inline double score_topic(const TopicRef& required, const TopicRef& offered,
                          const Taxonomy& taxonomy) {
    if (required.term == offered.term) return 1.0;
    if (taxonomy.related(required.term, offered.term)) return 0.5;
    return 0.0;
}

/// nullopt = excluded (disjoint ranges). The offered range is converted to the
/// required attribute's unit first; absent bounds count as +-infinity.
inline std::optional<double> score_range(const std::optional<ValueRange>& required,
                                         std::optional<double> offered_min,
                                         std::optional<double> offered_max,
                                         const std::optional<ConversionFn>& conv) {
    if (!required || (!offered_min && !offered_max)) return 1.0;
    double lo = offered_min ? (conv ? (*conv)(*offered_min) : *offered_min)
                            : -std::numeric_limits<double>::infinity();
    double hi = offered_max ? (conv ? (*conv)(*offered_max) : *offered_max)
                            : std::numeric_limits<double>::infinity();
    if (lo > hi) std::swap(lo, hi);  // negative conversion factors flip the interval
    if (required->max < lo || required->min > hi) return std::nullopt;
    if (required->min >= lo && required->max <= hi) return 1.0;
    return 0.5;
}

namespace detail {

/// Catalog variable view shared by the in-memory and triple-store paths.
struct Candidate {
    std::string component;
    std::string variable;
    Causality causality;
    UnitSpec unit;
    TopicRef topic;
    std::optional<double> min;
    std::optional<double> max;
};

inline std::vector<Recommendation> recommend_candidates(const Attribute& attr,
                                                        MatchDirection direction,
                                                        const std::vector<Candidate>& candidates,
                                                        const Taxonomy& taxonomy,
                                                        const MatchWeights& weights) {
    weights.check();
    Causality wanted =
        direction == MatchDirection::need_producer ? Causality::output : Causality::input;
    std::vector<Recommendation> out;
    for (const auto& cand : candidates) {
        if (cand.causality != wanted) continue;
        auto unit_part = score_unit(attr.unit, cand.unit);
        if (!unit_part) continue;  // dimension mismatch excludes
        auto range_part = score_range(attr.range, cand.min, cand.max, unit_part->second);
        if (!range_part) continue;  // disjoint ranges exclude
        Recommendation r;
        r.component = cand.component;
        r.variable = cand.variable;
        r.unit_score = unit_part->first;
        r.conversion = unit_part->second;
        r.topic_score = score_topic(attr.topic, cand.topic, taxonomy);
        r.range_score = *range_part;
        r.score = weights.unit * r.unit_score + weights.topic * r.topic_score +
                  weights.range * r.range_score;
        r.explanation = "unit " + cand.unit.symbol +
                        (r.unit_score == 1.0 ? " exact"
                                             : " convertible (x" +
                                                   fmt_number(r.conversion->factor) + ")") +
                        "; topic " + cand.topic.term +
                        (r.topic_score == 1.0   ? " exact"
                         : r.topic_score == 0.5 ? " related"
                                                : " unrelated") +
                        "; range " +
                        (r.range_score == 1.0 ? "compatible" : "partial overlap");
        out.push_back(std::move(r));
    }
    std::sort(out.begin(), out.end(), [](const Recommendation& a, const Recommendation& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.component != b.component) return a.component < b.component;
        return a.variable < b.variable;
    });
    return out;
}

inline std::pair<const Attribute*, MatchDirection> resolve_request(const InfoModel& model,
                                                                   const AttrRef& ref) {
    const Attribute* attr = model.find_attribute(ref);
    if (!attr) throw Error("unknown attribute '" + ref.str() + "'");
    MatchDirection dir = attr->role == AttributeRole::derived ? MatchDirection::need_producer
                                                              : MatchDirection::need_consumer;
    return {attr, dir};
}

}  // namespace detail

/// In-memory path: scores catalog variables directly.
inline std::vector<Recommendation> recommend(const InfoModel& model, const AttrRef& attribute,
                                             const Catalog& catalog, const Taxonomy& taxonomy,
                                             const MatchWeights& weights = {}) {
    auto [attr, direction] = detail::resolve_request(model, attribute);
    std::vector<detail::Candidate> candidates;
    for (const auto& c : catalog.components)
        for (const auto& v : c.variables)
            if (v.is_flow())
                candidates.push_back({c.id, v.name, v.causality, v.unit, v.topic, v.min, v.max});
    return detail::recommend_candidates(*attr, direction, candidates, taxonomy, weights);
}

/// Query path: rebuilds candidates by conjunctive queries over the catalog's
/// triple projection. Must agree with the in-memory path exactly.
inline std::vector<Recommendation> recommend_via_store(const InfoModel& model,
                                                       const AttrRef& attribute,
                                                       const TripleStore& store,
                                                       const Taxonomy& taxonomy,
                                                       const MatchWeights& weights = {},
                                                       const UnitTable& units =
                                                           UnitTable::builtin()) {
    auto [attr, direction] = detail::resolve_request(model, attribute);
    auto rows = store.query({{var("c"), PatternSlot{iri(vocab::isA)},
                              PatternSlot{literal("component")}},
                             {var("c"), PatternSlot{iri(vocab::hasVariable)}, var("v")},
                             {var("v"), PatternSlot{iri(vocab::hasCausality)}, var("caus")},
                             {var("v"), PatternSlot{iri(vocab::hasUnit)}, var("u")},
                             {var("v"), PatternSlot{iri(vocab::hasTopic)}, var("t")}});
    std::vector<detail::Candidate> candidates;
    for (const auto& row : rows.rows) {
        auto ref = unmint_iri("variable", row.at("v").value);
        if (!ref) continue;
        auto cid = unmint_iri("component", row.at("c").value);
        if (!cid) continue;
        const std::string& caus = row.at("caus").value;
        if (caus != "input" && caus != "output") continue;
        detail::Candidate cand;
        cand.component = *cid;
        auto dot = ref->find('.');
        cand.variable = dot == std::string::npos ? *ref : ref->substr(dot + 1);
        cand.causality = parse_causality(caus);
        cand.unit = parse_unit(row.at("u").value, units);
        cand.topic = {row.at("t").value, taxonomy.has(row.at("t").value)};
        if (auto m = detail::literal_of(store, row.at("v").value, vocab::hasMin))
            cand.min = *parse_number(*m);
        if (auto m = detail::literal_of(store, row.at("v").value, vocab::hasMax))
            cand.max = *parse_number(*m);
        candidates.push_back(std::move(cand));
    }
    return detail::recommend_candidates(*attr, direction, candidates, taxonomy, weights);
}

/// Component-level aggregate: the maximum of the component's variable scores.
inline std::map<std::string, double> component_scores(const std::vector<Recommendation>& recs) {
    std::map<std::string, double> out;
    for (const auto& r : recs) {
        auto [it, inserted] = out.emplace(r.component, r.score);
        if (!inserted) it->second = std::max(it->second, r.score);
    }
    return out;
}

/// Machine-readable report: one candidate per line.
inline std::string render_report(const std::vector<Recommendation>& recs) {
    std::string out;
    for (const auto& r : recs) {
        out += fmt_number(r.score) + " " + r.component + " " + r.variable + " " +
               fmt_number(r.unit_score) + " " + fmt_number(r.topic_score) + " " +
               fmt_number(r.range_score) + " " +
               (r.conversion ? fmt_number(r.conversion->factor) : "1") + "\n";
    }
    return out;
}

}  // namespace coplan
