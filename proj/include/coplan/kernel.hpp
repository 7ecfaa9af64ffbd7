#pragma once

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "coplan/catalog.hpp"
#include "coplan/common.hpp"
#include "coplan/info_model.hpp"
#include "coplan/scenario.hpp"
#include "coplan/triple_store.hpp"
#include "coplan/units.hpp"
#include "coplan/vocab.hpp"

namespace coplan {

struct Sample {
    std::string entity;
    std::string variable;
    long time_s = 0;
    double value = 0;

    friend bool operator==(const Sample&, const Sample&) = default;
};

struct RunResult {
    std::vector<Sample> samples;
    std::map<std::string, double> criteria;
};

namespace detail {

/// Step-wise constant time series read from a `time_s,<column>...` CSV.
struct TimeSeries {
    std::vector<std::pair<long, double>> points;  // monotone times

    double at(long t) const {
        if (points.empty() || t < points.front().first)
            throw Error("time series has no value at t=" + std::to_string(t));
        double v = points.front().second;
        for (const auto& [time, value] : points) {
            if (time > t) break;
            v = value;
        }
        return v;
    }
};

inline TimeSeries load_timeseries(const std::string& path, const std::string& column) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open time series: " + path);
    std::string line;
    if (!std::getline(in, line)) throw Error("empty time series file: " + path);
    auto header = split(std::string(trim(line)), ',');
    if (header.empty() || header[0] != "time_s")
        throw Error("time series header must start with time_s: " + path);
    std::size_t col = 0;
    bool found = false;
    for (std::size_t i = 1; i < header.size(); ++i)
        if (std::string(trim(header[i])) == column) {
            col = i;
            found = true;
        }
    if (!found) throw Error("column '" + column + "' not found in " + path);
    TimeSeries ts;
    long prev = std::numeric_limits<long>::min();
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        auto t = trim(line);
        if (t.empty()) continue;
        auto cells = split(std::string(t), ',');
        if (cells.size() <= col) throw ParseError(lineno, "missing column in time series row");
        long time = static_cast<long>(require_number(cells[0], lineno, "time_s"));
        if (time <= prev) throw ParseError(lineno, "time_s must be strictly increasing");
        prev = time;
        ts.points.push_back({time, require_number(cells[col], lineno, "value")});
    }
    return ts;
}

inline double aggregate_op(const std::string& op, const std::vector<double>& values,
                           const std::vector<double>& weights = {}) {
    if (values.empty()) throw Error("aggregate over empty input");
    if (op == "sum") {
        double s = 0;
        for (double v : values) s += v;
        return s;
    }
    if (op == "mean") {
        double s = 0;
        for (double v : values) s += v;
        return s / static_cast<double>(values.size());
    }
    if (op == "min") return *std::min_element(values.begin(), values.end());
    if (op == "max") return *std::max_element(values.begin(), values.end());
    if (op == "weighted_sum") {
        if (weights.size() != values.size())
            throw Error("weighted_sum weight count " + std::to_string(weights.size()) +
                        " != input count " + std::to_string(values.size()));
        double s = 0;
        for (std::size_t i = 0; i < values.size(); ++i) s += weights[i] * values[i];
        return s;
    }
    throw Error("unknown aggregate op '" + op + "'");
}

}  // namespace detail

/// Fixed-step execution of a validated scenario over the built-in model kinds.
/// Entities execute in topological order of the non-time-shifted connections;
/// time-shifted edges deliver the source's value from before the current step
/// (its start value at t=0). Transforms apply on every delivery.
class Kernel {
  public:
    Kernel(const Scenario& scenario, const Catalog& catalog)
        : scenario_(scenario), catalog_(catalog) {}

    RunResult run(long duration_s, const InfoModel* info_model = nullptr) {
        if (duration_s <= 0 || duration_s % scenario_.base_step_s != 0)
            throw Error("duration " + std::to_string(duration_s) +
                        " is not a positive multiple of base step " +
                        std::to_string(scenario_.base_step_s));
        init();
        RunResult result;
        for (long t = 0; t < duration_s; t += scenario_.base_step_s) {
            prev_outputs_ = outputs_;
            for (const auto& id : topo_order_) {
                const Instance& inst = instances_.at(id);
                if (t % inst.step_s != 0) continue;
                execute(inst, t, result);
            }
        }
        if (info_model) result.criteria = evaluate_criteria(result, *info_model);
        return result;
    }

  private:
    struct Instance {
        std::string entity;
        std::string kind;
        long step_s = 1;
        const ComponentRecord* component = nullptr;
        const SimulatorInstance* simulator = nullptr;
        std::string output_variable;  // empty for recorders
        std::optional<detail::TimeSeries> series;
    };

    void init() {
        instances_.clear();
        outputs_.clear();
        topo_order_.clear();
        for (const auto& e : scenario_.entities) {
            const SimulatorInstance* sim = scenario_.find_simulator(e.simulator);
            const ComponentRecord* comp = sim ? catalog_.find(sim->component) : nullptr;
            if (!comp) throw Error("entity '" + e.id + "' has no resolvable component");
            if (comp->technical.builtin.empty())
                throw Error("component '" + comp->id +
                            "' is plan-only: no builtin kind declared");
            Instance inst;
            inst.entity = e.id;
            inst.kind = comp->technical.builtin;
            inst.step_s = sim->step_s;
            inst.component = comp;
            inst.simulator = sim;
            for (const auto& v : comp->variables) {
                if (v.causality == Causality::output) {
                    inst.output_variable = v.name;
                    outputs_[{e.id, v.name}] = v.start.value_or(0.0);
                }
            }
            if (inst.kind == "timeseries_source")
                inst.series = detail::load_timeseries(param_text(inst, "file"),
                                                      param_text(inst, "column"));
            if (inst.kind != "recorder" && inst.output_variable.empty())
                throw Error("builtin '" + inst.kind + "' on entity '" + e.id +
                            "' requires an output variable");
            instances_.emplace(e.id, std::move(inst));
        }

        // Kahn's algorithm over non-time-shifted connections, smallest id first.
        std::map<std::string, std::set<std::string>> out_edges;
        std::map<std::string, int> in_degree;
        for (const auto& e : scenario_.entities) in_degree[e.id] = 0;
        for (const auto& c : scenario_.connections) {
            if (c.time_shifted) continue;
            if (out_edges[c.source.entity].insert(c.target.entity).second)
                ++in_degree[c.target.entity];
        }
        std::set<std::string> ready;
        for (const auto& [id, deg] : in_degree)
            if (deg == 0) ready.insert(id);
        while (!ready.empty()) {
            std::string id = *ready.begin();
            ready.erase(ready.begin());
            topo_order_.push_back(id);
            for (const auto& next : out_edges[id])
                if (--in_degree[next] == 0) ready.insert(next);
        }
        if (topo_order_.size() != scenario_.entities.size())
            throw Error("scenario contains a cycle with no time_shifted edge");
    }

    std::string param_text(const Instance& inst, const std::string& name) const {
        auto it = inst.simulator->params.find(name);
        if (it != inst.simulator->params.end()) return it->second;
        throw Error("entity '" + inst.entity + "': missing parameter '" + name + "'");
    }

    double param_number(const Instance& inst, const std::string& name,
                        std::optional<double> fallback = std::nullopt) const {
        auto it = inst.simulator->params.find(name);
        if (it != inst.simulator->params.end()) {
            auto v = parse_number(it->second);
            if (!v)
                throw Error("entity '" + inst.entity + "': parameter '" + name +
                            "' is not numeric");
            return *v;
        }
        if (const VariableSpec* v = inst.component->find_variable(name); v && v->start)
            return *v->start;
        if (fallback) return *fallback;
        throw Error("entity '" + inst.entity + "': missing parameter '" + name + "'");
    }

    /// Delivered input values for an entity at time t, per target variable,
    /// ordered by source endpoint for determinism.
    std::map<std::string, std::vector<double>> gather_inputs(const Instance& inst) const {
        std::map<std::string, std::vector<double>> in;
        for (const auto& c : scenario_.connections) {  // connections are sorted
            if (c.target.entity != inst.entity) continue;
            const auto& pool = c.time_shifted ? prev_outputs_ : outputs_;
            auto it = pool.find({c.source.entity, c.source.variable});
            if (it == pool.end())
                throw Error("connection " + c.str() + ": source value unavailable");
            double v = it->second;
            if (c.transform) v = (*c.transform)(v);
            in[c.target.variable].push_back(v);
        }
        return in;
    }

    static double single_input(const std::map<std::string, std::vector<double>>& in,
                               const std::string& entity) {
        if (in.size() != 1 || in.begin()->second.size() != 1)
            throw Error("entity '" + entity + "' expects exactly one connected input");
        return in.begin()->second.front();
    }

    void execute(const Instance& inst, long t, RunResult& result) {
        auto in = gather_inputs(inst);
        if (inst.kind == "recorder") {
            for (const auto& [variable, values] : in)
                for (double v : values) result.samples.push_back({inst.entity, variable, t, v});
            return;
        }
        double out = 0;
        if (inst.kind == "constant") {
            out = param_number(inst, "value");
        } else if (inst.kind == "scale") {
            out = param_number(inst, "gain") * single_input(in, inst.entity);
        } else if (inst.kind == "unit_transform") {
            ConversionFn fn{param_number(inst, "factor"), param_number(inst, "offset", 0.0)};
            out = fn(single_input(in, inst.entity));
        } else if (inst.kind == "adder") {
            for (const auto& [variable, values] : in)
                for (double v : values) out += v;
        } else if (inst.kind == "aggregator") {
            std::vector<double> values;
            for (const auto& [variable, vs] : in)
                for (double v : vs) values.push_back(v);
            std::vector<double> weights;
            std::string op = param_text(inst, "op");
            if (op == "weighted_sum")
                for (const auto& w : split(param_text(inst, "weights"), ','))
                    weights.push_back(*parse_number(w));
            out = detail::aggregate_op(op, values, weights);
        } else if (inst.kind == "timeseries_source") {
            out = inst.series->at(t);
        } else {
            throw Error("unmapped builtin kind '" + inst.kind + "'");
        }
        outputs_[{inst.entity, inst.output_variable}] = out;
    }

    const Scenario& scenario_;
    const Catalog& catalog_;
    std::map<std::string, Instance> instances_;
    std::map<std::pair<std::string, std::string>, double> outputs_;
    std::map<std::pair<std::string, std::string>, double> prev_outputs_;
    std::vector<std::string> topo_order_;

  public:
    /// Post-processing path of the transformation functions: applies each one
    /// over the recorded series. Sample series are looked up by matching the
    /// attribute reference `<object>.<attribute>` against `(entity, variable)`.
    static std::map<std::string, double> evaluate_criteria(const RunResult& result,
                                                           const InfoModel& model) {
        std::map<std::string, double> out;
        auto series_of = [&](const AttrRef& ref) {
            std::vector<double> s;
            for (const auto& smp : result.samples)
                if (smp.entity == ref.object && smp.variable == ref.attribute)
                    s.push_back(smp.value);
            if (s.empty()) throw Error("no recorded samples for attribute '" + ref.str() + "'");
            return s;
        };
        for (const auto& t : model.transforms) {
            const Criterion* crit = model.find_criterion(t.output);
            if (!crit) throw Error("dangling criterion '" + t.output + "'");
            auto convert = [&](const AttrRef& ref, double v) {
                const Attribute* attr = model.find_attribute(ref);
                if (!attr) throw Error("dangling attribute '" + ref.str() + "'");
                if (same_dimension(attr->unit, crit->unit))
                    return conversion(attr->unit, crit->unit)(v);
                if (t.kind == TransformKind::affine) return v;  // affine redeclares the unit
                throw Error("transform '" + t.name + "': dimension mismatch between " +
                            ref.str() + " and criterion " + t.output);
            };
            double value = 0;
            switch (t.kind) {
                case TransformKind::direct:
                    value = convert(t.inputs[0], series_of(t.inputs[0]).back());
                    break;
                case TransformKind::affine:
                    value = t.affine_a * convert(t.inputs[0], series_of(t.inputs[0]).back()) +
                            t.affine_b;
                    break;
                case TransformKind::weighted_sum: {
                    for (std::size_t i = 0; i < t.inputs.size(); ++i) {
                        auto s = series_of(t.inputs[i]);
                        double mean = 0;
                        for (double v : s) mean += convert(t.inputs[i], v);
                        mean /= static_cast<double>(s.size());
                        value += t.weights[i] * mean;
                    }
                    break;
                }
                default: {  // sum, mean, min, max pool all samples of all inputs
                    std::vector<double> pooled;
                    for (const auto& ref : t.inputs)
                        for (double v : series_of(ref)) pooled.push_back(convert(ref, v));
                    value = detail::aggregate_op(t.kind_str(), pooled);
                }
            }
            out[t.output] = value;
        }
        return out;
    }
};

inline RunResult run(const Scenario& scenario, const Catalog& catalog, long duration_s,
                     const InfoModel* info_model = nullptr) {
    return Kernel(scenario, catalog).run(duration_s, info_model);
}

inline std::map<std::string, double> evaluate_criteria(const RunResult& result,
                                                       const InfoModel& model) {
    return Kernel::evaluate_criteria(result, model);
}

/// `entity,variable,time_s,value` CSV of the recorded samples.
inline std::string render_samples_csv(const RunResult& result) {
    std::string out = "entity,variable,time_s,value\n";
    for (const auto& s : result.samples)
        out += s.entity + "," + s.variable + "," + std::to_string(s.time_s) + "," +
               fmt_number(s.value) + "\n";
    return out;
}

inline TripleStore results_to_triples(const RunResult& result) {
    TripleStore store;
    auto lit = [](const std::string& s) { return literal(s); };
    std::size_t idx = 0;
    for (const auto& s : result.samples) {
        Term subj = iri(mint_iri("sample", std::to_string(idx++)));
        store.insert(subj, iri(vocab::isA), lit("sample"));
        store.insert(subj, iri(vocab::ofEntity), iri(mint_iri("entity", s.entity)));
        store.insert(subj, iri(vocab::ofVariable), lit(s.variable));
        store.insert(subj, iri(vocab::atTime), lit(std::to_string(s.time_s)));
        store.insert(subj, iri(vocab::hasValue), lit(fmt_number(s.value)));
    }
    for (const auto& [name, value] : result.criteria)
        store.insert(iri(mint_iri("criterion", name)), iri(vocab::hasValue),
                     lit(fmt_number(value)));
    return store;
}

}  // namespace coplan
