#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "coplan/catalog.hpp"
#include "coplan/info_model.hpp"
#include "coplan/kernel.hpp"
#include "coplan/scenario.hpp"
#include "coplan/topics.hpp"

using namespace coplan;

namespace {

// Catalog covering every built-in model kind. Multi-input blocks declare one
// variable per port because a target endpoint accepts at most one connection.
const char* kKernelCatalog = R"(component Const
  general name=Const software_type=simulation_model
  technical api=component_api builtin=constant
  mathematical temporal_resolution_s=1
  variable out causality=output variability=continuous unit=W topic=active_power
  variable value causality=parameter variability=fixed unit=W topic=active_power

component Gain
  general name=Gain software_type=simulation_model
  technical api=component_api builtin=scale
  mathematical temporal_resolution_s=1
  variable in causality=input variability=continuous unit=W topic=active_power
  variable out causality=output variability=continuous unit=W topic=active_power
  variable gain causality=parameter variability=fixed unit=one topic=scaling

component Xform
  general name=Xform software_type=simulation_model
  technical api=component_api builtin=unit_transform
  mathematical temporal_resolution_s=1
  variable in causality=input variability=continuous unit=kW topic=active_power
  variable out causality=output variability=continuous unit=W topic=active_power
  variable factor causality=parameter variability=fixed unit=one topic=scaling
  variable offset causality=parameter variability=fixed unit=one topic=scaling

component Add2
  general name=Add2 software_type=simulation_model
  technical api=component_api builtin=adder
  mathematical temporal_resolution_s=1
  variable in1 causality=input variability=continuous unit=W topic=active_power
  variable in2 causality=input variability=continuous unit=W topic=active_power
  variable out causality=output variability=continuous unit=W topic=active_power

component Agg2
  general name=Agg2 software_type=simulation_model
  technical api=component_api builtin=aggregator
  mathematical temporal_resolution_s=1
  variable in1 causality=input variability=continuous unit=W topic=active_power
  variable in2 causality=input variability=continuous unit=W topic=active_power
  variable out causality=output variability=continuous unit=W topic=active_power
  variable op causality=parameter variability=fixed unit=one topic=scaling
  variable weights causality=parameter variability=fixed unit=one topic=scaling

component Rec
  general name=Rec software_type=data_analysis_tool
  technical api=component_api builtin=recorder
  mathematical temporal_resolution_s=1
  variable in causality=input variability=continuous unit=W topic=active_power

component Src
  general name=Src software_type=simulation_model
  technical api=component_api builtin=timeseries_source
  mathematical temporal_resolution_s=1
  variable out causality=output variability=continuous unit=W topic=active_power
  variable file causality=parameter variability=fixed unit=one topic=scaling
  variable column causality=parameter variability=fixed unit=one topic=scaling
)";

Catalog kernel_catalog() {
    std::istringstream in(kKernelCatalog);
    return parse_catalog(in);
}

Scenario make(const std::string& body, const Catalog& cat, long base_step = 1) {
    std::istringstream in("scenario k base_step=" + std::to_string(base_step) + "\n" + body);
    return parse_scenario(in, cat);
}

std::vector<double> values_of(const RunResult& r, const std::string& entity,
                              const std::string& variable) {
    std::vector<double> out;
    for (const auto& s : r.samples)
        if (s.entity == entity && s.variable == variable) out.push_back(s.value);
    return out;
}

std::string write_temp(const std::string& name, const std::string& content) {
    auto path = (std::filesystem::temp_directory_path() / name).string();
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("constant -> scale -> recorder") {
    Catalog cat = kernel_catalog();
    Scenario s = make(
        "simulator c component=Const step=1 param value=2\n"
        "simulator g component=Gain step=1 param gain=3\n"
        "simulator r component=Rec step=1\n"
        "entity c1 simulator=c model=m\n"
        "entity g1 simulator=g model=m\n"
        "entity r1 simulator=r model=m\n"
        "connect c1.out -> g1.in\n"
        "connect g1.out -> r1.in\n",
        cat);
    RunResult r = run(s, cat, 3);
    CHECK(values_of(r, "r1", "in") == std::vector<double>{6, 6, 6});
    // samples carry the step times
    REQUIRE(r.samples.size() == 3);
    CHECK(r.samples[0].time_s == 0);
    CHECK(r.samples[2].time_s == 2);
}

TEST_CASE("unit_transform applies factor and offset") {
    Catalog cat = kernel_catalog();
    Scenario s = make(
        "simulator c component=Const step=1 param value=2\n"
        "simulator x component=Xform step=1 param factor=1000 param offset=5\n"
        "simulator r component=Rec step=1\n"
        "entity c1 simulator=c model=m\n"
        "entity x1 simulator=x model=m\n"
        "entity r1 simulator=r model=m\n"
        "connect c1.out -> x1.in\n"
        "connect x1.out -> r1.in\n",
        cat);
    RunResult r = run(s, cat, 1);
    CHECK(values_of(r, "r1", "in") == std::vector<double>{2005});
}

TEST_CASE("chained unit transforms are neutral") {
    Catalog cat = kernel_catalog();
    Scenario s = make(
        "simulator c component=Const step=1 param value=7\n"
        "simulator up component=Xform step=1 param factor=1000\n"
        "simulator down component=Xform step=1 param factor=0.001\n"
        "simulator r component=Rec step=1\n"
        "entity c1 simulator=c model=m\n"
        "entity u1 simulator=up model=m\n"
        "entity d1 simulator=down model=m\n"
        "entity r1 simulator=r model=m\n"
        "connect c1.out -> u1.in\n"
        "connect u1.out -> d1.in\n"
        "connect d1.out -> r1.in\n",
        cat);
    RunResult r = run(s, cat, 1);
    REQUIRE(r.samples.size() == 1);
    CHECK(r.samples[0].value == doctest::Approx(7.0).epsilon(1e-9));
}

TEST_CASE("adder and aggregator over two ports") {
    Catalog cat = kernel_catalog();
    auto body = [](const std::string& mid, const std::string& params) {
        return "simulator a component=Const step=1 param value=2\n"
               "simulator b component=Const step=1 param value=4\n"
               "simulator m component=" + mid + " step=1" + params + "\n"
               "simulator r component=Rec step=1\n"
               "entity a1 simulator=a model=m\n"
               "entity b1 simulator=b model=m\n"
               "entity m1 simulator=m model=m\n"
               "entity r1 simulator=r model=m\n"
               "connect a1.out -> m1.in1\n"
               "connect b1.out -> m1.in2\n"
               "connect m1.out -> r1.in\n";
    };
    auto result = [&](const std::string& mid, const std::string& params) {
        Scenario s = make(body(mid, params), cat);
        return run(s, cat, 1).samples.at(0).value;
    };
    CHECK(result("Add2", "") == 6.0);
    CHECK(result("Agg2", " param op=mean") == 3.0);
    CHECK(result("Agg2", " param op=sum") == 6.0);
    CHECK(result("Agg2", " param op=min") == 2.0);
    CHECK(result("Agg2", " param op=max") == 4.0);
    CHECK(result("Agg2", " param op=weighted_sum param weights=0.25,0.75") ==
          doctest::Approx(3.5).epsilon(1e-12));
    CHECK_THROWS_AS(result("Agg2", " param op=weighted_sum param weights=0.25"), Error);
    CHECK_THROWS_AS(result("Agg2", " param op=median"), Error);
}

TEST_CASE("time-shifted self loop integrates") {
    // x(t+1) = x(t) + 1 with x(0) taken from the default start value 0
    Catalog cat = kernel_catalog();
    Scenario s = make(
        "simulator c component=Const step=1 param value=1\n"
        "simulator a component=Add2 step=1\n"
        "simulator r component=Rec step=1\n"
        "entity c1 simulator=c model=m\n"
        "entity a1 simulator=a model=m\n"
        "entity r1 simulator=r model=m\n"
        "connect c1.out -> a1.in1\n"
        "connect a1.out -> a1.in2 time_shifted\n"
        "connect a1.out -> r1.in\n",
        cat);
    RunResult r = run(s, cat, 3);
    CHECK(values_of(r, "r1", "in") == std::vector<double>{1, 2, 3});

    // a declared start value seeds the t=0 delivery instead of 0
    Catalog seeded = kernel_catalog();
    for (auto& c : seeded.components)
        for (auto& v : c.variables)
            if (c.id == "Add2" && v.name == "out") v.start = 10.0;
    Scenario s2 = make(
        "simulator c component=Const step=1 param value=1\n"
        "simulator a component=Add2 step=1\n"
        "simulator r component=Rec step=1\n"
        "entity c1 simulator=c model=m\n"
        "entity a1 simulator=a model=m\n"
        "entity r1 simulator=r model=m\n"
        "connect c1.out -> a1.in1\n"
        "connect a1.out -> a1.in2 time_shifted\n"
        "connect a1.out -> r1.in\n",
        seeded);
    CHECK(values_of(run(s2, seeded, 3), "r1", "in") == std::vector<double>{11, 12, 13});
}

TEST_CASE("time series source with multi-rate stepping") {
    Catalog cat = kernel_catalog();
    std::string ts = write_temp("coplan_kernel_ts.csv",
                                "time_s,p,q\n0,10,-1\n1,20,-2\n2,30,-3\n3,40,-4\n");
    Scenario s = make(
        "simulator src component=Src step=2 param file=" + ts + " param column=p\n"
        "simulator r component=Rec step=1\n"
        "entity s1 simulator=src model=m\n"
        "entity r1 simulator=r model=m\n"
        "connect s1.out -> r1.in\n",
        cat);
    // the source only executes on even steps; the recorder sees held values
    RunResult r = run(s, cat, 4);
    CHECK(values_of(r, "r1", "in") == std::vector<double>{10, 10, 30, 30});
}

TEST_CASE("time series loading errors") {
    std::string ok = write_temp("coplan_ts_ok.csv", "time_s,v\n0,1\n5,2\n");
    detail::TimeSeries ts = detail::load_timeseries(ok, "v");
    CHECK(ts.at(0) == 1.0);
    CHECK(ts.at(4) == 1.0);  // step-wise constant
    CHECK(ts.at(5) == 2.0);
    CHECK(ts.at(100) == 2.0);
    CHECK_THROWS_AS(ts.at(-1), Error);  // before the first point

    CHECK_THROWS_AS(detail::load_timeseries(ok, "nosuch"), Error);
    CHECK_THROWS_AS(detail::load_timeseries("/nonexistent/ts.csv", "v"), Error);
    std::string bad_header = write_temp("coplan_ts_bad1.csv", "t,v\n0,1\n");
    CHECK_THROWS_AS(detail::load_timeseries(bad_header, "v"), Error);
    std::string non_monotone = write_temp("coplan_ts_bad2.csv", "time_s,v\n5,1\n5,2\n");
    CHECK_THROWS_AS(detail::load_timeseries(non_monotone, "v"), ParseError);
    std::string short_row = write_temp("coplan_ts_bad3.csv", "time_s,v\n0\n");
    CHECK_THROWS_AS(detail::load_timeseries(short_row, "v"), ParseError);
}

TEST_CASE("conservation across an adder") {
    Catalog cat = kernel_catalog();
    Scenario s = make(
        "simulator c1s component=Const step=1 param value=2\n"
        "simulator c2s component=Const step=1 param value=4\n"
        "simulator g1s component=Gain step=1 param gain=3\n"
        "simulator g2s component=Gain step=1 param gain=5\n"
        "simulator as component=Add2 step=1\n"
        "simulator r1s component=Rec step=1\n"
        "simulator r2s component=Rec step=1\n"
        "simulator r3s component=Rec step=1\n"
        "entity c1 simulator=c1s model=m\n"
        "entity c2 simulator=c2s model=m\n"
        "entity g1 simulator=g1s model=m\n"
        "entity g2 simulator=g2s model=m\n"
        "entity a1 simulator=as model=m\n"
        "entity r1 simulator=r1s model=m\n"
        "entity r2 simulator=r2s model=m\n"
        "entity r3 simulator=r3s model=m\n"
        "connect c1.out -> g1.in\n"
        "connect c2.out -> g2.in\n"
        "connect g1.out -> a1.in1\n"
        "connect g2.out -> a1.in2\n"
        "connect g1.out -> r1.in\n"
        "connect g2.out -> r2.in\n"
        "connect a1.out -> r3.in\n",
        cat);
    RunResult r = run(s, cat, 5);
    auto p1 = values_of(r, "r1", "in");
    auto p2 = values_of(r, "r2", "in");
    auto sum = values_of(r, "r3", "in");
    REQUIRE(p1.size() == 5);
    REQUIRE(p2.size() == 5);
    REQUIRE(sum.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(sum[i] == p1[i] + p2[i]);  // exact
}

TEST_CASE("run errors") {
    Catalog cat = kernel_catalog();
    Scenario s = make(
        "simulator c component=Const step=60 param value=1\n"
        "entity c1 simulator=c model=m\n",
        cat, 60);
    CHECK_THROWS_AS(run(s, cat, 0), Error);
    CHECK_THROWS_AS(run(s, cat, -60), Error);
    CHECK_THROWS_AS(run(s, cat, 90), Error);  // not a multiple of the base step
    CHECK_NOTHROW(run(s, cat, 60));

    // plan-only components (no builtin) cannot execute
    Taxonomy tax = Taxonomy::load(std::string(FIXTURES_DIR) + "/taxonomy.txt");
    Catalog plan = load_catalog(std::string(FIXTURES_DIR) + "/cpes-3.cat", &tax);
    Scenario planned = load_scenario(std::string(FIXTURES_DIR) + "/pv-house-grid.scn", plan);
    CHECK_THROWS_WITH_AS(run(planned, plan, 60),
                         "component 'GridSim' is plan-only: no builtin kind declared", Error);

    // a cycle with no time-shifted edge cannot be scheduled
    Scenario cyclic = make(
        "simulator g component=Gain step=1 param gain=1\n"
        "simulator h component=Gain step=1 param gain=1\n"
        "entity g1 simulator=g model=m\n"
        "entity h1 simulator=h model=m\n"
        "connect g1.out -> h1.in\n"
        "connect h1.out -> g1.in\n",
        cat);
    CHECK_THROWS_WITH_AS(run(cyclic, cat, 1),
                         "scenario contains a cycle with no time_shifted edge", Error);

    // scale requires exactly one connected input
    Scenario dangling = make(
        "simulator g component=Gain step=1 param gain=1\n"
        "entity g1 simulator=g model=m\n",
        cat);
    CHECK_THROWS_AS(run(dangling, cat, 1), Error);

    // constant requires its parameter (no start fallback declared)
    Scenario no_param = make(
        "simulator c component=Const step=1\n"
        "entity c1 simulator=c model=m\n",
        cat);
    CHECK_THROWS_AS(run(no_param, cat, 1), Error);
}

TEST_CASE("aggregate_op oracle: 100 randomized value sets") {
    std::mt19937 rng(2026);
    std::uniform_int_distribution<int> n_dist(1, 8);
    std::uniform_real_distribution<double> v_dist(-100.0, 100.0);
    for (int trial = 0; trial < 100; ++trial) {
        int n = n_dist(rng);
        std::vector<double> values, weights;
        for (int i = 0; i < n; ++i) {
            values.push_back(v_dist(rng));
            weights.push_back(v_dist(rng) / 100.0);
        }
        double sum = 0, lo = values[0], hi = values[0], wsum = 0;
        for (int i = 0; i < n; ++i) {
            sum += values[i];
            lo = std::min(lo, values[i]);
            hi = std::max(hi, values[i]);
            wsum += weights[i] * values[i];
        }
        CHECK(detail::aggregate_op("sum", values) == sum);
        CHECK(detail::aggregate_op("mean", values) ==
              doctest::Approx(sum / n).epsilon(1e-12));
        CHECK(detail::aggregate_op("min", values) == lo);
        CHECK(detail::aggregate_op("max", values) == hi);
        CHECK(detail::aggregate_op("weighted_sum", values, weights) ==
              doctest::Approx(wsum).epsilon(1e-12));
    }
    CHECK_THROWS_AS(detail::aggregate_op("sum", {}), Error);
    CHECK_THROWS_AS(detail::aggregate_op("weighted_sum", {1.0}, {}), Error);
    CHECK_THROWS_AS(detail::aggregate_op("median", {1.0}), Error);
}

TEST_CASE("criteria evaluation") {
    std::istringstream model_text(
        "domain D\n"
        "  object o\n"
        "    attribute a unit=kW topic=x role=derived\n"
        "    attribute b unit=W topic=x role=derived\n"
        "    attribute c unit=one topic=x role=input\n"
        "evaluation e\n"
        "  facet f\n"
        "    criterion last_a unit=W\n"
        "    criterion total unit=W\n"
        "    criterion blend unit=W\n"
        "    criterion level unit=one\n"
        "    criterion low unit=W\n"
        "transform t1 kind=direct inputs=o.a output=last_a\n"
        "transform t2 kind=sum inputs=o.a,o.b output=total\n"
        "transform t3 kind=weighted_sum(0.25,0.75) inputs=o.a,o.b output=blend\n"
        "transform t4 kind=affine(0.5,0.1) inputs=o.c output=level\n"
        "transform t5 kind=min inputs=o.b output=low\n");
    InfoModel model = parse_info_model(model_text);

    RunResult r;
    for (long t = 0; t < 3; ++t) {
        r.samples.push_back({"o", "a", t, static_cast<double>(t + 1)});  // kW: 1,2,3
        r.samples.push_back({"o", "b", t, 10.0 * (t + 1)});              // W: 10,20,30
        r.samples.push_back({"o", "c", t, 4.0});
    }
    auto crit = evaluate_criteria(r, model);

    // direct: last sample of o.a converted kW -> W
    CHECK(crit.at("last_a") == doctest::Approx(3000.0).epsilon(1e-12));
    // sum pools every converted sample: (1+2+3)*1000 + 10+20+30
    CHECK(crit.at("total") == doctest::Approx(6060.0).epsilon(1e-12));
    // weighted_sum combines per-input means: 0.25*2000 + 0.75*20
    CHECK(crit.at("blend") == doctest::Approx(515.0).epsilon(1e-12));
    // affine on the last sample: 0.5*4 + 0.1
    CHECK(crit.at("level") == doctest::Approx(2.1).epsilon(1e-12));
    CHECK(crit.at("low") == doctest::Approx(10.0).epsilon(1e-12));

    // a transform whose input series was never recorded is an error
    RunResult empty;
    CHECK_THROWS_AS(evaluate_criteria(empty, model), Error);
}

TEST_CASE("sample rendering and triple projection") {
    RunResult r;
    r.samples = {{"e1", "v", 0, 1.5}, {"e1", "v", 60, 2.0}, {"e2", "w", 0, -3.0}};
    r.criteria = {{"crit", 42.0}};

    CHECK(render_samples_csv(r) ==
          "entity,variable,time_s,value\n"
          "e1,v,0,1.5\n"
          "e1,v,60,2\n"
          "e2,w,0,-3\n");

    TripleStore store = results_to_triples(r);
    CHECK(store.size() == 3 * 5 + 1);
    CHECK(store.contains({iri("urn:coplan:sample:0"), iri(vocab::isA), literal("sample")}));
    CHECK(store.contains({iri("urn:coplan:sample:1"), iri(vocab::ofEntity),
                          iri("urn:coplan:entity:e1")}));
    CHECK(store.contains({iri("urn:coplan:sample:1"), iri(vocab::atTime), literal("60")}));
    CHECK(store.contains({iri("urn:coplan:sample:2"), iri(vocab::hasValue), literal("-3")}));
    CHECK(store.contains({iri("urn:coplan:criterion:crit"), iri(vocab::hasValue),
                          literal("42")}));
    // serialization of the result store is byte-stable
    CHECK(store.serialize() == results_to_triples(r).serialize());
}
