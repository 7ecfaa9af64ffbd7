#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "coplan/catalog.hpp"
#include "coplan/topics.hpp"

using namespace coplan;

namespace {

const std::string kCatalogPath = std::string(FIXTURES_DIR) + "/cpes-3.cat";
const std::string kDemoCatalogPath = std::string(FIXTURES_DIR) + "/demo.cat";
const std::string kTaxonomyPath = std::string(FIXTURES_DIR) + "/taxonomy.txt";

Catalog parse_text(const std::string& text, const Taxonomy* tax = nullptr,
                   std::vector<std::string>* warnings = nullptr) {
    std::istringstream in(text);
    return parse_catalog(in, tax, UnitTable::builtin(), warnings);
}

std::string minimal(const std::string& variable_line) {
    return "component X\n"
           "  general name=X contact=x@example.org software_type=simulation_model license=MIT\n"
           "  technical api=component_api platform=any\n"
           "  mathematical temporal_resolution_s=60\n"
           "  domains Electricity\n" +
           variable_line;
}

}  // namespace

TEST_CASE("fixture catalog loads") {
    Taxonomy tax = Taxonomy::load(kTaxonomyPath);
    std::vector<std::string> warnings;
    Catalog cat = load_catalog(kCatalogPath, &tax, UnitTable::builtin(), &warnings);
    CHECK(warnings.empty());

    REQUIRE(cat.components.size() == 3);
    CHECK(cat.components[0].id == "GridSim");  // sorted by id
    CHECK(cat.components[1].id == "HouseholdSim");
    CHECK(cat.components[2].id == "PVSim");

    const ComponentRecord* pv = cat.find("PVSim");
    REQUIRE(pv);
    CHECK(pv->general.name == "PV Simulator");  // free-text value with a space
    CHECK(pv->general.software_type == "simulation_model");
    CHECK(pv->technical.api == "component_api");
    CHECK(pv->mathematical.temporal_resolution_s == 60.0);
    REQUIRE(pv->domains.size() == 1);
    CHECK(pv->domains[0].term == "Electricity");

    const VariableSpec* p_gen = pv->find_variable("p_gen");
    REQUIRE(p_gen);
    CHECK(p_gen->causality == Causality::output);
    CHECK(p_gen->variability == Variability::continuous);
    CHECK(p_gen->unit.symbol == "kW");
    CHECK(p_gen->topic.term == "active_power");
    CHECK(p_gen->min == 0.0);
    CHECK(p_gen->max == 10.0);
    CHECK_FALSE(p_gen->start.has_value());

    const ComponentRecord* house = cat.find("HouseholdSim");
    REQUIRE(house);
    CHECK(house->technical.api == "fmi");
    CHECK(house->mathematical.spatial_resolution == "building");
    CHECK(house->domains.size() == 2);
    CHECK(house->find_variable("price")->unit.symbol == "EUR/kWh");

    const ComponentRecord* grid = cat.find("GridSim");
    REQUIRE(grid);
    CHECK(grid->find_variable("p_node")->min == -1e6);
    CHECK(grid->find_variable("p_node")->max == 1e6);
}

TEST_CASE("fault injection: every stated invariant rejects") {
    // bad causality token: error names the four legal values
    try {
        parse_text(minimal("  variable v causality=param variability=fixed unit=W topic=x\n"));
        FAIL("expected error");
    } catch (const Error& e) {
        std::string msg = e.what();
        CHECK(msg.find("input") != std::string::npos);
        CHECK(msg.find("output") != std::string::npos);
        CHECK(msg.find("parameter") != std::string::npos);
        CHECK(msg.find("calculatedParameter") != std::string::npos);
    }

    // duplicate variable name
    CHECK_THROWS_AS(
        parse_text(minimal("  variable p causality=input variability=continuous unit=W topic=x\n"
                           "  variable p causality=output variability=continuous unit=W topic=x\n")),
        Error);
    // duplicate component id
    CHECK_THROWS_AS(parse_text(minimal("") + "component X\n"), ParseError);
    // min > max
    CHECK_THROWS_AS(parse_text(minimal("  variable v causality=input variability=continuous "
                                       "unit=W topic=x min=5 max=1\n")),
                    Error);
    // parameter causality requires constant or fixed variability
    CHECK_THROWS_AS(parse_text(minimal("  variable v causality=parameter variability=continuous "
                                       "unit=W topic=x\n")),
                    Error);
    // bad variability token
    CHECK_THROWS_AS(parse_text(minimal("  variable v causality=input variability=sometimes "
                                       "unit=W topic=x\n")),
                    Error);
    // unit parse failure
    CHECK_THROWS_AS(parse_text(minimal("  variable v causality=input variability=continuous "
                                       "unit=bogus topic=x\n")),
                    ParseError);
    // invalid software_type
    CHECK_THROWS_AS(
        parse_text("component X\n  general software_type=magic\n"
                   "  technical api=component_api\n  mathematical temporal_resolution_s=1\n"),
        Error);
    // invalid api
    CHECK_THROWS_AS(
        parse_text("component X\n  general software_type=simulation_model\n"
                   "  technical api=serial_cable\n  mathematical temporal_resolution_s=1\n"),
        Error);
    // non-positive temporal resolution
    CHECK_THROWS_AS(
        parse_text("component X\n  general software_type=simulation_model\n"
                   "  technical api=fmi\n  mathematical temporal_resolution_s=0\n"),
        Error);
    // missing mandatory variable keys
    CHECK_THROWS_AS(parse_text(minimal("  variable v causality=input unit=W topic=x\n")),
                    ParseError);
    CHECK_THROWS_AS(parse_text(minimal("  variable v\n")), ParseError);
    // content before any component block
    CHECK_THROWS_AS(parse_text("general name=X\n"), ParseError);

    // calculatedParameter is accepted with fixed variability
    CHECK_NOTHROW(parse_text(minimal(
        "  variable v causality=calculatedParameter variability=fixed unit=W topic=x\n")));
}

TEST_CASE("unregistered topics and domains warn") {
    Taxonomy tax;
    tax.add("known");
    std::vector<std::string> warnings;
    parse_text(minimal("  variable v causality=input variability=continuous unit=W "
                       "topic=mystery\n"),
               &tax, &warnings);
    REQUIRE(warnings.size() == 2);  // domain Electricity and topic mystery
    CHECK(warnings[0].find("Electricity") != std::string::npos);
    CHECK(warnings[1].find("mystery") != std::string::npos);
}

TEST_CASE("to_triples projection") {
    Taxonomy tax = Taxonomy::load(kTaxonomyPath);
    Catalog cat = load_catalog(kCatalogPath, &tax);
    TripleStore store = to_triples(cat);

    CHECK(store.contains({iri("urn:coplan:component:PVSim"), iri(vocab::hasVariable),
                          iri("urn:coplan:variable:PVSim.p_gen")}));
    CHECK(store.contains({iri("urn:coplan:variable:PVSim.p_gen"), iri(vocab::hasCausality),
                          literal("output")}));
    CHECK(store.contains({iri("urn:coplan:component:PVSim"), iri(vocab::inDomain),
                          iri("urn:coplan:domain:Electricity")}));
}

TEST_CASE("triple round trip") {
    Taxonomy tax = Taxonomy::load(kTaxonomyPath);
    for (const auto& path : {kCatalogPath, kDemoCatalogPath}) {
        Catalog cat = load_catalog(path, &tax);
        TripleStore store = to_triples(cat);
        CHECK(catalog_from_triples(store, &tax) == cat);
        // cross-module: via serialized N-Triples text
        CHECK(catalog_from_triples(TripleStore::parse(store.serialize()), &tax) == cat);
    }
}

TEST_CASE("export_meta") {
    Catalog cat = load_catalog(kCatalogPath);
    const ComponentRecord* pv = cat.find("PVSim");
    REQUIRE(pv);

    std::string doc = export_meta(*pv);
    CHECK(doc == export_meta(*pv));  // byte-stable

    auto json = nlohmann::json::parse(doc);
    CHECK(json.at("type") == "time-based");
    const auto& model = json.at("models").at("PV Simulator");
    CHECK(model.at("params").empty());
    REQUIRE(model.at("attrs").size() == 1);
    CHECK(model.at("attrs")[0].at("name") == "p_gen");
    CHECK(model.at("attrs")[0].at("unit") == "kW");
    CHECK(model.at("attrs")[0].at("min") == 0.0);
    CHECK(model.at("attrs")[0].at("max") == 10.0);

    // component with only parameters: empty attrs, non-empty params
    Catalog params_only = parse_text(minimal(
        "  variable k causality=parameter variability=fixed unit=one topic=x\n"));
    auto pj = nlohmann::json::parse(export_meta(params_only.components[0]));
    CHECK(pj.at("models").at("X").at("attrs").empty());
    REQUIRE(pj.at("models").at("X").at("params").size() == 1);
    CHECK(pj.at("models").at("X").at("params")[0].at("name") == "k");
    CHECK(pj.at("models").at("X").at("params")[0].at("min").is_null());
}

TEST_CASE("export_meta partitions variables by causality") {
    Taxonomy tax = Taxonomy::load(kTaxonomyPath);
    for (const auto& path : {kCatalogPath, kDemoCatalogPath}) {
        Catalog cat = load_catalog(path, &tax);
        for (const auto& c : cat.components) {
            auto json = nlohmann::json::parse(export_meta(c));
            const auto& model = json.at("models").at(c.general.name);
            std::set<std::string> in_params, in_attrs;
            for (const auto& e : model.at("params")) in_params.insert(e.at("name"));
            for (const auto& e : model.at("attrs")) in_attrs.insert(e.at("name"));
            CHECK(in_params.size() + in_attrs.size() == c.variables.size());
            for (const auto& v : c.variables) {
                bool flow = v.causality == Causality::input || v.causality == Causality::output;
                CHECK(in_attrs.count(v.name) == (flow ? 1u : 0u));
                CHECK(in_params.count(v.name) == (flow ? 0u : 1u));
            }
        }
    }
}

TEST_CASE("free-text key=value lines") {
    Catalog cat = parse_text(
        "component X\n"
        "  general name=Long Name With Spaces contact=Jane Doe <jane@example.org> "
        "software_type=controller license=GPL-3.0\n"
        "  technical api=other platform=linux x86\n"
        "  mathematical temporal_resolution_s=0.5\n");
    const ComponentRecord& c = cat.components[0];
    CHECK(c.general.name == "Long Name With Spaces");
    CHECK(c.general.contact == "Jane Doe <jane@example.org>");
    CHECK(c.general.license == "GPL-3.0");
    CHECK(c.technical.platform == "linux x86");
    CHECK(c.mathematical.temporal_resolution_s == 0.5);
}
