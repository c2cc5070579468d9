#include "smdiff/config.hpp"
#include "smdiff/errors.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <algorithm>
#include <filesystem>

using namespace smd;
using nlohmann::json;

namespace {

json base_demo()
{
    return json::parse(R"({
      "experiment": "demo",
      "mesh": {"N": 16, "diagonal": "left"},
      "order": 1,
      "species": {
        "n": 3,
        "names": ["a", "b", "c"],
        "diffusivity": [{"i": 1, "j": 2, "value": 1.0}, {"i": 3, "j": 1, "value": 2.0}, {"i": 2, "j": 3, "value": 3.0}],
        "molar_masses": [1.0, 2.0, 3.0],
        "RT": 2.5
      },
      "gamma": 1.0,
      "epsilon": 1e-11,
      "max_iterations": 30,
      "boundary": [
        {"region": 1, "kind": "dirichlet", "side": "left", "values": [0.2, 0.3, 0.5]},
        {"region": 2, "kind": "dirichlet", "side": "right", "values": [0.5, 0.3, 0.2]}
      ]
    })");
}

std::vector<std::string> error_keys(const json& doc)
{
    try {
        parse_config(doc.dump());
    } catch (const ConfigError& e) {
        return e.keys();
    }
    return {};
}

bool has(const std::vector<std::string>& keys, const std::string& k)
{
    return std::find(keys.begin(), keys.end(), k) != keys.end();
}

}  // namespace

TEST(Config, ParsesValidDocument)
{
    const RunConfig c = parse_config(base_demo().dump());
    EXPECT_EQ(c.experiment, "demo");
    EXPECT_EQ(c.meshes, std::vector<int>{16});
    EXPECT_EQ(c.diagonal, Diagonal::Left);
    ASSERT_TRUE(c.species);
    EXPECT_EQ(c.species->n, 3);
    EXPECT_EQ(c.species->diffusivity(0, 2), 2.0);
    EXPECT_EQ(c.species->diffusivity(2, 0), 2.0);
    EXPECT_EQ(c.species->rt, 2.5);
    EXPECT_EQ(c.boundary.size(), 2u);
    EXPECT_EQ(c.seed, 42u);
    EXPECT_TRUE(c.strict);
}

TEST(Config, MissingGammaNamesKey)
{
    json doc = base_demo();
    doc.erase("gamma");
    try {
        parse_config(doc.dump());
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.keys(), std::vector<std::string>{"gamma"});
        EXPECT_NE(std::string(e.what()).find("gamma"), std::string::npos);
    }
}

TEST(Config, EveryOffendingKeyListed)
{
    json doc = base_demo();
    doc.erase("epsilon");
    doc["order"] = 3;
    doc["colour"] = "blue";
    doc["species"]["molar_masses"][1] = -1.0;
    doc["species"]["diffusivity"][0]["value"] = 0.0;
    doc["boundary"][1]["side"] = "middle";
    doc["mesh"]["N"] = 10;
    const auto keys = error_keys(doc);
    for (const char* k : {"epsilon", "order", "colour", "species.molar_masses[1]", "species.diffusivity[0].value",
                          "boundary[1].side", "mesh.N"}) {
        EXPECT_TRUE(has(keys, k)) << k;
    }
}

TEST(Config, DiffusivityTableValidation)
{
    json doc = base_demo();
    doc["species"]["diffusivity"].erase(2);
    EXPECT_TRUE(has(error_keys(doc), "species.diffusivity"));

    doc = base_demo();
    doc["species"]["diffusivity"].push_back({{"i", 2}, {"j", 1}, {"value", 5.0}});
    EXPECT_TRUE(has(error_keys(doc), "species.diffusivity[3]"));

    doc = base_demo();
    doc["species"]["diffusivity"].push_back({{"i", 2}, {"j", 2}, {"value", 5.0}});
    EXPECT_TRUE(has(error_keys(doc), "species.diffusivity[3]"));

    doc = base_demo();
    doc["species"]["diffusivity"][1]["j"] = 4;
    EXPECT_TRUE(has(error_keys(doc), "species.diffusivity[1].j"));

    // Repeating a pair with the same value is harmless.
    doc = base_demo();
    doc["species"]["diffusivity"].push_back({{"i", 2}, {"j", 1}, {"value", 1.0}});
    EXPECT_TRUE(error_keys(doc).empty());
}

TEST(Config, ExperimentSpecificRequirements)
{
    json spec = json::parse(R"({"experiment": "spectrum"})");
    const auto keys = error_keys(spec);
    for (const char* k : {"species", "gamma", "states"}) EXPECT_TRUE(has(keys, k)) << k;
    EXPECT_FALSE(has(keys, "mesh"));

    json conv = base_demo();
    conv["experiment"] = "convergence";
    conv["mesh"]["N"] = json::array({4, 8});
    EXPECT_TRUE(has(error_keys(conv), "mesh.N"));
    conv["mesh"]["N"] = json::array({4, 8, 16});
    EXPECT_TRUE(error_keys(conv).empty());

    json bad = base_demo();
    bad["experiment"] = "fly";
    EXPECT_TRUE(has(error_keys(bad), "experiment"));
}

TEST(Config, RejectsMalformedJson)
{
    EXPECT_THROW(parse_config("{not json"), ConfigError);
    EXPECT_THROW(parse_config("[1, 2]"), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, BundledConfigsParse)
{
    int count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(SMDIFF_CONFIG_DIR)) {
        if (entry.path().extension() != ".json" || entry.path().filename() == "schema.json") continue;
        EXPECT_NO_THROW(load_config(entry.path())) << entry.path();
        ++count;
    }
    EXPECT_GE(count, 5);
}
