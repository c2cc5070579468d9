#include "smdiff/config.hpp"

#include "smdiff/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace smd {

namespace {

using nlohmann::json;

/// Collects every problem before throwing, so a user sees all offending keys at once.
class Issues {
public:
    void add(const std::string& key, const std::string& message)
    {
        keys_.push_back(key);
        messages_.push_back(key + ": " + message);
    }
    bool empty() const { return keys_.empty(); }
    [[noreturn]] void raise() const
    {
        std::ostringstream msg;
        msg << "invalid configuration";
        for (const auto& m : messages_) msg << "; " << m;
        throw ConfigError(msg.str(), keys_);
    }

private:
    std::vector<std::string> keys_;
    std::vector<std::string> messages_;
};

const std::set<std::string> kTopKeys{"experiment", "mesh",  "order", "species", "gamma",  "epsilon", "max_iterations",
                                     "boundary",   "states", "mass_flux", "output", "strict", "vtk", "seed", "$schema"};

std::optional<double> number(const json& j, const std::string& key, Issues& issues)
{
    if (!j.is_number()) {
        issues.add(key, "expected a number");
        return std::nullopt;
    }
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
        issues.add(key, "must be finite");
        return std::nullopt;
    }
    return v;
}

std::optional<int> integer(const json& j, const std::string& key, Issues& issues)
{
    if (!j.is_number_integer()) {
        issues.add(key, "expected an integer");
        return std::nullopt;
    }
    return j.get<int>();
}

std::optional<std::vector<double>> number_list(const json& j, const std::string& key, Issues& issues)
{
    if (!j.is_array()) {
        issues.add(key, "expected an array of numbers");
        return std::nullopt;
    }
    std::vector<double> out;
    bool ok = true;
    for (std::size_t k = 0; k < j.size(); ++k) {
        auto v = number(j[k], key + "[" + std::to_string(k) + "]", issues);
        ok = ok && v.has_value();
        if (v) out.push_back(*v);
    }
    if (!ok) return std::nullopt;
    return out;
}

void parse_mesh(const json& j, RunConfig& cfg, Issues& issues)
{
    if (!j.is_object()) {
        issues.add("mesh", "expected an object");
        return;
    }
    for (const auto& [k, _] : j.items()) {
        if (k != "N" && k != "diagonal") issues.add("mesh." + k, "unknown key");
    }
    if (!j.contains("N")) {
        issues.add("mesh.N", "missing");
    } else if (j["N"].is_array()) {
        for (std::size_t k = 0; k < j["N"].size(); ++k) {
            const std::string key = "mesh.N[" + std::to_string(k) + "]";
            if (auto v = integer(j["N"][k], key, issues)) {
                if (*v < 1) issues.add(key, "must be >= 1");
                else cfg.meshes.push_back(*v);
            }
        }
        if (j["N"].empty()) issues.add("mesh.N", "must not be empty");
    } else if (auto v = integer(j["N"], "mesh.N", issues)) {
        if (*v < 1) issues.add("mesh.N", "must be >= 1");
        else cfg.meshes.push_back(*v);
    }
    if (j.contains("diagonal")) {
        const auto& d = j["diagonal"];
        if (d == "right") cfg.diagonal = Diagonal::Right;
        else if (d == "left") cfg.diagonal = Diagonal::Left;
        else issues.add("mesh.diagonal", "expected \"left\" or \"right\"");
    }
}

void parse_species(const json& j, RunConfig& cfg, Issues& issues)
{
    if (!j.is_object()) {
        issues.add("species", "expected an object");
        return;
    }
    for (const auto& [k, _] : j.items()) {
        if (k != "n" && k != "names" && k != "diffusivity" && k != "molar_masses" && k != "RT") {
            issues.add("species." + k, "unknown key");
        }
    }
    SpeciesBlock s;
    bool ok = true;
    if (!j.contains("n")) {
        issues.add("species.n", "missing");
        return;
    }
    auto n = integer(j["n"], "species.n", issues);
    if (!n) return;
    if (*n < 2 || *n > 16) {
        issues.add("species.n", "must be between 2 and 16");
        return;
    }
    s.n = *n;

    if (j.contains("names")) {
        if (!j["names"].is_array() || static_cast<int>(j["names"].size()) != s.n) {
            issues.add("species.names", "expected n strings");
            ok = false;
        } else {
            for (std::size_t k = 0; k < j["names"].size(); ++k) {
                if (!j["names"][k].is_string()) {
                    issues.add("species.names[" + std::to_string(k) + "]", "expected a string");
                    ok = false;
                } else {
                    s.names.push_back(j["names"][k].get<std::string>());
                }
            }
        }
    }
    if (s.names.empty()) {
        for (int i = 0; i < s.n; ++i) s.names.push_back("c" + std::to_string(i + 1));
    }

    if (!j.contains("molar_masses")) {
        issues.add("species.molar_masses", "missing");
        ok = false;
    } else if (auto m = number_list(j["molar_masses"], "species.molar_masses", issues)) {
        if (static_cast<int>(m->size()) != s.n) {
            issues.add("species.molar_masses", "expected n entries");
            ok = false;
        } else {
            s.molar_mass = Eigen::Map<const Eigen::VectorXd>(m->data(), s.n);
            for (int i = 0; i < s.n; ++i) {
                if (!(s.molar_mass[i] > 0.0)) {
                    issues.add("species.molar_masses[" + std::to_string(i) + "]", "must be positive");
                    ok = false;
                }
            }
        }
    } else {
        ok = false;
    }

    if (j.contains("RT")) {
        if (auto rt = number(j["RT"], "species.RT", issues)) {
            if (!(*rt > 0.0)) {
                issues.add("species.RT", "must be positive");
                ok = false;
            }
            s.rt = *rt;
        } else {
            ok = false;
        }
    }

    // Diffusivities as a list of {i, j, value} with 1-based species indices.
    s.diffusivity = Eigen::MatrixXd::Constant(s.n, s.n, std::nan(""));
    if (!j.contains("diffusivity")) {
        issues.add("species.diffusivity", "missing");
        ok = false;
    } else if (!j["diffusivity"].is_array()) {
        issues.add("species.diffusivity", "expected an array of {i, j, value}");
        ok = false;
    } else {
        const auto& list = j["diffusivity"];
        for (std::size_t k = 0; k < list.size(); ++k) {
            const std::string key = "species.diffusivity[" + std::to_string(k) + "]";
            const auto& e = list[k];
            if (!e.is_object()) {
                issues.add(key, "expected an object {i, j, value}");
                ok = false;
                continue;
            }
            for (const auto& [kk, _] : e.items()) {
                if (kk != "i" && kk != "j" && kk != "value") issues.add(key + "." + kk, "unknown key");
            }
            std::optional<int> a, b;
            std::optional<double> v;
            if (!e.contains("i")) issues.add(key + ".i", "missing");
            else a = integer(e["i"], key + ".i", issues);
            if (!e.contains("j")) issues.add(key + ".j", "missing");
            else b = integer(e["j"], key + ".j", issues);
            if (!e.contains("value")) issues.add(key + ".value", "missing");
            else v = number(e["value"], key + ".value", issues);
            if (!a || !b || !v) {
                ok = false;
                continue;
            }
            if (*a < 1 || *a > s.n) {
                issues.add(key + ".i", "species index out of range 1..n");
                ok = false;
                continue;
            }
            if (*b < 1 || *b > s.n) {
                issues.add(key + ".j", "species index out of range 1..n");
                ok = false;
                continue;
            }
            if (*a == *b) {
                issues.add(key, "diagonal entries are not allowed");
                ok = false;
                continue;
            }
            if (*v == 0.0) {
                issues.add(key + ".value", "must be nonzero");
                ok = false;
                continue;
            }
            double& slot = s.diffusivity(*a - 1, *b - 1);
            if (!std::isnan(slot) && slot != *v) {
                issues.add(key, "conflicts with an earlier entry for the same pair");
                ok = false;
                continue;
            }
            s.diffusivity(*a - 1, *b - 1) = *v;
            s.diffusivity(*b - 1, *a - 1) = *v;
        }
        std::vector<std::string> missing;
        for (int a = 0; a < s.n; ++a) {
            for (int b = a + 1; b < s.n; ++b) {
                if (std::isnan(s.diffusivity(a, b))) missing.push_back(std::to_string(a + 1) + "-" + std::to_string(b + 1));
            }
        }
        if (!missing.empty()) {
            std::string m = "missing pairs";
            for (const auto& p : missing) m += " " + p;
            issues.add("species.diffusivity", m);
            ok = false;
        }
        for (int a = 0; a < s.n; ++a) s.diffusivity(a, a) = 1.0;
    }
    if (ok) cfg.species = std::move(s);
}

void parse_boundary(const json& j, RunConfig& cfg, Issues& issues)
{
    if (!j.is_array()) {
        issues.add("boundary", "expected an array of region blocks");
        return;
    }
    static const std::set<std::string> sides{"left", "right", "bottom", "top", "all"};
    for (std::size_t k = 0; k < j.size(); ++k) {
        const std::string key = "boundary[" + std::to_string(k) + "]";
        const auto& e = j[k];
        if (!e.is_object()) {
            issues.add(key, "expected an object");
            continue;
        }
        for (const auto& [kk, _] : e.items()) {
            if (kk != "region" && kk != "kind" && kk != "side" && kk != "values") issues.add(key + "." + kk, "unknown key");
        }
        BoundaryBlock b;
        bool ok = true;
        if (!e.contains("region")) {
            issues.add(key + ".region", "missing");
            ok = false;
        } else if (auto r = integer(e["region"], key + ".region", issues)) {
            if (*r < 0) {
                issues.add(key + ".region", "must be >= 0");
                ok = false;
            }
            b.region = *r;
        } else {
            ok = false;
        }
        if (!e.contains("kind")) {
            issues.add(key + ".kind", "missing");
            ok = false;
        } else if (e["kind"] == "dirichlet") {
            b.kind = BoundaryKind::Dirichlet;
        } else if (e["kind"] == "neumann") {
            b.kind = BoundaryKind::Neumann;
        } else {
            issues.add(key + ".kind", "expected \"dirichlet\" or \"neumann\"");
            ok = false;
        }
        if (!e.contains("side")) {
            issues.add(key + ".side", "missing");
            ok = false;
        } else if (!e["side"].is_string() || !sides.contains(e["side"].get<std::string>())) {
            issues.add(key + ".side", "expected one of left, right, bottom, top, all");
            ok = false;
        } else {
            b.side = e["side"].get<std::string>();
        }
        if (!e.contains("values")) {
            issues.add(key + ".values", "missing");
            ok = false;
        } else if (auto v = number_list(e["values"], key + ".values", issues)) {
            b.values = *v;
            if (cfg.species && static_cast<int>(b.values.size()) != cfg.species->n) {
                issues.add(key + ".values", "expected one value per species");
                ok = false;
            }
        } else {
            ok = false;
        }
        if (ok) cfg.boundary.push_back(std::move(b));
    }
}

}  // namespace

RunConfig parse_config(const std::string& json_text)
{
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("configuration is not valid JSON: ") + e.what(), {"$"});
    }
    if (!doc.is_object()) throw ConfigError("configuration must be a JSON object", {"$"});

    Issues issues;
    RunConfig cfg;
    for (const auto& [k, _] : doc.items()) {
        if (!kTopKeys.contains(k)) issues.add(k, "unknown key");
    }

    static const std::set<std::string> experiments{"convergence", "demo", "solve", "spectrum"};
    if (!doc.contains("experiment")) {
        issues.add("experiment", "missing");
    } else if (!doc["experiment"].is_string() || !experiments.contains(doc["experiment"].get<std::string>())) {
        issues.add("experiment", "expected one of convergence, demo, solve, spectrum");
    } else {
        cfg.experiment = doc["experiment"].get<std::string>();
    }

    std::vector<std::string> required;
    if (cfg.experiment == "spectrum") {
        required = {"species", "gamma", "states"};
    } else if (cfg.experiment == "convergence") {
        required = {"mesh", "order", "species", "gamma", "epsilon", "max_iterations"};
    } else if (!cfg.experiment.empty()) {
        required = {"mesh", "order", "species", "gamma", "epsilon", "max_iterations", "boundary"};
    }
    for (const auto& r : required) {
        if (!doc.contains(r)) issues.add(r, "missing (required for experiment " + cfg.experiment + ")");
    }

    if (doc.contains("mesh")) parse_mesh(doc["mesh"], cfg, issues);
    if (doc.contains("order")) {
        if (auto m = integer(doc["order"], "order", issues)) {
            if (*m != 1 && *m != 2) issues.add("order", "must be 1 or 2");
            cfg.order = *m;
        }
    }
    if (doc.contains("species")) parse_species(doc["species"], cfg, issues);
    if (doc.contains("gamma")) {
        if (auto g = number(doc["gamma"], "gamma", issues)) {
            if (*g < 0.0) issues.add("gamma", "must be >= 0");
            cfg.gamma = *g;
        }
    }
    if (doc.contains("epsilon")) {
        if (auto e = number(doc["epsilon"], "epsilon", issues)) {
            if (!(*e > 0.0)) issues.add("epsilon", "must be positive");
            cfg.epsilon = *e;
        }
    }
    if (doc.contains("max_iterations")) {
        if (auto m = integer(doc["max_iterations"], "max_iterations", issues)) {
            if (*m < 1) issues.add("max_iterations", "must be >= 1");
            cfg.max_iterations = *m;
        }
    }
    if (doc.contains("boundary")) parse_boundary(doc["boundary"], cfg, issues);
    if (doc.contains("states")) {
        const auto& st = doc["states"];
        if (!st.is_array() || st.empty()) {
            issues.add("states", "expected a non-empty array of concentration vectors");
        } else {
            for (std::size_t k = 0; k < st.size(); ++k) {
                const std::string key = "states[" + std::to_string(k) + "]";
                if (auto v = number_list(st[k], key, issues)) {
                    if (cfg.species && static_cast<int>(v->size()) != cfg.species->n) {
                        issues.add(key, "expected one concentration per species");
                    } else {
                        cfg.states.push_back(*v);
                    }
                }
            }
        }
    }
    if (doc.contains("mass_flux")) {
        if (auto v = number_list(doc["mass_flux"], "mass_flux", issues)) {
            if (v->size() != 2) issues.add("mass_flux", "expected two components");
            else cfg.mass_flux = Eigen::Vector2d((*v)[0], (*v)[1]);
        }
    }
    if (doc.contains("output")) {
        if (!doc["output"].is_string()) issues.add("output", "expected a string");
        else cfg.output = doc["output"].get<std::string>();
    }
    if (doc.contains("strict")) {
        if (!doc["strict"].is_boolean()) issues.add("strict", "expected a boolean");
        else cfg.strict = doc["strict"].get<bool>();
    }
    if (doc.contains("vtk")) {
        if (!doc["vtk"].is_boolean()) issues.add("vtk", "expected a boolean");
        else cfg.vtk = doc["vtk"].get<bool>();
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) issues.add("seed", "expected a non-negative integer");
        else cfg.seed = doc["seed"].get<std::uint64_t>();
    }

    if (cfg.experiment == "convergence" && !cfg.meshes.empty() && cfg.meshes.size() < 3) {
        issues.add("mesh.N", "convergence needs at least three mesh sizes");
    }
    if ((cfg.experiment == "demo" || cfg.experiment == "solve") && cfg.meshes.size() > 1) {
        issues.add("mesh.N", "expected a single mesh size");
    }
    if (cfg.experiment == "demo" && !cfg.meshes.empty() && cfg.meshes.front() % 4 != 0) {
        issues.add("mesh.N", "demo needs N divisible by 4");
    }
    if (!issues.empty()) issues.raise();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read configuration file " + path.string(), {"--config"});
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace smd
