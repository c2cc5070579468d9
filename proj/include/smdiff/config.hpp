#pragma once

#include "smdiff/mesh.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace smd {

struct SpeciesBlock {
    int n = 0;
    std::vector<std::string> names;
    Eigen::MatrixXd diffusivity;  // symmetric, diagonal unused
    Eigen::VectorXd molar_mass;
    double rt = 1.0;
};

/// Constant boundary values for one region. `side` is left, right, bottom, top or all;
/// facets not claimed by any block become NEUMANN(0) with zero flux.
struct BoundaryBlock {
    int region = 0;
    BoundaryKind kind = BoundaryKind::Dirichlet;
    std::string side;
    std::vector<double> values;
};

struct RunConfig {
    std::string experiment;  // convergence, demo, solve, spectrum
    std::vector<int> meshes;
    Diagonal diagonal = Diagonal::Right;
    int order = 1;
    std::optional<SpeciesBlock> species;
    double gamma = 1.0;
    double epsilon = 1e-13;
    int max_iterations = 50;
    std::vector<BoundaryBlock> boundary;
    std::vector<std::vector<double>> states;  // spectrum
    Eigen::Vector2d mass_flux = Eigen::Vector2d::Zero();
    std::optional<std::string> output;
    bool strict = true;
    bool vtk = false;
    std::uint64_t seed = 42;
};

/// Parses and validates a configuration document. Throws ConfigError whose keys()
/// list every offending key (dotted paths, e.g. "species.diffusivity[2].value").
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace smd
