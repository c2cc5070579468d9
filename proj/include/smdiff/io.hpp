#pragma once

#include "smdiff/fespace.hpp"

#include <Eigen/SparseCore>

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace smd::io {

/// Writes a file through a temporary sibling that is renamed into place, so readers
/// never observe a partially written file. Parent directories are created.
void atomic_write(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer);
void atomic_write(const std::filesystem::path& path, const std::string& contents);

/// Matrix Market coordinate (real general) file.
void write_matrix_market(const std::filesystem::path& path, const Eigen::SparseMatrix<double>& matrix);

struct NamedField {
    std::string name;
    const Field* field = nullptr;
};

/// Legacy ASCII VTK unstructured grid. Scalar CG fields are written as point data
/// sampled at mesh vertices, DG vector fields as cell data averaged over each cell.
void write_vtk(const std::filesystem::path& path, const TriMesh& mesh, std::span<const NamedField> point_fields,
               std::span<const NamedField> cell_fields, const std::string& title = "smdiff");

}  // namespace smd::io
