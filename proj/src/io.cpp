#include "smdiff/io.hpp"

#include "smdiff/errors.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

namespace smd::io {

namespace {

std::filesystem::path temporary_sibling(const std::filesystem::path& path)
{
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    std::ostringstream name;
    name << '.' << path.filename().string() << ".tmp" << std::hex << rng();
    return path.parent_path() / name.str();
}

void commit(const std::filesystem::path& tmp, const std::filesystem::path& path)
{
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error("cannot move output into place: " + path.string());
    }
}

void ensure_parent(const std::filesystem::path& path)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
}

}  // namespace

void atomic_write(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer)
{
    ensure_parent(path);
    const auto tmp = temporary_sibling(path);
    try {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open output file: " + tmp.string());
        writer(out);
        out.flush();
        if (!out) throw Error("write failed: " + tmp.string());
    } catch (...) {
        std::error_code ec;
        std::filesystem::remove(tmp, ec);
        throw;
    }
    commit(tmp, path);
}

void atomic_write(const std::filesystem::path& path, const std::string& contents)
{
    atomic_write(path, [&](std::ostream& out) { out << contents; });
}

void write_matrix_market(const std::filesystem::path& path, const Eigen::SparseMatrix<double>& matrix)
{
    atomic_write(path, [&](std::ostream& out) {
        out << "%%MatrixMarket matrix coordinate real general\n";
        out << matrix.rows() << ' ' << matrix.cols() << ' ' << matrix.nonZeros() << '\n';
        out << std::setprecision(17);
        for (Eigen::Index k = 0; k < matrix.outerSize(); ++k) {
            for (Eigen::SparseMatrix<double>::InnerIterator it(matrix, k); it; ++it) {
                out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
            }
        }
    });
}

void write_vtk(const std::filesystem::path& path, const TriMesh& mesh, std::span<const NamedField> point_fields,
               std::span<const NamedField> cell_fields, const std::string& title)
{
    for (const auto& f : point_fields) {
        if (!f.field || f.field->space->kind() != SpaceKind::CgScalar) {
            throw InvalidArgument("write_vtk: point field '" + f.name + "' must be a CG scalar field");
        }
    }
    for (const auto& f : cell_fields) {
        if (!f.field || f.field->space->kind() != SpaceKind::DgVector) {
            throw InvalidArgument("write_vtk: cell field '" + f.name + "' must be a DG vector field");
        }
    }
    atomic_write(path, [&](std::ostream& out) {
        out << std::setprecision(std::numeric_limits<double>::max_digits10);
        out << "# vtk DataFile Version 2.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
        out << "POINTS " << mesh.num_vertices() << " double\n";
        for (int v = 0; v < mesh.num_vertices(); ++v) {
            const Vec2& p = mesh.vertex(v);
            out << p.x() << ' ' << p.y() << " 0\n";
        }
        out << "CELLS " << mesh.num_cells() << ' ' << 4 * mesh.num_cells() << '\n';
        for (int c = 0; c < mesh.num_cells(); ++c) {
            const auto& t = mesh.cell(c);
            out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
        }
        out << "CELL_TYPES " << mesh.num_cells() << '\n';
        for (int c = 0; c < mesh.num_cells(); ++c) out << "5\n";

        if (!point_fields.empty()) {
            out << "POINT_DATA " << mesh.num_vertices() << '\n';
            for (const auto& f : point_fields) {
                // CG vertex dofs come first in the node numbering.
                out << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
                for (int v = 0; v < mesh.num_vertices(); ++v) out << f.field->coeffs[v] << '\n';
            }
        }
        if (!cell_fields.empty()) {
            out << "CELL_DATA " << mesh.num_cells() << '\n';
            for (const auto& f : cell_fields) {
                out << "VECTORS " << f.name << " double\n";
                const int nloc = f.field->space->nodes_per_cell();
                for (int c = 0; c < mesh.num_cells(); ++c) {
                    Vec2 mean = Vec2::Zero();
                    for (int node : f.field->space->cell_nodes(c)) {
                        mean += Vec2(f.field->coeffs[2 * node], f.field->coeffs[2 * node + 1]);
                    }
                    mean /= nloc;
                    out << mean.x() << ' ' << mean.y() << " 0\n";
                }
            }
        }
    });
}

}  // namespace smd::io
