#include "smdiff/app.hpp"

#include "smdiff/io.hpp"
#include "smdiff/verify.hpp"

#include <json.hpp>

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace smd {

namespace {

using nlohmann::ordered_json;

constexpr int kDigits = std::numeric_limits<double>::max_digits10;

PicardSettings settings_from(const RunConfig& cfg, const RunOptions& opt)
{
    PicardSettings s;
    s.epsilon = cfg.epsilon;
    s.max_iterations = cfg.max_iterations;
    s.gamma = cfg.gamma;
    s.strict_consistency = cfg.strict || opt.force_strict;
    return s;
}

const SpeciesBlock& species_of(const RunConfig& cfg)
{
    if (!cfg.species) throw ConfigError("species block required", {"species"});
    return *cfg.species;
}

Side side_of(const std::string& s)
{
    if (s == "left") return Side::Left;
    if (s == "right") return Side::Right;
    if (s == "bottom") return Side::Bottom;
    return Side::Top;
}

std::string vertex_csv(const TriMesh& mesh, const std::vector<std::string>& names, const std::vector<Field>& c)
{
    std::ostringstream out;
    out << std::setprecision(kDigits) << "x,y";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        out << mesh.vertex(v).x() << ',' << mesh.vertex(v).y();
        for (const auto& f : c) out << ',' << f.coeffs[v];
        out << '\n';
    }
    return out.str();
}

void write_solution_vtk(const std::filesystem::path& path, const TriMesh& mesh, const std::vector<std::string>& names,
                        const SolveResult& res)
{
    std::vector<io::NamedField> point, cell;
    for (std::size_t i = 0; i < res.concentrations.size(); ++i) {
        point.push_back({"c_" + names[i], &res.concentrations[i]});
        cell.push_back({"v_" + names[i], &res.velocities[i]});
    }
    io::write_vtk(path, mesh, point, cell);
}

int run_spectrum(const RunConfig& cfg, const RunOptions& opt)
{
    const SpeciesBlock& sp = species_of(cfg);
    const TransportCoefficients co = TransportCoefficients::create(sp.diffusivity, sp.molar_mass, sp.rt, cfg.gamma);
    std::ostringstream csv;
    csv << std::setprecision(kDigits) << "state";
    for (int i = 0; i < sp.n; ++i) csv << ",c" << i + 1;
    for (int i = 0; i < sp.n; ++i) csv << ",lambda" << i + 1;
    csv << ",augmented_min_eigenvalue,coercivity_bound\n";
    ordered_json rep = ordered_json::array();
    for (std::size_t k = 0; k < cfg.states.size(); ++k) {
        const Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(cfg.states[k].data(), sp.n);
        const SpectralReport r = spectral_report(PointState::make(c, co), co);
        csv << k;
        for (int i = 0; i < sp.n; ++i) csv << ',' << c[i];
        for (int i = 0; i < sp.n; ++i) csv << ',' << r.onsager_eigenvalues[i];
        csv << ',' << r.augmented_min_eigenvalue << ',' << r.coercivity_bound << '\n';
        std::vector<double> eig(r.onsager_eigenvalues.data(), r.onsager_eigenvalues.data() + sp.n);
        rep.push_back({{"state", cfg.states[k]},
                       {"onsager_eigenvalues", eig},
                       {"augmented_min_eigenvalue", r.augmented_min_eigenvalue},
                       {"coercivity_bound", r.coercivity_bound}});
    }
    io::atomic_write(opt.out / "results.csv", csv.str());
    io::atomic_write(opt.out / "report.json", ordered_json{{"experiment", "spectrum"}, {"states", rep}}.dump(2));
    return kExitOk;
}

int run_convergence(const RunConfig& cfg, const RunOptions& opt)
{
    const SpeciesBlock& sp = species_of(cfg);
    if (sp.n != 4) throw ConfigError("the manufactured case needs n = 4", {"species.n"});
    if (!sp.molar_mass.isApprox(Eigen::Vector4d::Ones(), 0.0)) {
        throw ConfigError("the manufactured case needs unit molar masses", {"species.molar_masses"});
    }
    ManufacturedCase base = reference_case_with({});
    base.diffusivity = sp.diffusivity;
    base.rt = sp.rt;
    try {
        base.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what(), {"species.diffusivity"});
    }
    const ManufacturedCase mc = resolve_reading(base, cfg.seed);
    const OracleReport oracle = check_oracles(mc, 50, cfg.seed);

    StudyOptions so;
    so.diagonal = cfg.diagonal;
    so.threads = opt.threads;
    if (cfg.vtk) so.vtk_directory = opt.out.string();
    const ConvergenceStudy study = convergence_study(mc, cfg.meshes, cfg.order, settings_from(cfg, opt), so);

    io::atomic_write(opt.out / "results.csv", study.to_csv());
    io::atomic_write(opt.out / "slopes.json", study.slopes_json());
    ordered_json levels = ordered_json::array();
    for (const auto& r : study.rows) {
        ordered_json l = ordered_json::parse(r.report.to_json());
        levels.push_back({{"N", r.n}, {"report", l}});
    }
    ordered_json rep{{"experiment", "convergence"},
                     {"velocity_reading", mc.reading.name()},
                     {"oracle",
                      {{"points", oracle.points},
                       {"stefan_maxwell", oracle.stefan_maxwell},
                       {"mass_flux", oracle.mass_flux},
                       {"reaction_sum", oracle.reaction_sum},
                       {"reaction_fd_gap", oracle.reaction_fd_gap}}},
                     {"levels", levels},
                     {"complete", study.complete}};
    if (!study.failure.empty()) rep["failure"] = study.failure;
    io::atomic_write(opt.out / "report.json", rep.dump(2));
    if (!study.complete) {
        throw RunFailure("convergence study aborted: " + study.failure, kExitNotConverged, rep.dump());
    }
    return kExitOk;
}

int run_demo(const RunConfig& cfg, const RunOptions& opt)
{
    const SpeciesBlock& sp = species_of(cfg);
    DemoConfig dc;
    dc.n = cfg.meshes.front();
    dc.order = cfg.order;
    dc.diagonal = cfg.diagonal;
    dc.names = sp.names;
    dc.diffusivity = sp.diffusivity;
    dc.molar_mass = sp.molar_mass;
    dc.rt = sp.rt;
    dc.settings = settings_from(cfg, opt);
    std::vector<std::string> bad;
    for (std::size_t k = 0; k < cfg.boundary.size(); ++k) {
        const auto& b = cfg.boundary[k];
        const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(b.values.data(), sp.n);
        if (b.kind == BoundaryKind::Dirichlet && b.side == "left") dc.left = v;
        else if (b.kind == BoundaryKind::Dirichlet && b.side == "right") dc.right = v;
        else if (b.kind == BoundaryKind::Neumann && v.isZero(0.0)) continue;
        else bad.push_back("boundary[" + std::to_string(k) + "]");
    }
    if (dc.left.size() == 0) bad.push_back("boundary");
    if (dc.right.size() == 0 && (bad.empty() || bad.back() != "boundary")) bad.push_back("boundary");
    if (!bad.empty()) {
        throw ConfigError("demo needs Dirichlet blocks on the left and right sides and no-flux elsewhere", bad);
    }
    const DemoResult res = mixed_bc_demo(dc);
    io::atomic_write(opt.out / "results.csv", vertex_csv(*res.mesh, sp.names, res.solution.concentrations));
    io::atomic_write(opt.out / "report.json", res.to_json());
    if (cfg.vtk) write_solution_vtk(opt.out / "demo.vtk", *res.mesh, sp.names, res.solution);
    if (!res.solution.report.converged) {
        throw RunFailure("Picard iteration did not converge", kExitNotConverged, res.solution.report.to_json());
    }
    return kExitOk;
}

int run_solve(const RunConfig& cfg, const RunOptions& opt)
{
    const SpeciesBlock& sp = species_of(cfg);
    const TriMesh raw = build_unit_square(cfg.meshes.front(), cfg.diagonal);
    std::vector<TagRule> rules;
    ProblemData data;
    data.coeffs = TransportCoefficients::create(sp.diffusivity, sp.molar_mass, sp.rt, cfg.gamma);
    std::optional<double> total;
    for (std::size_t k = 0; k < cfg.boundary.size(); ++k) {
        const auto& b = cfg.boundary[k];
        const RegionTag tag = b.kind == BoundaryKind::Dirichlet ? RegionTag::dirichlet(b.region) : RegionTag::neumann(b.region);
        rules.push_back({b.side == "all" ? everywhere() : on_side(raw, side_of(b.side)), tag});
        std::vector<ScalarFunction> fs;
        for (double v : b.values) fs.push_back([v](const Vec2&) { return v; });
        auto& table = b.kind == BoundaryKind::Dirichlet ? data.dirichlet : data.neumann;
        if (table.contains(b.region)) {
            throw ConfigError("region ids must be unique per kind", {"boundary[" + std::to_string(k) + "].region"});
        }
        table[b.region] = fs;
        if (b.kind == BoundaryKind::Dirichlet && !total) {
            double s = 0.0;
            for (double v : b.values) s += v;
            total = s;
        }
    }
    if (!total) throw ConfigError("solve needs at least one Dirichlet region", {"boundary"});
    rules.push_back({everywhere(), RegionTag::neumann(-1)});
    data.neumann[-1] = std::vector<ScalarFunction>(static_cast<std::size_t>(sp.n), [](const Vec2&) { return 0.0; });
    data.total_concentration = *total;
    const Vec2 u = cfg.mass_flux;
    if (!u.isZero(0.0)) {
        data.mass_flux = [u](const Vec2&) { return u; };
        data.mass_flux_divergence = [](const Vec2&) { return 0.0; };
    }

    auto mesh = std::make_shared<const TriMesh>(tag_boundary(raw, rules));
    const MixedSpaces spaces = MixedSpaces::make(mesh, cfg.order);
    const std::vector<Field> guess = apply_dirichlet_lifting(data, spaces.concentration);
    const SolveResult res = picard_iterate(spaces, data, guess, settings_from(cfg, opt));

    io::atomic_write(opt.out / "results.csv", vertex_csv(*mesh, sp.names, res.concentrations));
    io::atomic_write(opt.out / "report.json", res.report.to_json());
    if (cfg.vtk) write_solution_vtk(opt.out / "solution.vtk", *mesh, sp.names, res);
    if (!res.report.converged) {
        throw RunFailure("Picard iteration did not converge", kExitNotConverged, res.report.to_json());
    }
    return kExitOk;
}

}  // namespace

int run_experiment(const RunConfig& config, const RunOptions& options)
{
    std::filesystem::create_directories(options.out);
    if (config.experiment == "spectrum") return run_spectrum(config, options);
    if (config.experiment == "convergence") return run_convergence(config, options);
    if (config.experiment == "demo") return run_demo(config, options);
    if (config.experiment == "solve") return run_solve(config, options);
    throw ConfigError("unknown experiment '" + config.experiment + "'", {"experiment"});
}

int exit_code_for(const std::exception& e)
{
    if (auto* r = dynamic_cast<const RunFailure*>(&e)) return r->code();
    if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
    if (auto* s = dynamic_cast<const SolveFailure*>(&e)) {
        return s->kind() == SolveFailure::Kind::Consistency ? kExitData : kExitSolver;
    }
    if (dynamic_cast<const ConsistencyError*>(&e) || dynamic_cast<const InvalidArgument*>(&e)) return kExitData;
    if (dynamic_cast<const SolverError*>(&e) || dynamic_cast<const PositivityError*>(&e)) return kExitSolver;
    return kExitOther;
}

std::string error_json(const std::exception& e)
{
    ordered_json err;
    err["message"] = e.what();
    err["exit_code"] = exit_code_for(e);
    if (auto* c = dynamic_cast<const ConfigError*>(&e)) {
        err["type"] = "config";
        err["keys"] = c->keys();
    } else if (auto* s = dynamic_cast<const SolveFailure*>(&e)) {
        static const char* kinds[] = {"positivity", "linear_solver", "consistency"};
        err["type"] = "solve";
        err["kind"] = kinds[static_cast<int>(s->kind())];
        err["iterate"] = s->iterate();
        err["report"] = ordered_json::parse(s->report().to_json());
    } else if (auto* r = dynamic_cast<const RunFailure*>(&e)) {
        err["type"] = r->code() == kExitNotConverged ? "not_converged" : "run";
        err["details"] = ordered_json::parse(r->details());
    } else if (dynamic_cast<const ConsistencyError*>(&e)) {
        err["type"] = "consistency";
    } else if (dynamic_cast<const InvalidArgument*>(&e)) {
        err["type"] = "invalid_argument";
    } else if (dynamic_cast<const Error*>(&e)) {
        err["type"] = "error";
    } else {
        err["type"] = "internal";
    }
    ordered_json out;
    out["error"] = err;
    return out.dump();
}

}  // namespace smd
