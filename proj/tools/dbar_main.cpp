// dbar: end-to-end reconstruction of convection coefficients from boundary
// data, plus the individual pipeline stages for replay and debugging.

#include <CLI11.hpp>
#include <complex>
#include <filesystem>
#include <fstream>
#include <limits>
#include <iostream>

#include "dbar/boundary.hpp"
#include "dbar/errors.hpp"
#include "dbar/field_ops.hpp"
#include "dbar/grid_io.hpp"
#include "dbar/pipeline.hpp"

namespace fs = std::filesystem;
using dbar::cplx;

namespace {

struct CommonFlags {
    std::string config_path;
    dbar::RunConfig staged;  // parse target; applied field-by-field when set

    void add(CLI::App* app) {
        app->add_option("--config", config_path, "JSON config file (flags win over it)");
        app->add_option("--nx", staged.nx, "grid samples per axis (power of two)");
        app->add_option("--L", staged.L, "grid half-width");
        app->add_option("--K", staged.K, "k-truncation radius");
        app->add_option("--kgrid-n", staged.kgrid_n, "k-grid samples per axis");
        app->add_option("--modes", staged.modes, "DtN Fourier modes");
        app->add_option("--series-n", staged.series_n, "exterior series order");
        app->add_option("--reg", staged.reg, "trace-recovery ridge parameter");
        app->add_option("--kmax", staged.kmax, "|k| for the large-k limit");
        app->add_option("--directions", staged.directions, "directions in einvb_limit");
        app->add_option("--boundary-m", staged.boundary_m, "boundary sample count");
        app->add_option("--bvp-radial", staged.bvp_radial, "radial collocation degree");
        app->add_option("--bvp-ntheta", staged.bvp_ntheta, "angular collocation count (0=auto)");
        app->add_option("--tol", staged.tol, "iterative solver tolerance");
        app->add_option("--max-iterations", staged.max_iterations, "solver iteration cap");
        app->add_option("--seed", staged.seed, "seed echoed into metadata");
        app->add_option("--threads", staged.threads, "worker count (0=hardware)");
        app->add_option("-o,--outdir", staged.outdir, "output directory");
    }

    dbar::RunConfig resolve(const CLI::App* app) const {
        dbar::RunConfig cfg;
        if (!config_path.empty()) cfg = dbar::load_config_file(config_path);
        auto pick = [&](const char* name, auto member) {
            if (app->count(name)) cfg.*member = staged.*member;
        };
        pick("--nx", &dbar::RunConfig::nx);
        pick("--L", &dbar::RunConfig::L);
        pick("--K", &dbar::RunConfig::K);
        pick("--kgrid-n", &dbar::RunConfig::kgrid_n);
        pick("--modes", &dbar::RunConfig::modes);
        pick("--series-n", &dbar::RunConfig::series_n);
        pick("--reg", &dbar::RunConfig::reg);
        pick("--kmax", &dbar::RunConfig::kmax);
        pick("--directions", &dbar::RunConfig::directions);
        pick("--boundary-m", &dbar::RunConfig::boundary_m);
        pick("--bvp-radial", &dbar::RunConfig::bvp_radial);
        pick("--bvp-ntheta", &dbar::RunConfig::bvp_ntheta);
        pick("--tol", &dbar::RunConfig::tol);
        pick("--max-iterations", &dbar::RunConfig::max_iterations);
        pick("--seed", &dbar::RunConfig::seed);
        pick("--threads", &dbar::RunConfig::threads);
        if (app->count("--outdir") || app->count("-o")) cfg.outdir = staged.outdir;
        return cfg;
    }
};

struct PhantomFlags {
    std::string kind = "gauss";
    double amplitude = 0.3;
    std::vector<std::string> centers;
    std::vector<double> widths;
    double support = 0.8;

    void add(CLI::App* app) {
        app->add_option("--kind", kind, "phantom kind: gauss|bump|two-blob");
        app->add_option("--amp", amplitude, "phantom amplitude");
        app->add_option("--center", centers, "center as re,im (repeatable)");
        app->add_option("--width", widths, "width (repeatable)");
        app->add_option("--support", support, "support radius");
    }

    dbar::Phantom resolve() const {
        dbar::Phantom p;
        p.kind = dbar::phantom_kind_from_string(kind);
        p.amplitude = amplitude;
        p.support_radius = support;
        if (!centers.empty()) {
            p.centers.clear();
            for (const std::string& s : centers) {
                const auto comma = s.find(',');
                if (comma == std::string::npos)
                    throw dbar::PreconditionError("--center expects re,im");
                p.centers.push_back(
                    {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))});
            }
        }
        if (!widths.empty()) p.widths = widths;
        while (p.centers.size() < 2) p.centers.push_back(-p.centers.front());
        while (p.widths.size() < 2) p.widths.push_back(p.widths.front());
        return p;
    }
};

cplx parse_complex(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) return {std::stod(s), 0.0};
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
}

dbar::ConvectionField load_field(const dbar::RunConfig& cfg, const PhantomFlags& pf,
                                 const std::string& b1_path, const std::string& b2_path,
                                 double support) {
    if (!b1_path.empty() || !b2_path.empty()) {
        if (b1_path.empty() || b2_path.empty())
            throw dbar::PreconditionError("--b1 and --b2 must be given together");
        return dbar::ConvectionField(dbar::read_grid(b1_path), dbar::read_grid(b2_path), support);
    }
    return dbar::make_phantom(pf.resolve(), cfg.nx, cfg.L);
}

int dispatch(int argc, char** argv) {
    CLI::App app{"dbar-equation inverse scattering for convection coefficients"};
    app.require_subcommand(1);

    // ---- phantom ----
    auto* sc_phantom = app.add_subcommand("phantom", "generate a phantom coefficient pair");
    CommonFlags cf_ph;
    PhantomFlags pf_ph;
    cf_ph.add(sc_phantom);
    pf_ph.add(sc_phantom);

    // ---- forward-dtn ----
    auto* sc_dtn = app.add_subcommand("forward-dtn", "assemble the DtN operator of a phantom");
    CommonFlags cf_dtn;
    PhantomFlags pf_dtn;
    std::string dtn_b1, dtn_b2, dtn_out = "dtn.json";
    double dtn_support = 0.8;
    cf_dtn.add(sc_dtn);
    pf_dtn.add(sc_dtn);
    sc_dtn->add_option("--b1", dtn_b1, "b1 GRID file (instead of phantom flags)");
    sc_dtn->add_option("--b2", dtn_b2, "b2 GRID file");
    sc_dtn->add_option("--field-support", dtn_support, "support radius of the loaded field");
    sc_dtn->add_option("--out", dtn_out, "output DtN JSON path");

    // ---- traces ----
    auto* sc_tr = app.add_subcommand("traces", "recover boundary traces at one k");
    CommonFlags cf_tr;
    std::string tr_dtn, tr_k = "1,0", tr_out_r = "hr.csv", tr_out_i = "hi.csv";
    cf_tr.add(sc_tr);
    sc_tr->add_option("--dtn", tr_dtn, "DtN JSON file")->required();
    sc_tr->add_option("--k", tr_k, "spectral point as re,im");
    sc_tr->add_option("--out-r", tr_out_r, "h_r CSV path");
    sc_tr->add_option("--out-i", tr_out_i, "h_i CSV path");

    // ---- scatter ----
    auto* sc_sc = app.add_subcommand("scatter", "tabulate the scattering transform t(k)");
    CommonFlags cf_sc;
    PhantomFlags pf_sc;
    std::string sc_method = "volume", sc_dtn_path, sc_b1, sc_b2, sc_out = "t.grid";
    double sc_support = 0.8;
    cf_sc.add(sc_sc);
    pf_sc.add(sc_sc);
    sc_sc->add_option("--method", sc_method, "volume|boundary");
    sc_sc->add_option("--dtn", sc_dtn_path, "DtN JSON (boundary method)");
    sc_sc->add_option("--b1", sc_b1, "b1 GRID file");
    sc_sc->add_option("--b2", sc_b2, "b2 GRID file");
    sc_sc->add_option("--field-support", sc_support, "support radius of the loaded field");
    sc_sc->add_option("--out", sc_out, "output t GRID path");

    // ---- invert ----
    auto* sc_inv = app.add_subcommand("invert", "reconstruct q from t(k)");
    CommonFlags cf_inv;
    std::string inv_t = "t.grid", inv_out = "qhat.grid";
    double inv_eval = 0.85;
    cf_inv.add(sc_inv);
    sc_inv->add_option("--t", inv_t, "t GRID file (with .json sidecar)");
    sc_inv->add_option("--eval-radius", inv_eval, "reconstruction radius");
    sc_inv->add_option("--out", inv_out, "output GRID path");

    // ---- unwrap ----
    auto* sc_un = app.add_subcommand("unwrap", "recover b from q by phase unwrapping");
    CommonFlags cf_un;
    std::string un_q = "qhat.grid";
    double un_support = 0.85;
    cf_un.add(sc_un);
    sc_un->add_option("--q", un_q, "q GRID file");
    sc_un->add_option("--field-support", un_support, "support radius of q");

    // ---- roundtrip-volume ----
    auto* sc_rt = app.add_subcommand("roundtrip-volume", "q -> t -> q -> b without boundary data");
    CommonFlags cf_rt;
    PhantomFlags pf_rt;
    cf_rt.add(sc_rt);
    pf_rt.add(sc_rt);

    // ---- pipeline ----
    auto* sc_pl = app.add_subcommand("pipeline", "full DtN -> traces -> t -> q -> b chain");
    CommonFlags cf_pl;
    PhantomFlags pf_pl;
    cf_pl.add(sc_pl);
    pf_pl.add(sc_pl);

    // ---- compare ----
    auto* sc_cmp = app.add_subcommand("compare", "relative norm between two GRID files");
    std::string cmp_a, cmp_b, cmp_norm = "2";
    sc_cmp->add_option("a", cmp_a, "reference GRID file")->required();
    sc_cmp->add_option("b", cmp_b, "other GRID file")->required();
    sc_cmp->add_option("--norm", cmp_norm, "1|2|inf");

    CLI11_PARSE(app, argc, argv);

    if (sc_phantom->parsed()) {
        dbar::RunConfig cfg = cf_ph.resolve(sc_phantom);
        dbar::Phantom p = pf_ph.resolve();
        dbar::ConvectionField f = dbar::make_phantom(p, cfg.nx, cfg.L);
        fs::create_directories(cfg.outdir);
        dbar::write_grid(fs::path(cfg.outdir) / "b1.grid", f.b1());
        dbar::write_grid(fs::path(cfg.outdir) / "b2.grid", f.b2());
        std::ofstream meta(fs::path(cfg.outdir) / "meta.json");
        meta << "{\n  \"config_hash\": \"" << dbar::config_hash(cfg) << "\",\n  \"phantom\": "
             << dbar::phantom_to_json(p) << "\n}\n";
        std::cout << "wrote " << cfg.outdir << "/b1.grid, b2.grid (phantom " << p.describe()
                  << ")\n";
        return 0;
    }

    if (sc_dtn->parsed()) {
        dbar::RunConfig cfg = cf_dtn.resolve(sc_dtn);
        dbar::ConvectionField f = load_field(cfg, pf_dtn, dtn_b1, dtn_b2, dtn_support);
        dbar::DtNOperator op = dbar::assemble_dtn(f, cfg.modes, cfg.bvp_options());
        op.metadata = dtn_b1.empty() ? pf_dtn.resolve().describe() : dtn_b1;
        dbar::write_dtn(dtn_out, op);
        std::cout << "wrote " << dtn_out << " (modes " << op.modes << ")\n";
        return 0;
    }

    if (sc_tr->parsed()) {
        dbar::RunConfig cfg = cf_tr.resolve(sc_tr);
        dbar::DtNOperator op = dbar::read_dtn(tr_dtn);
        const cplx k = parse_complex(tr_k);
        dbar::TraceRecovery rec =
            dbar::recover_traces(op, k, cfg.series_n, cfg.reg, cfg.boundary_m);
        dbar::write_boundary_csv(tr_out_r, rec.h_r.values);
        dbar::write_boundary_csv(tr_out_i, rec.h_i.values);
        std::cout << "{ \"residual30\": " << dbar::round_sig(rec.report.residual30)
                  << ", \"residual31\": " << dbar::round_sig(rec.report.residual31)
                  << ", \"condition\": " << dbar::round_sig(rec.report.condition)
                  << ", \"class_b_mean\": " << dbar::round_sig(rec.report.class_b_mean) << " }\n";
        return 0;
    }

    if (sc_sc->parsed()) {
        dbar::RunConfig cfg = cf_sc.resolve(sc_sc);
        dbar::ScatteringTransform t;
        if (sc_method == "volume") {
            dbar::ConvectionField f = load_field(cfg, pf_sc, sc_b1, sc_b2, sc_support);
            dbar::Potential q = dbar::q_from_b(f);
            t = dbar::scattering_grid(q, cfg.kgrid_n, cfg.k_grid_L(), cfg.K, cfg.solve_options(),
                                      cfg.threads);
        } else if (sc_method == "boundary") {
            if (sc_dtn_path.empty())
                throw dbar::PreconditionError("scatter --method boundary needs --dtn");
            dbar::DtNOperator op = dbar::read_dtn(sc_dtn_path);
            dbar::BoundaryFunction einvb = dbar::einvb_limit(op, cfg.kmax, cfg.directions,
                                                             cfg.series_n, cfg.reg,
                                                             cfg.boundary_m);
            dbar::ComplexGrid tg(cfg.kgrid_n, cfg.k_grid_L());
            for (int i = 0; i < cfg.kgrid_n; ++i)
                for (int j = 0; j < cfg.kgrid_n; ++j) {
                    const cplx kk = tg.node(i, j);
                    if (std::abs(kk) > cfg.K) continue;
                    dbar::TraceRecovery rec =
                        dbar::recover_traces(op, kk, cfg.series_n, cfg.reg, cfg.boundary_m);
                    tg.at(i, j) = dbar::boundary_scattering_transform(rec.h_r, rec.h_i, einvb, kk);
                }
            t = dbar::ScatteringTransform(std::move(tg), cfg.K);
        } else {
            throw dbar::PreconditionError("scatter --method must be volume|boundary");
        }
        dbar::write_grid(sc_out, t.grid);
        std::ofstream sidecar(sc_out + ".json");
        sidecar << "{ \"K\": " << t.K << ", \"nx\": " << t.grid.nx() << ", \"L\": " << t.grid.L()
                << ", \"config_hash\": \"" << dbar::config_hash(cfg) << "\" }\n";
        std::cout << "wrote " << sc_out << " (K " << t.K << ")\n";
        return 0;
    }

    if (sc_inv->parsed()) {
        dbar::RunConfig cfg = cf_inv.resolve(sc_inv);
        dbar::ComplexGrid tg = dbar::read_grid(inv_t);
        double K = cfg.K;
        {
            std::ifstream sidecar(inv_t + ".json");
            if (sidecar) {
                std::string text((std::istreambuf_iterator<char>(sidecar)),
                                 std::istreambuf_iterator<char>());
                const auto pos = text.find("\"K\"");
                if (pos != std::string::npos) K = std::stod(text.substr(text.find(':', pos) + 1));
            }
        }
        dbar::ScatteringTransform t(std::move(tg), K);
        dbar::Potential q =
            dbar::reconstruct_q(t, cfg.nx, cfg.L, inv_eval, cfg.solve_options(), cfg.threads);
        dbar::write_grid(inv_out, q.grid());
        std::cout << "wrote " << inv_out << "\n";
        return 0;
    }

    if (sc_un->parsed()) {
        dbar::RunConfig cfg = cf_un.resolve(sc_un);
        dbar::Potential q(dbar::read_grid(un_q), un_support);
        dbar::PhaseUnwrapResult r = dbar::phase_unwrap(q, cfg.solve_options());
        fs::create_directories(cfg.outdir);
        dbar::ComplexGrid b1(q.grid().nx(), q.grid().L()), b2(q.grid().nx(), q.grid().L());
        for (std::size_t i = 0; i < b1.size(); ++i) {
            b1[i] = 4.0 * r.b.grid()[i].real();
            b2[i] = 4.0 * r.b.grid()[i].imag();
        }
        dbar::write_grid(fs::path(cfg.outdir) / "bhat1.grid", b1);
        dbar::write_grid(fs::path(cfg.outdir) / "bhat2.grid", b2);
        std::cout << "{ \"below_threshold_nodes\": " << r.below_threshold
                  << ", \"residual\": " << dbar::round_sig(r.residual) << " }\n";
        return 0;
    }

    if (sc_rt->parsed()) {
        dbar::RunConfig cfg = cf_rt.resolve(sc_rt);
        dbar::PipelineReport rep = dbar::run_roundtrip_volume(cfg, pf_rt.resolve());
        std::cout << rep.json() << "\n";
        return 0;
    }

    if (sc_pl->parsed()) {
        dbar::RunConfig cfg = cf_pl.resolve(sc_pl);
        dbar::PipelineReport rep = dbar::run_pipeline(cfg, pf_pl.resolve());
        std::cout << rep.json() << "\n";
        return 0;
    }

    if (sc_cmp->parsed()) {
        double p = 2.0;
        if (cmp_norm == "1") p = 1.0;
        else if (cmp_norm == "2") p = 2.0;
        else if (cmp_norm == "inf") p = std::numeric_limits<double>::infinity();
        else throw dbar::PreconditionError("--norm must be 1, 2 or inf");
        std::cout << dbar::round_sig(dbar::compare_grids(cmp_a, cmp_b, p)) << "\n";
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const dbar::PreconditionError& e) {
        std::cerr << "precondition error: " << e.what() << "\n";
        return 2;
    } catch (const dbar::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const dbar::SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
