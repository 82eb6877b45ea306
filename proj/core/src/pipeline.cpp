#include "dbar/pipeline.hpp"

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>

#include <nlohmann/json.hpp>

#include "dbar/errors.hpp"
#include "dbar/field_ops.hpp"
#include "dbar/grid_io.hpp"
#include "dbar/parallel.hpp"

namespace dbar {

using nlohmann::json;
namespace fs = std::filesystem;

DiskSolverOptions RunConfig::bvp_options() const {
    DiskSolverOptions o;
    o.radial_degree = bvp_radial;
    o.ntheta = bvp_ntheta > 0 ? bvp_ntheta : std::max(2 * modes + 2, 82);
    return o;
}

DbarSolveOptions RunConfig::solve_options() const {
    DbarSolveOptions o;
    o.tol = tol;
    o.max_iterations = max_iterations;
    return o;
}

double round_sig(double v) {
    if (v == 0.0 || !std::isfinite(v)) return v;
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::strtod(buf, nullptr);
}

namespace {

json config_json_obj(const RunConfig& c) {
    return json{{"nx", c.nx},
                {"L", c.L},
                {"K", c.K},
                {"kgrid_n", c.kgrid_n},
                {"modes", c.modes},
                {"series_n", c.series_n},
                {"reg", c.reg},
                {"kmax", c.kmax},
                {"directions", c.directions},
                {"boundary_m", c.boundary_m},
                {"bvp_radial", c.bvp_radial},
                {"bvp_ntheta", c.bvp_ntheta},
                {"tol", c.tol},
                {"max_iterations", c.max_iterations},
                {"seed", c.seed},
                {"threads", c.threads},
                {"outdir", c.outdir}};
}

json phantom_json_obj(const Phantom& p) {
    json centers = json::array(), widths = json::array();
    for (const cplx& c : p.centers) centers.push_back({c.real(), c.imag()});
    for (double w : p.widths) widths.push_back(w);
    return json{{"kind", to_string(p.kind)},
                {"amplitude", p.amplitude},
                {"centers", centers},
                {"widths", widths},
                {"support_radius", p.support_radius}};
}

}  // namespace

std::string config_to_json(const RunConfig& cfg) { return config_json_obj(cfg).dump(2); }

RunConfig config_from_json(const std::string& text) {
    json j = json::parse(text);
    RunConfig c;
    c.nx = j.value("nx", c.nx);
    c.L = j.value("L", c.L);
    c.K = j.value("K", c.K);
    c.kgrid_n = j.value("kgrid_n", c.kgrid_n);
    c.modes = j.value("modes", c.modes);
    c.series_n = j.value("series_n", c.series_n);
    c.reg = j.value("reg", c.reg);
    c.kmax = j.value("kmax", c.kmax);
    c.directions = j.value("directions", c.directions);
    c.boundary_m = j.value("boundary_m", c.boundary_m);
    c.bvp_radial = j.value("bvp_radial", c.bvp_radial);
    c.bvp_ntheta = j.value("bvp_ntheta", c.bvp_ntheta);
    c.tol = j.value("tol", c.tol);
    c.max_iterations = j.value("max_iterations", c.max_iterations);
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
    c.outdir = j.value("outdir", c.outdir);
    return c;
}

RunConfig load_config_file(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config " + path.string());
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return config_from_json(text);
}

std::string config_hash(const RunConfig& cfg) {
    const std::string s = config_json_obj(cfg).dump();
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

std::string phantom_to_json(const Phantom& p) { return phantom_json_obj(p).dump(2); }

Phantom phantom_from_json(const std::string& text) {
    json j = json::parse(text);
    Phantom p;
    p.kind = phantom_kind_from_string(j.value("kind", "gauss"));
    p.amplitude = j.value("amplitude", p.amplitude);
    if (j.contains("centers")) {
        p.centers.clear();
        for (const auto& c : j["centers"]) p.centers.push_back({c.at(0), c.at(1)});
    }
    if (j.contains("widths")) p.widths = j["widths"].get<std::vector<double>>();
    p.support_radius = j.value("support_radius", p.support_radius);
    return p;
}

std::string PipelineReport::json(bool with_timings) const {
    nlohmann::json j;
    j["config_hash"] = config_hash;
    j["errors"] = {{"b1", round_sig(err_b1)},
                   {"b2", round_sig(err_b2)},
                   {"q", round_sig(err_q)}};
    j["t_max_abs"] = round_sig(t_max_abs);
    j["unwrap_fallback_nodes"] = unwrap_fallback_nodes;
    if (with_timings) {
        nlohmann::json t;
        for (const auto& [k, v] : timings) t[k] = round_sig(v);
        j["timings"] = t;
    }
    return j.dump(2);
}

namespace {

class StageClock {
public:
    explicit StageClock(std::map<std::string, double>& sink) : sink_(sink) {}
    template <typename Fn>
    auto run(const std::string& name, Fn&& fn) -> decltype(fn()) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            if constexpr (std::is_void_v<decltype(fn())>) {
                fn();
                sink_[name] = seconds_since(t0);
            } else {
                auto out = fn();
                sink_[name] = seconds_since(t0);
                return out;
            }
        } catch (const std::exception& e) {
            throw SolverError("pipeline stage '" + name + "' failed: " + e.what(), 0.0);
        }
    }

private:
    static double seconds_since(std::chrono::steady_clock::time_point t0) {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    std::map<std::string, double>& sink_;
};

void write_meta(const fs::path& path, const RunConfig& cfg, const Phantom& phantom,
                const std::string& stage) {
    json j;
    j["config_hash"] = config_hash(cfg);
    j["config"] = config_json_obj(cfg);
    j["phantom"] = phantom_json_obj(phantom);
    j["stage"] = stage;
    std::ofstream os(path);
    os << j.dump(2) << '\n';
}

double rel_or_abs_l2(const ComplexGrid& ref, const ComplexGrid& got) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        num += std::norm(got[i] - ref[i]);
        den += std::norm(ref[i]);
    }
    num = std::sqrt(num);
    den = std::sqrt(den);
    return den == 0.0 ? num : num / den;
}

void write_sidecar(const fs::path& grid_path, const RunConfig& cfg, double K) {
    json j;
    j["K"] = K;
    j["nx"] = cfg.kgrid_n;
    j["L"] = cfg.k_grid_L();
    j["config_hash"] = config_hash(cfg);
    std::ofstream os(grid_path.string() + ".json");
    os << j.dump(2) << '\n';
}

// boundary t over the k-grid from the DtN operator
ScatteringTransform boundary_scattering_grid(const RunConfig& cfg, const DtNOperator& dtn,
                                             const BoundaryFunction& einvb) {
    ComplexGrid tg(cfg.kgrid_n, cfg.k_grid_L());
    std::vector<std::size_t> nodes;
    for (int i = 0; i < cfg.kgrid_n; ++i)
        for (int j = 0; j < cfg.kgrid_n; ++j)
            if (std::abs(tg.node(i, j)) <= cfg.K)
                nodes.push_back(std::size_t(i) * cfg.kgrid_n + j);

    std::mutex fail_mutex;
    std::string first_failure;
    parallel_for(
        nodes.size(),
        [&](std::size_t w) {
            const std::size_t idx = nodes[w];
            const cplx k = tg.node(int(idx) / cfg.kgrid_n, int(idx) % cfg.kgrid_n);
            try {
                TraceRecovery rec =
                    recover_traces(dtn, k, cfg.series_n, cfg.reg, cfg.boundary_m);
                tg[idx] = boundary_scattering_transform(rec.h_r, rec.h_i, einvb, k);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(fail_mutex);
                if (first_failure.empty()) first_failure = e.what();
            }
        },
        cfg.threads);
    if (!first_failure.empty())
        throw SolverError("boundary scattering grid: " + first_failure, 0.0);
    return {std::move(tg), cfg.K};
}

PipelineReport finish_inversion(const RunConfig& cfg, const Phantom& phantom,
                                const ConvectionField& f, const ScatteringTransform& t,
                                StageClock& clock, std::map<std::string, double>& timings) {
    const fs::path out(cfg.outdir);
    PipelineReport rep;
    rep.config_hash = config_hash(cfg);
    for (const cplx& v : t.grid.samples()) rep.t_max_abs = std::max(rep.t_max_abs, std::abs(v));

    write_grid(out / "t.grid", t.grid);
    write_sidecar(out / "t.grid", cfg, t.K);

    const double eval_radius =
        std::min(phantom.support_radius + 0.05, (1.0 - Potential::kSupportMargin) * cfg.L);
    Potential qhat = clock.run("invert", [&] {
        return reconstruct_q(t, cfg.nx, cfg.L, eval_radius, cfg.solve_options(), cfg.threads);
    });
    write_grid(out / "qhat.grid", qhat.grid());

    PhaseUnwrapResult un = clock.run("unwrap", [&] { return phase_unwrap(qhat, cfg.solve_options()); });
    rep.unwrap_fallback_nodes = un.below_threshold;

    // b1 = 4 Re b, b2 = 4 Im b
    ComplexGrid b1(cfg.nx, cfg.L), b2(cfg.nx, cfg.L);
    for (std::size_t i = 0; i < b1.size(); ++i) {
        b1[i] = 4.0 * un.b.grid()[i].real();
        b2[i] = 4.0 * un.b.grid()[i].imag();
    }
    write_grid(out / "bhat1.grid", b1);
    write_grid(out / "bhat2.grid", b2);

    Potential q_true = q_from_b(f);
    rep.err_b1 = rel_or_abs_l2(f.b1(), b1);
    rep.err_b2 = rel_or_abs_l2(f.b2(), b2);
    rep.err_q = rel_or_abs_l2(q_true.grid(), qhat.grid());
    rep.timings = timings;
    return rep;
}

}  // namespace

PipelineReport run_pipeline(const RunConfig& cfg, const Phantom& phantom) {
    const fs::path out(cfg.outdir);
    fs::create_directories(out);
    std::map<std::string, double> timings;
    StageClock clock(timings);

    ConvectionField f = clock.run("phantom", [&] { return make_phantom(phantom, cfg.nx, cfg.L); });
    write_grid(out / "b1.grid", f.b1());
    write_grid(out / "b2.grid", f.b2());
    write_meta(out / "meta.json", cfg, phantom, "phantom");

    DtNOperator dtn = clock.run("forward-dtn", [&] {
        DtNOperator op = assemble_dtn(f, cfg.modes, cfg.bvp_options());
        op.metadata = phantom.describe();
        return op;
    });
    write_dtn((out / "dtn.json").string(), dtn);

    BoundaryFunction einvb = clock.run("einvb", [&] {
        return einvb_limit(dtn, cfg.kmax, cfg.directions, cfg.series_n, cfg.reg, cfg.boundary_m);
    });
    write_boundary_csv(out / "einvb.csv", einvb.values);

    ScatteringTransform t =
        clock.run("scatter-boundary", [&] { return boundary_scattering_grid(cfg, dtn, einvb); });

    PipelineReport rep = finish_inversion(cfg, phantom, f, t, clock, timings);
    rep.timings = timings;
    std::ofstream os(out / "report.json");
    os << rep.json() << '\n';
    return rep;
}

PipelineReport run_roundtrip_volume(const RunConfig& cfg, const Phantom& phantom) {
    const fs::path out(cfg.outdir);
    fs::create_directories(out);
    std::map<std::string, double> timings;
    StageClock clock(timings);

    ConvectionField f = clock.run("phantom", [&] { return make_phantom(phantom, cfg.nx, cfg.L); });
    write_grid(out / "b1.grid", f.b1());
    write_grid(out / "b2.grid", f.b2());
    write_meta(out / "meta.json", cfg, phantom, "phantom");

    Potential q = q_from_b(f);
    write_grid(out / "q.grid", q.grid());

    ScatteringTransform t = clock.run("scatter-volume", [&] {
        return scattering_grid(q, cfg.kgrid_n, cfg.k_grid_L(), cfg.K, cfg.solve_options(),
                               cfg.threads);
    });

    PipelineReport rep = finish_inversion(cfg, phantom, f, t, clock, timings);
    rep.timings = timings;
    std::ofstream os(out / "report.json");
    os << rep.json() << '\n';
    return rep;
}

double compare_grids(const fs::path& a, const fs::path& b, double p) {
    ComplexGrid ga = read_grid(a);
    ComplexGrid gb = read_grid(b);
    if (!ga.same_layout(gb))
        throw IoError("compare: grid headers differ (" + std::to_string(ga.nx()) + "," +
                      std::to_string(ga.L()) + ") vs (" + std::to_string(gb.nx()) + "," +
                      std::to_string(gb.L()) + ")");
    ComplexGrid diff(ga.nx(), ga.L());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = ga[i] - gb[i];
    const double den = grid_norm(ga, p);
    const double num = grid_norm(diff, p);
    return den == 0.0 ? num : num / den;
}

}  // namespace dbar
