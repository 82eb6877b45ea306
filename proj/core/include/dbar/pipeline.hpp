#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "dbar/boundary.hpp"
#include "dbar/forward.hpp"
#include "dbar/inverse.hpp"
#include "dbar/phantom.hpp"

namespace dbar {

/// Every tunable of the reconstruction chain. Serializable; echoed (with its
/// hash) into each output's metadata.
struct RunConfig {
    int nx = 128;
    double L = 1.1;
    double K = 6.0;        // scattering-transform truncation radius
    int kgrid_n = 64;      // k-grid samples per axis
    int modes = 32;        // DtN Fourier modes
    int series_n = 16;     // exterior series order N
    double reg = 1e-8;     // trace-recovery ridge
    double kmax = 8.0;     // |k| for the large-k limit
    int directions = 8;    // directions averaged in einvb_limit
    int boundary_m = 256;  // boundary sample count
    int bvp_radial = 49;   // radial collocation degree
    int bvp_ntheta = 0;    // 0 = auto (max(2 modes + 2, 82))
    double tol = 1e-10;    // iterative solver tolerance
    int max_iterations = 500;
    unsigned long long seed = 0;  // reserved for randomized phantom corpora
    int threads = 0;              // 0 = hardware concurrency
    std::string outdir = "out";

    double k_grid_L() const { return K / (1.0 - Potential::kSupportMargin); }
    DiskSolverOptions bvp_options() const;
    DbarSolveOptions solve_options() const;
};

std::string config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const std::string& text);
RunConfig load_config_file(const std::filesystem::path& path);

/// FNV-1a hash of the canonical JSON serialization, as fixed-width hex.
std::string config_hash(const RunConfig& cfg);

std::string phantom_to_json(const Phantom& p);
Phantom phantom_from_json(const std::string& text);

struct StageTiming {
    double seconds = 0.0;
};

struct PipelineReport {
    std::string config_hash;
    double err_b1 = 0.0;       // relative L2 (absolute when the reference is 0)
    double err_b2 = 0.0;
    double err_q = 0.0;
    double t_max_abs = 0.0;
    int unwrap_fallback_nodes = 0;
    std::map<std::string, double> timings;  // stage -> seconds
    std::string json(bool with_timings = true) const;
};

/// Full boundary-data pipeline:
///   phantom -> DtN operator -> trace recovery per k -> large-k limit ->
///   boundary t(k) -> k-space inversion -> phase unwrap -> b1, b2.
/// Writes every intermediate artifact under cfg.outdir and returns the
/// error report. A stage failure is rethrown with the stage name attached;
/// artifacts written so far stay on disk for replay.
PipelineReport run_pipeline(const RunConfig& cfg, const Phantom& phantom);

/// Volume-formula round trip (skips the boundary stages):
///   phantom -> q -> t (volume) -> q_hat -> b_hat.
PipelineReport run_roundtrip_volume(const RunConfig& cfg, const Phantom& phantom);

/// Relative discrete norm ||a - b||_p / ||a||_p of two GRID files
/// (absolute when a is zero). Throws IoError on header mismatch.
double compare_grids(const std::filesystem::path& a, const std::filesystem::path& b, double p);

/// Round to 12 significant digits (report diff-stability convention).
double round_sig(double v);

}  // namespace dbar
