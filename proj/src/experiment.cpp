#include "geovi/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "geovi/dense.hpp"
#include "geovi/errors.hpp"
#include "geovi/examples.hpp"
#include "geovi/griddens.hpp"
#include "geovi/linop.hpp"

namespace geovi {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// ---- strict value parsing (full consumption or ConfigError) ----

std::uint64_t to_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(value, &used);
        if (used != value.size()) throw ConfigError("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + ": expected an unsigned integer, got '" +
                          value + "'");
    }
}

std::size_t to_size(const std::string& key, const std::string& value) {
    return static_cast<std::size_t>(to_u64(key, value));
}

int to_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(value, &used);
        if (used != value.size()) throw ConfigError("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + ": expected an integer, got '" + value + "'");
    }
}

double to_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw ConfigError("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + ": expected a number, got '" + value + "'");
    }
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("config key " + key + ": expected true/false, got '" + value + "'");
}

// ---- artifact plumbing ----

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex16(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Collects artifact bodies and writes each with a stamp line carrying the
// run identity and the manifest hash, so every file is self-describing.
struct Writer {
    std::string dir;
    std::string stamp;
    std::vector<std::string> files;

    void write(const std::string& name, const std::string& body) {
        const std::string path = dir + "/" + name;
        std::ofstream f(path, std::ios::binary);
        if (!f) throw Error("cannot open " + path + " for writing");
        f << "# geovi-run " << stamp << "\n" << body;
        if (!f) throw Error("short write on " + path);
        files.push_back(name);
    }
};

std::string shape_string(const Grid& grid) {
    std::string s = std::to_string(grid.shape()[0]);
    for (int a = 1; a < grid.ndim(); ++a) s += "x" + std::to_string(grid.shape()[a]);
    return s;
}

std::string manifest_body(const ExperimentConfig& c, const ExampleBundle& ex) {
    std::ostringstream o;
    o << "example = " << c.example << "\n";
    o << "method = " << c.method << "\n";
    o << "seed = " << c.seed << "\n";
    o << "size = " << c.size << "\n";
    o << "samples = " << c.samples << "\n";
    // threads and out are execution details; results never depend on them.
    o << "vi.outer_max = " << c.vi.outer_max << "\n";
    o << "vi.pairs = " << c.vi.pairs << "\n";
    o << "vi.antithetic = " << (c.vi.antithetic ? 1 : 0) << "\n";
    o << "vi.kl_rel_tol = " << fmt(c.vi.kl_rel_tol) << "\n";
    o << "vi.shift_tol = " << fmt(c.vi.shift_tol) << "\n";
    o << "vi.newton.max_iter = " << c.vi.kl_newton.max_iter << "\n";
    o << "vi.newton.grad_tol = " << fmt(c.vi.kl_newton.grad_tol) << "\n";
    o << "vi.newton.energy_tol = " << fmt(c.vi.kl_newton.energy_tol) << "\n";
    o << "vi.newton.cg_rel_tol = " << fmt(c.vi.kl_newton.cg.rel_tol) << "\n";
    o << "vi.newton.cg_max_iter = " << c.vi.kl_newton.cg.max_iter << "\n";
    o << "vi.sampler.start = "
      << (c.vi.sampler.start == SamplerStart::eta1 ? "eta1" : "linearized") << "\n";
    o << "vi.sampler.misfit_target = " << fmt(c.vi.sampler.misfit_target) << "\n";
    o << "hmc.burn_in = " << c.hmc.burn_in << "\n";
    o << "hmc.thin = " << c.hmc.thin << "\n";
    o << "hmc.step_size = " << fmt(c.hmc.step_size) << "\n";
    o << "hmc.leapfrog_steps = " << c.hmc.leapfrog_steps << "\n";
    o << "hmc.adapt = " << (c.hmc.adapt ? 1 : 0) << "\n";
    o << "hmc.target_accept = " << fmt(c.hmc.target_accept) << "\n";
    o << "oracle.cells_1d = " << c.oracle_cells_1d << "\n";
    o << "oracle.cells_2d = " << c.oracle_cells_2d << "\n";
    o << "model.dim = " << ex.model.dim << "\n";
    o << "data.n = " << ex.data.size() << "\n";
    o << "example.synthesized = " << (ex.synthesized ? 1 : 0) << "\n";
    if (ex.model.dim <= 2) {
        o << "oracle.lo = " << fmt(ex.oracle_lo) << "\n";
        o << "oracle.hi = " << fmt(ex.oracle_hi) << "\n";
    }
    if (ex.field_grid) {
        o << "grid.shape = " << shape_string(*ex.field_grid) << "\n";
        o << "observed.n = " << (ex.observed.empty() ? ex.field_grid->size() : ex.observed.size())
          << "\n";
    }
    o << "dense_limit = " << dense_limit() << "\n";
    return o.str();
}

const DiffMap* find_derived(const ExampleBundle& ex, const std::string& name) {
    for (const auto& [n, m] : ex.derived)
        if (n == name) return &m;
    return nullptr;
}

std::string density_csv(const GridDensity& g) {
    std::string b = "cell,log_density\n";
    for (std::size_t i = 0; i < g.log_density.size(); ++i)
        b += std::to_string(i) + "," + fmt(g.log_density[i]) + "\n";
    return b;
}

}  // namespace

void set_config_key(ExperimentConfig& c, const std::string& key, const std::string& value) {
    if (key == "example") c.example = value;
    else if (key == "method") c.method = value;
    else if (key == "seed") c.seed = to_u64(key, value);
    else if (key == "size") c.size = to_size(key, value);
    else if (key == "samples") c.samples = to_size(key, value);
    else if (key == "threads") c.threads = to_int(key, value);
    else if (key == "out") c.out_dir = value;
    else if (key == "vi.outer_max") c.vi.outer_max = to_int(key, value);
    else if (key == "vi.pairs") c.vi.pairs = to_size(key, value);
    else if (key == "vi.antithetic") c.vi.antithetic = to_bool(key, value);
    else if (key == "vi.kl_rel_tol") c.vi.kl_rel_tol = to_double(key, value);
    else if (key == "vi.shift_tol") c.vi.shift_tol = to_double(key, value);
    else if (key == "vi.newton.max_iter") c.vi.kl_newton.max_iter = to_int(key, value);
    else if (key == "vi.newton.grad_tol") c.vi.kl_newton.grad_tol = to_double(key, value);
    else if (key == "vi.newton.energy_tol") c.vi.kl_newton.energy_tol = to_double(key, value);
    else if (key == "vi.newton.cg_rel_tol") c.vi.kl_newton.cg.rel_tol = to_double(key, value);
    else if (key == "vi.newton.cg_max_iter") c.vi.kl_newton.cg.max_iter = to_int(key, value);
    else if (key == "vi.sampler.start") {
        if (value == "eta1") c.vi.sampler.start = SamplerStart::eta1;
        else if (value == "linearized") c.vi.sampler.start = SamplerStart::linearized;
        else throw ConfigError("config key vi.sampler.start: expected eta1|linearized");
    } else if (key == "vi.sampler.misfit_target")
        c.vi.sampler.misfit_target = to_double(key, value);
    else if (key == "hmc.burn_in") c.hmc.burn_in = to_size(key, value);
    else if (key == "hmc.thin") c.hmc.thin = to_size(key, value);
    else if (key == "hmc.step_size") c.hmc.step_size = to_double(key, value);
    else if (key == "hmc.leapfrog_steps") c.hmc.leapfrog_steps = to_size(key, value);
    else if (key == "hmc.adapt") c.hmc.adapt = to_bool(key, value);
    else if (key == "hmc.target_accept") c.hmc.target_accept = to_double(key, value);
    else if (key == "oracle.cells_1d") c.oracle_cells_1d = to_size(key, value);
    else if (key == "oracle.cells_2d") c.oracle_cells_2d = to_size(key, value);
    else throw ConfigError("unknown config key: " + key);
}

void load_config_file(ExperimentConfig& cfg, const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file " + path);
    std::string line;
    std::size_t lineno = 0;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    while (std::getline(f, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
        set_config_key(cfg, key, value);
    }
}

std::vector<std::string> run_experiment(const ExperimentConfig& cfg_in) {
    ExperimentConfig cfg = cfg_in;
    if (cfg.example.empty()) throw ConfigError("run: an example name is required");
    const auto& names = example_names();
    if (std::find(names.begin(), names.end(), cfg.example) == names.end())
        throw UnknownExample("unknown example: " + cfg.example);
    const bool is_vi = cfg.method == "geovi" || cfg.method == "mgvi";
    if (!is_vi && cfg.method != "direct" && cfg.method != "hmc")
        throw ConfigError("unknown method: " + cfg.method + " (use geovi|mgvi|direct|hmc)");
    if (cfg.samples < 1) throw ConfigError("run: samples must be >= 1");

    int threads = cfg.threads;
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    cfg.vi.threads = threads;
    cfg.vi.final_samples = cfg.samples;
    cfg.hmc.n_samples = cfg.samples;

    const ExampleBundle ex = make_example(cfg.example, cfg.size, cfg.seed);
    const Model& model = ex.model;

    std::filesystem::create_directories(cfg.out_dir);
    const std::string body = manifest_body(cfg, ex);
    const std::string hash = hex16(fnv1a(body));
    Writer w{cfg.out_dir,
             "example=" + cfg.example + " method=" + cfg.method +
                 " seed=" + std::to_string(cfg.seed) + " manifest=" + hash,
             {}};
    w.write("manifest.txt", body + "manifest_hash = " + hash + "\n");

    // ---- inference ----
    Rng rng(cfg.seed);
    ApproximationState state;
    NewtonResult direct_res;
    HmcResult hres;
    const bool have_state = is_vi || cfg.method == "direct";
    if (cfg.method == "geovi") {
        state = run_geovi(model, cfg.vi, rng);
    } else if (cfg.method == "mgvi") {
        state = run_mgvi(model, cfg.vi, rng);
    } else if (cfg.method == "direct") {
        direct_res = run_direct_lowdim(model, cfg.vi.kl_newton);
        state = sample_at(model, direct_res.x, cfg.vi, rng);
    } else {
        Rng chain = rng.fork(0x484d43ULL);
        hres = hmc_reference(model, zeros(model.dim), cfg.hmc, chain);
    }
    const std::vector<Vec> samples = have_state ? state.samples() : hres.samples;

    // ---- samples and per-coordinate summary ----
    {
        std::string b = "sample";
        for (std::size_t j = 0; j < model.dim; ++j) b += ",xi_" + std::to_string(j);
        b += "\n";
        for (std::size_t i = 0; i < samples.size(); ++i) {
            b += std::to_string(i);
            for (double v : samples[i]) b += "," + fmt(v);
            b += "\n";
        }
        w.write("samples.csv", b);
    }
    {
        std::string b = "coordinate,mean,std\n";
        const double n = static_cast<double>(samples.size());
        for (std::size_t j = 0; j < model.dim; ++j) {
            double s = 0.0, ss = 0.0;
            for (const Vec& x : samples) {
                s += x[j];
                ss += x[j] * x[j];
            }
            const double mean = s / n;
            const double var = n > 1.0 ? std::max(0.0, (ss - n * mean * mean) / (n - 1.0)) : 0.0;
            b += "xi_" + std::to_string(j) + "," + fmt(mean) + "," + fmt(std::sqrt(var)) + "\n";
        }
        w.write("summary.csv", b);
    }
    if (ex.synthesized) {
        std::string b = "coordinate,truth\n";
        for (std::size_t j = 0; j < ex.truth_latent.size(); ++j)
            b += "xi_" + std::to_string(j) + "," + fmt(ex.truth_latent[j]) + "\n";
        w.write("truth.csv", b);
    }

    // ---- grid oracle densities and the KL table (1D/2D examples) ----
    double grid_evidence = std::numeric_limits<double>::quiet_NaN();
    if (model.dim <= 2) {
        GridDensity p = model.dim == 1
                            ? make_grid_1d(ex.oracle_lo, ex.oracle_hi, cfg.oracle_cells_1d)
                            : make_grid_2d(ex.oracle_lo, ex.oracle_hi, cfg.oracle_cells_2d);
        fill_posterior_density(model, p, threads);
        grid_evidence = grid_log_evidence(p);
        normalize_density(p);
        w.write("density_p.csv", density_csv(p));

        if (have_state) {
            GridDensity q = p;
            if (cfg.method == "mgvi") {
                // The first-order approximation is the Gaussian N(xi_bar, M^-1)
                // in latent coordinates; gridding the pushforward instead
                // would misreport it.
                const DenseMatrix cov = gauss_inverse(dense_materialize(model.metric(state.xi_bar)));
                fill_gaussian_density(state.xi_bar, cov, q);
            } else {
                fill_transformed_density(model, state.xi_bar, state.xi_bar, q, threads);
            }
            normalize_density(q);
            w.write("density_q.csv", density_csv(q));
            const KlPair kl_method = grid_kl(p, q);

            // Baseline: the best normal approximation in latent coordinates
            // (moment match to P on the same grid).
            const GridMoments mom = grid_moments(p);
            GridDensity qlin = p;
            fill_gaussian_density(mom.mean, mom.cov, qlin);
            normalize_density(qlin);
            const KlPair kl_lin = grid_kl(p, qlin);

            // The method row keeps a fixed label so tables from different
            // methods join line by line; the stamp records which method ran.
            std::string b = "label,kl_pq_nats,kl_qp_nats\n";
            b += "approximation," + fmt(kl_method.pq) + "," + fmt(kl_method.qp) + "\n";
            b += "linear_baseline," + fmt(kl_lin.pq) + "," + fmt(kl_lin.qp) + "\n";
            w.write("kl_table.csv", b);
        }
    }

    // ---- evidence lower bound ----
    if (have_state) {
        const ElboEstimate e = elbo(model, state);
        std::string b = "elbo,std_error,logdet_metric,n,dropped,grid_log_evidence\n";
        b += fmt(e.value) + "," + fmt(e.std_error) + "," + fmt(e.logdet_metric) + "," +
             std::to_string(e.n) + "," + std::to_string(e.dropped) + "," + fmt(grid_evidence) +
             "\n";
        w.write("elbo.csv", b);
    }

    // ---- example-specific marginals ----
    if (const DiffMap* amp = find_derived(ex, "amplitude")) {
        const Vec kmag = ex.field_grid->bin_kmag();
        std::string head = "sample";
        for (double k : kmag) head += ",A_k=" + fmt6(k);
        std::string b = head + "\n";
        for (std::size_t i = 0; i < samples.size(); ++i) {
            b += std::to_string(i);
            for (double v : amp->forward(samples[i])) b += "," + fmt(v);
            b += "\n";
        }
        w.write("spectrum.csv", b);
        if (ex.synthesized) {
            std::string t = head + "\ntruth";
            for (double v : amp->forward(ex.truth_latent)) t += "," + fmt(v);
            w.write("spectrum_truth.csv", t + "\n");
        }
    }
    if (const DiffMap* sn = find_derived(ex, "sigma_n")) {
        std::string b = "sample,sigma_n\n";
        for (std::size_t i = 0; i < samples.size(); ++i)
            b += std::to_string(i) + "," + fmt(sn->forward(samples[i])[0]) + "\n";
        w.write("sigma_n.csv", b);
    }

    // ---- run diagnostics ----
    {
        std::string b = "key,value\n";
        if (have_state) {
            b += "converged," + std::to_string(state.converged ? 1 : 0) + "\n";
            b += "outer_iterations," + std::to_string(state.outer_iterations) + "\n";
            if (!state.kl_trace.empty()) b += "kl_final," + fmt(state.kl_trace.back()) + "\n";
            b += "kl_cg_iterations," + std::to_string(state.kl_cg_iterations) + "\n";
            b += "draw_newton_iterations," + std::to_string(state.draw_newton_iterations) + "\n";
            b += "kl_dropped," + std::to_string(state.kl_dropped) + "\n";
            b += "draw_retries," + std::to_string(state.draw_retries) + "\n";
            if (cfg.method == "direct") {
                b += "direct_converged," + std::to_string(direct_res.converged ? 1 : 0) + "\n";
                b += "direct_value," + fmt(direct_res.value) + "\n";
                b += "direct_iterations," + std::to_string(direct_res.iterations) + "\n";
            }
        } else {
            b += "acceptance_rate," + fmt(hres.acceptance_rate) + "\n";
            b += "final_step_size," + fmt(hres.final_step_size) + "\n";
            b += "mean_abs_energy_error," + fmt(hres.mean_abs_energy_error) + "\n";
            b += "low_acceptance," + std::to_string(hres.low_acceptance ? 1 : 0) + "\n";
        }
        w.write("stats.csv", b);
    }

    return w.files;
}

}  // namespace geovi
