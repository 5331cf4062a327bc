#include "geovi/examples.hpp"

#include <cmath>
#include <numeric>

#include "geovi/errors.hpp"
#include "geovi/rng.hpp"

namespace geovi {

namespace {

ExampleBundle lognormal1d() {
    // Scalar log-normal signal e^{3 xi} observed once through Gaussian noise.
    ExampleBundle b;
    b.name = "lognormal1d";
    auto fwd = compose(exp_map(1), affine_map(1, 3.0, 0.0));
    b.data = Vec{0.5};
    b.model = Model::make(fwd, normal_likelihood(b.data, 0.3));
    b.derived.emplace_back("signal", fwd);
    return b;
}

ExampleBundle meanvar2d() {
    // Infer mean and variance of a single Gaussian draw: m = xi_1,
    // v = exp(3 (xi_2 + 2 xi_1)), observed d = 0.
    ExampleBundle b;
    b.name = "meanvar2d";
    DenseMatrix lin(1, 2);
    lin(0, 0) = 6.0;
    lin(0, 1) = 3.0;
    auto mean = select_map(2, {0});
    auto variance = compose(exp_map(1), linear_map(lin));
    b.data = Vec{0.0};
    b.model = Model::make(fanout_shared({mean, variance}), variable_noise_normal(b.data));
    b.derived.emplace_back("mean", mean);
    b.derived.emplace_back("variance", variance);
    return b;
}

ExampleBundle product2d() {
    // Product of a normal and a log-normal quantity, one noisy observation.
    ExampleBundle b;
    b.name = "product2d";
    auto parts = fanout_shared({select_map(2, {0}), compose(exp_map(1), select_map(2, {1}))});
    auto fwd = compose(product_map(1), parts);
    b.data = Vec{-0.3};
    b.model = Model::make(fwd, normal_likelihood(b.data, 0.1));
    b.derived.emplace_back("signal", fwd);
    return b;
}

ExampleBundle sigmoid1d() {
    // Sigmoid-normal measurement: the metric turns over and expansion points
    // near the turning point produce heavy-tailed approximations.
    ExampleBundle b;
    b.name = "sigmoid1d";
    auto fwd = compose(sigmoid_map(1), affine_map(1, 3.0, 0.0));
    b.data = Vec{0.2};
    b.model = Model::make(fwd, normal_likelihood(b.data, 0.2));
    b.derived.emplace_back("signal", fwd);
    return b;
}

ExampleBundle bimodal1d() {
    // Gaussian measurement of xi^4 + xi; d = 3 places the direct-method
    // optimum of the right mode at xi = 1.08 and keeps both modes relevant.
    ExampleBundle b;
    b.name = "bimodal1d";
    DenseMatrix ones(1, 2);
    ones(0, 0) = ones(0, 1) = 1.0;
    auto fwd =
        compose(linear_map(ones), fanout_shared({pow_map(1, 4.0), identity_map(1)}));
    b.data = Vec{3.0};
    b.model = Model::make(fwd, normal_likelihood(b.data, 1.0));
    b.derived.emplace_back("signal", fwd);
    return b;
}

std::vector<std::size_t> index_range(std::size_t lo, std::size_t hi) {
    std::vector<std::size_t> idx(hi - lo);
    std::iota(idx.begin(), idx.end(), lo);
    return idx;
}

ExampleBundle lognormal_process(std::size_t size, std::uint64_t seed) {
    // Log-normal process e^s on a periodic 1D grid, partially masked, with
    // the noise level inferred alongside the field and its spectrum.
    ExampleBundle b;
    b.name = "lognormal-process";
    b.seed = seed;
    b.synthesized = true;

    const std::size_t n = size ? size : 128;
    auto grid = std::make_shared<const Grid>(std::vector<std::size_t>{n});
    b.field_grid = grid;

    const SpectrumParams params;
    const std::size_t sdim = spectrum_latent_dim(*grid);
    const std::size_t dim = 1 + sdim + n;

    // Contiguous central fifth of the pixels is unobserved.
    const std::size_t m0 = 2 * n / 5, m1 = m0 + n / 5;
    for (std::size_t i = 0; i < n; ++i)
        if (i < m0 || i >= m1) b.observed.push_back(i);
    const std::size_t nobs = b.observed.size();

    // Latent layout: [xi_noise, spectrum latents, excitations].
    auto field = compose(correlated_field_map(params, *grid), select_map(dim, index_range(1, dim)));
    auto signal = compose(exp_map(n), field);
    auto mean_branch = compose(select_map(n, b.observed), signal);

    const double ln_s0 = std::log(0.3), s_std = 0.5;
    auto sigma_n = compose(exp_map(1), compose(affine_map(1, s_std, ln_s0), select_map(dim, {0})));
    auto var_branch = compose(
        broadcast_map(nobs),
        compose(exp_map(1), compose(affine_map(1, 2.0 * s_std, 2.0 * ln_s0), select_map(dim, {0}))));

    Rng rng(seed);
    b.truth_latent = rng.normal_vec(dim);
    b.truth_latent[0] = (std::log(0.2) - ln_s0) / s_std;  // noise truth exactly 0.2
    const Vec mean_true = mean_branch.forward(b.truth_latent);
    const Vec noise = rng.normal_vec(nobs);
    b.data.resize(nobs);
    for (std::size_t i = 0; i < nobs; ++i) b.data[i] = mean_true[i] + 0.2 * noise[i];

    b.model = Model::make(fanout_shared({mean_branch, var_branch}), variable_noise_normal(b.data));
    b.derived.emplace_back("sigma_n", sigma_n);
    b.derived.emplace_back("amplitude",
                           compose(spectrum_map(params, *grid), select_map(dim, index_range(1, 1 + sdim))));
    b.derived.emplace_back("field", field);
    b.derived.emplace_back("signal", signal);
    return b;
}

ExampleBundle poisson_separation(std::size_t size, std::uint64_t seed) {
    // Poisson counts of PSF-convolved diffuse emission e^s plus pointwise
    // inverse-gamma sources p: lambda = R(p + e^s).
    ExampleBundle b;
    b.name = "poisson-separation";
    b.seed = seed;
    b.synthesized = true;

    const std::size_t naxis = size ? size : 32;
    auto grid = std::make_shared<const Grid>(std::vector<std::size_t>{naxis, naxis});
    b.field_grid = grid;
    const std::size_t npix = grid->size();

    SpectrumParams params;
    params.offset_std = {std::log(0.5), 0.3};
    params.slope = {-1.5, 0.5};
    const std::size_t sdim = spectrum_latent_dim(*grid);
    const std::size_t dim = sdim + 2 * npix;

    // Latent layout: [spectrum latents, excitations, source latents].
    auto field =
        compose(correlated_field_map(params, *grid), select_map(dim, index_range(0, sdim + npix)));
    auto diffuse = compose(exp_map(npix), field);
    auto points =
        compose(point_source_map(npix, 2.0, 3.0), select_map(dim, index_range(sdim + npix, dim)));
    auto rate = compose(psf_map(*grid, 3.0), compose(add_map(npix), fanout_shared({points, diffuse})));

    Rng rng(seed);
    b.truth_latent = rng.normal_vec(dim);
    const Vec lam = rate.forward(b.truth_latent);
    b.data.resize(npix);
    for (std::size_t i = 0; i < npix; ++i)
        b.data[i] = static_cast<double>(rng.poisson(lam[i]));

    b.model = Model::make(rate, poisson_likelihood(b.data));
    b.derived.emplace_back("diffuse", diffuse);
    b.derived.emplace_back("points", points);
    b.derived.emplace_back("rate", rate);
    b.derived.emplace_back("amplitude",
                           compose(spectrum_map(params, *grid), select_map(dim, index_range(0, sdim))));
    b.derived.emplace_back("field", field);
    return b;
}

}  // namespace

const std::vector<std::string>& example_names() {
    static const std::vector<std::string> names{
        "lognormal1d", "meanvar2d",         "product2d",         "sigmoid1d",
        "bimodal1d",   "lognormal-process", "poisson-separation"};
    return names;
}

ExampleBundle make_example(const std::string& name, std::size_t size, std::uint64_t seed) {
    ExampleBundle b;
    if (name == "lognormal1d") b = lognormal1d();
    else if (name == "meanvar2d") b = meanvar2d();
    else if (name == "product2d") b = product2d();
    else if (name == "sigmoid1d") b = sigmoid1d();
    else if (name == "bimodal1d") b = bimodal1d();
    else if (name == "lognormal-process") return lognormal_process(size, seed);
    else if (name == "poisson-separation") return poisson_separation(size, seed);
    else throw UnknownExample("unknown example: " + name);
    b.seed = seed;
    return b;
}

}  // namespace geovi
