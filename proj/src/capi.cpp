#include "battbayes.h"

#include <cstring>
#include <exception>
#include <new>
#include <optional>
#include <string>

#include "battbayes/errors.hpp"
#include "battbayes/pipeline.hpp"
#include "battbayes/posterior.hpp"
#include "battbayes/preprocess.hpp"

namespace bb = battbayes;

namespace {

constexpr const char* kVersion = "1.0.0";

bb_status status_from_exception(std::string* message, bool setup_phase) {
    try {
        throw;
    } catch (const bb::SchemaError& e) {
        if (message) *message = e.what();
        return setup_phase ? BB_ERR_USAGE : BB_ERR_DOMAIN;
    } catch (const bb::ParseError& e) {
        if (message) *message = e.what();
        return setup_phase ? BB_ERR_USAGE : BB_ERR_DOMAIN;
    } catch (const bb::ConfigError& e) {
        if (message) *message = e.what();
        return setup_phase ? BB_ERR_USAGE : BB_ERR_DOMAIN;
    } catch (const bb::IoError& e) {
        if (message) *message = e.what();
        return setup_phase ? BB_ERR_USAGE : BB_ERR_DOMAIN;
    } catch (const bb::Error& e) {
        if (message) *message = e.what();
        return BB_ERR_DOMAIN;
    } catch (const std::bad_alloc&) {
        if (message) *message = "out of memory";
        return BB_ERR_INTERNAL;
    } catch (const std::exception& e) {
        if (message) *message = e.what();
        return BB_ERR_INTERNAL;
    } catch (...) {
        if (message) *message = "unknown error";
        return BB_ERR_INTERNAL;
    }
}

std::optional<bb::Family> family_of(const char* name) {
    if (!name) return std::nullopt;
    const std::string n(name);
    if (n == "gamma") return bb::Family::Gamma;
    if (n == "beta") return bb::Family::Beta;
    if (n == "rayleigh") return bb::Family::Rayleigh;
    if (n == "normal") return bb::Family::Normal;
    return std::nullopt;
}

}  // namespace

struct bb_run {
    std::string mode;
    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::string> trained_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> iterations;
    std::optional<double> burn_in_fraction;
    std::optional<std::uint64_t> thinning;
    std::optional<double> split_ratio;
    std::optional<std::string> split_mode;
    std::string last_error;
};

extern "C" {

const char* bb_version(void) { return kVersion; }

bb_run* bb_run_new(const char* mode) {
    auto* run = new (std::nothrow) bb_run;
    if (run && mode) {
        run->mode = mode;
    }
    return run;
}

void bb_run_free(bb_run* run) { delete run; }

const char* bb_run_last_error(const bb_run* run) {
    return run ? run->last_error.c_str() : "null run handle";
}

bb_status bb_run_set_config(bb_run* run, const char* config_path) {
    if (!run) return BB_ERR_USAGE;
    if (!config_path || !*config_path) {
        run->last_error = "config path is empty";
        return BB_ERR_USAGE;
    }
    run->config_path = config_path;
    return BB_OK;
}

bb_status bb_run_set_out_dir(bb_run* run, const char* out_dir) {
    if (!run) return BB_ERR_USAGE;
    if (!out_dir || !*out_dir) {
        run->last_error = "output directory is empty";
        return BB_ERR_USAGE;
    }
    run->out_dir = std::string(out_dir);
    return BB_OK;
}

bb_status bb_run_set_trained_dir(bb_run* run, const char* trained_dir) {
    if (!run) return BB_ERR_USAGE;
    if (!trained_dir || !*trained_dir) {
        run->last_error = "trained directory is empty";
        return BB_ERR_USAGE;
    }
    run->trained_dir = std::string(trained_dir);
    return BB_OK;
}

bb_status bb_run_set_seed(bb_run* run, uint64_t seed) {
    if (!run) return BB_ERR_USAGE;
    run->seed = seed;
    return BB_OK;
}

bb_status bb_run_set_iterations(bb_run* run, uint64_t iterations) {
    if (!run) return BB_ERR_USAGE;
    if (iterations == 0) {
        run->last_error = "iterations must be positive";
        return BB_ERR_USAGE;
    }
    run->iterations = iterations;
    return BB_OK;
}

bb_status bb_run_set_burn_in(bb_run* run, double fraction) {
    if (!run) return BB_ERR_USAGE;
    if (!(fraction >= 0.0) || !(fraction < 1.0)) {
        run->last_error = "burn-in fraction must lie in [0, 1)";
        return BB_ERR_USAGE;
    }
    run->burn_in_fraction = fraction;
    return BB_OK;
}

bb_status bb_run_set_thinning(bb_run* run, uint64_t stride) {
    if (!run) return BB_ERR_USAGE;
    if (stride == 0) {
        run->last_error = "thinning stride must be positive";
        return BB_ERR_USAGE;
    }
    run->thinning = stride;
    return BB_OK;
}

bb_status bb_run_set_split(bb_run* run, double ratio, const char* mode) {
    if (!run) return BB_ERR_USAGE;
    if (ratio > 0.0) {
        if (!(ratio < 1.0)) {
            run->last_error = "split ratio must lie in (0, 1)";
            return BB_ERR_USAGE;
        }
        run->split_ratio = ratio;
    }
    if (mode) {
        const std::string m(mode);
        if (m != "sequential" && m != "random") {
            run->last_error = "split mode must be 'sequential' or 'random'";
            return BB_ERR_USAGE;
        }
        run->split_mode = m;
    }
    return BB_OK;
}

bb_status bb_run_execute(bb_run* run) {
    if (!run) return BB_ERR_USAGE;
    run->last_error.clear();

    enum class Mode { Train, Test, Estimate, Scenario } mode;
    if (run->mode == "train") {
        mode = Mode::Train;
    } else if (run->mode == "test") {
        mode = Mode::Test;
    } else if (run->mode == "estimate") {
        mode = Mode::Estimate;
    } else if (run->mode == "scenario") {
        mode = Mode::Scenario;
    } else {
        run->last_error = "unknown mode '" + run->mode +
                          "' (expected train, test, estimate, or scenario)";
        return BB_ERR_USAGE;
    }
    if (run->config_path.empty()) {
        run->last_error = "no config file set";
        return BB_ERR_USAGE;
    }

    bb::RunConfig cfg;
    try {
        cfg = bb::load_run_config(run->config_path);
        if (run->out_dir) cfg.out_dir = *run->out_dir;
        if (run->trained_dir) cfg.trained_dir = *run->trained_dir;
        if (run->seed) cfg.sampler.seed = *run->seed;
        if (run->iterations) cfg.sampler.iterations = *run->iterations;
        if (run->burn_in_fraction) cfg.sampler.burn_in_fraction = *run->burn_in_fraction;
        if (run->thinning) cfg.sampler.thinning = *run->thinning;
        if (run->split_ratio) cfg.split_ratio = *run->split_ratio;
        if (run->split_mode) cfg.split_mode = bb::split_mode_from_name(*run->split_mode);
        if (run->trained_dir && cfg.trained_dir.empty()) cfg.trained_dir = cfg.out_dir;
    } catch (...) {
        return status_from_exception(&run->last_error, /*setup_phase=*/true);
    }

    try {
        switch (mode) {
            case Mode::Train:
                bb::run_train(cfg);
                break;
            case Mode::Test:
                bb::run_test(cfg);
                break;
            case Mode::Estimate:
                bb::run_estimate(cfg);
                break;
            case Mode::Scenario:
                bb::run_scenario(cfg);
                break;
        }
    } catch (...) {
        return status_from_exception(&run->last_error, /*setup_phase=*/false);
    }
    return BB_OK;
}

bb_status bb_log_pdf(const char* family, double mean, double sd, double x, double* out) {
    if (!out) return BB_ERR_USAGE;
    const auto fam = family_of(family);
    if (!fam) return BB_ERR_USAGE;
    try {
        *out = bb::log_pdf(bb::DistSpec{*fam, mean, sd}, x);
        return BB_OK;
    } catch (...) {
        return status_from_exception(nullptr, false);
    }
}

bb_status bb_draw(const char* family, double mean, double sd, uint64_t seed,
                  uint64_t stream, size_t n, double* out) {
    if (!out && n > 0) return BB_ERR_USAGE;
    const auto fam = family_of(family);
    if (!fam) return BB_ERR_USAGE;
    try {
        bb::RandomStream rng = bb::RandomStream::substream(seed, stream);
        const bb::DistSpec spec{*fam, mean, sd};
        for (size_t i = 0; i < n; ++i) {
            out[i] = bb::draw(spec, rng);
        }
        return BB_OK;
    } catch (...) {
        return status_from_exception(nullptr, false);
    }
}

bb_status bb_autocorrelation(const double* values, size_t n, size_t lag, double* out) {
    if (!out || (!values && n > 0)) return BB_ERR_USAGE;
    try {
        const bb::TimeSeries series{std::vector<double>(values, values + n), 1.0};
        *out = bb::autocorrelation(series, lag);
        return BB_OK;
    } catch (...) {
        return status_from_exception(nullptr, false);
    }
}

bb_status bb_decorrelation_lag(const double* values, size_t n, double threshold,
                               size_t* out) {
    if (!out || (!values && n > 0)) return BB_ERR_USAGE;
    try {
        const bb::TimeSeries series{std::vector<double>(values, values + n), 1.0};
        *out = bb::decorrelation_lag(series, threshold);
        return BB_OK;
    } catch (...) {
        return status_from_exception(nullptr, false);
    }
}

bb_status bb_fit_metrics(const double* estimated, const double* measured, size_t n,
                         double* r_squared, double* rmsd_percent) {
    if (!r_squared || !rmsd_percent) return BB_ERR_USAGE;
    if ((!estimated || !measured) && n > 0) return BB_ERR_USAGE;
    try {
        const auto m = bb::metrics(std::vector<double>(estimated, estimated + n),
                                   std::vector<double>(measured, measured + n));
        *r_squared = m.r_squared;
        *rmsd_percent = m.rmsd_percent;
        return BB_OK;
    } catch (...) {
        return status_from_exception(nullptr, false);
    }
}

}  // extern "C"
