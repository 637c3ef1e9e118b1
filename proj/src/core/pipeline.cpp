#include "mfdfa/core.hpp"
#include "mfdfa/error.hpp"

namespace mfdfa {

namespace {

template <class Stage>
auto run_stage(const char* name, Stage&& stage) {
    try {
        return stage();
    } catch (const DegenerateSegmentError& e) {
        throw DegenerateSegmentError(e.scale(), e.segment(), std::string(name) + ": " + e.what());
    } catch (const Error& e) {
        throw Error(e.code(), std::string(name) + ": " + e.what());
    }
}

}  // namespace

MfdfaResult analyze(std::span<const double> samples, const MfdfaConfig& config) {
    MfdfaResult result;
    result.config = run_stage("config", [&] { return config.resolved(samples.size()); });
    result.profile = run_stage("profile", [&] { return compute_profile(samples); });
    result.surface = run_stage("fluctuation", [&] { return fluctuation_function(result.profile, result.config); });
    result.hurst = run_stage("scaling", [&] { return fit_hurst(result.surface, result.config.effective_fit_range()); });
    result.spectrum = run_stage("spectrum", [&] { return legendre_spectrum(result.hurst); });
    result.width = run_stage("width", [&] { return spectrum_width(result.spectrum, result.config.width_method); });
    return result;
}

MfdfaResult analyze(const Signal& signal, const MfdfaConfig& config) {
    return analyze(signal.samples(), config);
}

}  // namespace mfdfa
