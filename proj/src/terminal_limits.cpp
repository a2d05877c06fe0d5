#include "torsilimit/terminal_limits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace torsilimit {

std::vector<double> FrequencyGrid::hz() const {
    std::vector<double> out(omega.size());
    for (std::size_t i = 0; i < omega.size(); ++i) out[i] = omega[i] / (2.0 * kPi);
    return out;
}

double FrequencyGrid::local_step_hz(std::size_t i) const {
    double lo = i > 0 ? omega[i] - omega[i - 1] : omega[1] - omega[0];
    double hi = i + 1 < omega.size() ? omega[i + 1] - omega[i] : lo;
    return std::max(lo, hi) / (2.0 * kPi);
}

FrequencyGrid build_frequency_grid(double f_sync_hz, const GridOptions& opts,
                                   const std::vector<double>& resonance_centers_rad) {
    if (!(opts.step_hz > 0) || !(opts.refine_step_hz > 0))
        throw std::invalid_argument("grid steps must be positive");
    std::set<double> hz;
    for (double f = opts.step_hz; f < f_sync_hz - 1e-9; f += opts.step_hz) hz.insert(f);
    for (double wc : resonance_centers_rad) {
        double fc = wc / (2.0 * kPi);
        if (fc <= 0 || fc >= f_sync_hz) continue;
        double lo = std::max(opts.refine_step_hz, fc - opts.refine_span_hz);
        double hi = std::min(f_sync_hz - opts.refine_step_hz, fc + opts.refine_span_hz);
        // Anchor the fine window on the resonance itself so the notch bottom
        // is a grid point.
        for (double f = fc; f >= lo; f -= opts.refine_step_hz) hz.insert(f);
        for (double f = fc; f <= hi; f += opts.refine_step_hz) hz.insert(f);
    }
    FrequencyGrid grid;
    grid.f_sync_hz = f_sync_hz;
    grid.omega.reserve(hz.size());
    double last = -1.0;
    for (double f : hz) {
        if (f - last < 1e-9) continue;  // merge near-duplicates
        grid.omega.push_back(2.0 * kPi * f);
        last = f;
    }
    if (grid.omega.empty()) throw std::invalid_argument("empty frequency grid");
    return grid;
}

std::vector<std::vector<double>> torsional_limit_curve(
    const std::vector<FreqResponseSample>& samples, const std::vector<double>& allowables) {
    std::vector<std::vector<double>> limits(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (s.stress_gain.size() != allowables.size())
            throw std::invalid_argument("allowables do not match section count");
        limits[i].resize(allowables.size());
        for (std::size_t r = 0; r < allowables.size(); ++r) {
            double g = s.stress_gain[r];
            if (std::isinf(g)) limits[i][r] = 0.0;
            else if (g <= 0) limits[i][r] = std::numeric_limits<double>::infinity();
            else limits[i][r] = allowables[r] / g;
        }
    }
    return limits;
}

std::vector<double> vibration_limit_curve(const std::vector<FreqResponseSample>& samples,
                                          double delta_f_max_hz) {
    if (!(delta_f_max_hz > 0)) throw std::invalid_argument("delta_f_max must be positive");
    std::vector<double> limits(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double g = samples[i].freq_gain;
        if (std::isinf(g)) limits[i] = 0.0;
        else if (g <= 0) limits[i] = std::numeric_limits<double>::infinity();
        else limits[i] = delta_f_max_hz / g;
    }
    return limits;
}

double multi_frequency_bound(const LimitProfile& profile) {
    if (profile.P_max_curve.empty()) throw std::invalid_argument("empty limit curve");
    return *std::min_element(profile.P_max_curve.begin(), profile.P_max_curve.end());
}

LimitProfile build_limit_profile(const std::string& generator_id, const ShaftAssembly& shaft,
                                 const MaterialSpec& material, const LinearShaftModel& model,
                                 const ShaftEquilibrium& eq, const LimitOptions& opts) {
    LimitProfile p;
    p.generator = generator_id;
    p.mva = shaft.mva_rating;
    p.cap_fraction = opts.cap_fraction;
    p.cap_mw = opts.cap_fraction * shaft.mva_rating;
    p.delta_f_max_hz = opts.delta_f_max_hz;

    GoodmanEnvelope goodman(material);
    p.allowable_amplitude.resize(shaft.num_sections());
    for (int r = 0; r < shaft.num_sections(); ++r)
        p.allowable_amplitude[r] = goodman.allowable_amplitude(eq.sigma_mean[r]);

    p.grid = build_frequency_grid(shaft.sync_freq_hz(), opts.grid, undamped_model_modes(model));
    auto samples = freq_response(model, p.grid.omega);

    auto tor = torsional_limit_curve(samples, p.allowable_amplitude);
    auto vib = vibration_limit_curve(samples, opts.delta_f_max_hz);

    std::size_t m = p.grid.omega.size();
    p.P_tor_sections.resize(m);
    p.P_tor_max.resize(m);
    p.P_vib_max.resize(m);
    p.P_max_curve.resize(m);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
        p.P_tor_sections[i].resize(shaft.num_sections());
        double tor_min = std::numeric_limits<double>::infinity();
        for (int r = 0; r < shaft.num_sections(); ++r) {
            p.P_tor_sections[i][r] = tor[i][r] * shaft.mva_rating;
            tor_min = std::min(tor_min, tor[i][r]);
        }
        p.P_tor_max[i] = tor_min * shaft.mva_rating;
        p.P_vib_max[i] = vib[i] * shaft.mva_rating;
        p.P_max_curve[i] = std::min({p.P_tor_max[i], p.P_vib_max[i], p.cap_mw});
        if (p.P_max_curve[i] < best) {
            best = p.P_max_curve[i];
            p.binding_omega = p.grid.omega[i];
        }
    }
    p.P_e_max = best;
    return p;
}

}  // namespace torsilimit
