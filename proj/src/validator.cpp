#include "torsilimit/validator.hpp"

#include <algorithm>
#include <cmath>

#include "torsilimit/parallel.hpp"

namespace torsilimit {

Scenario synthesize_scenario(const std::vector<SiteWaveform>& sites, double duration_s,
                             double rate_hz, const std::string& label) {
    if (sites.empty()) throw std::invalid_argument("scenario needs at least one site");
    if (!(rate_hz > 0) || !(duration_s > 0))
        throw std::invalid_argument("scenario rate and duration must be positive");

    Scenario sc;
    sc.label = label;
    sc.rate_hz = rate_hz;
    sc.duration_s = duration_s;
    std::size_t n = static_cast<std::size_t>(std::llround(duration_s * rate_hz)) + 1;

    for (const auto& site : sites) {
        if (!(site.ramp_limit_mw_per_s > 0))
            throw std::invalid_argument("ramp limit must be positive");
        for (const auto& tone : site.tones)
            if (tone.omega / (2.0 * kPi) > rate_hz / 2.0)
                throw std::invalid_argument("tone above Nyquist at bus " +
                                            std::to_string(site.bus));
        double swing = site.compute_mw - site.idle_mw;
        double ramp_t = std::abs(swing) / site.ramp_limit_mw_per_s;
        if (swing != 0.0)
            sc.last_ramp_end_s = std::max(sc.last_ramp_end_s, site.step_time_s + ramp_t);

        std::vector<double> s(n);
        for (std::size_t i = 0; i < n; ++i) {
            double t = static_cast<double>(i) / rate_hz;
            double frac;
            if (swing == 0.0) frac = 1.0;  // no step: tones always active
            else if (t <= site.step_time_s) frac = 0.0;
            else frac = std::min(1.0, (t - site.step_time_s) / ramp_t);
            double v = site.idle_mw + frac * swing;
            for (const auto& tone : site.tones)
                v += frac * tone.amplitude * std::sin(tone.omega * t + tone.phase);
            s[i] = v;
        }
        sc.buses.push_back(site.bus);
        sc.series_mw.push_back(std::move(s));
    }
    return sc;
}

ValidationReport validate_scenario(const Scenario& scenario, const IFMatrix& IF,
                                   const std::vector<MachineStudy>& machines,
                                   const ValidationOptions& opts) {
    if (scenario.series_mw.empty() || scenario.samples() < 2)
        throw std::invalid_argument("empty scenario");
    for (const auto& s : scenario.series_mw)
        if (s.size() != scenario.samples())
            throw std::invalid_argument("scenario series must share one time base");

    ValidationReport report;
    report.scenario = scenario.label;
    report.machines.resize(machines.size());
    if (opts.store_trajectories) report.trajectories.resize(machines.size());

    double t_end = scenario.duration_s;
    double steady_t0 = std::max(scenario.last_ramp_end_s + opts.transient_exclude_s,
                                t_end - opts.steady_window_s);
    if (steady_t0 >= t_end)
        throw std::invalid_argument("scenario too short for a steady-state window after ramps");

    parallel_for(machines.size(), [&](std::size_t mi) {
        const MachineStudy& ms = machines[mi];
        MachineVerdict verdict;
        verdict.generator = ms.generator;
        verdict.delta_f_max_hz = ms.delta_f_max_hz;

        // IF-weighted forcing, machine p.u.: u(t) = sum_j IF_ij dPdc_j(t) / S.
        std::vector<double> weights(scenario.buses.size());
        for (std::size_t j = 0; j < scenario.buses.size(); ++j)
            weights[j] = IF.at(ms.generator, scenario.buses[j]);
        const double rate = scenario.rate_hz;
        const double inv_mva = 1.0 / ms.shaft->mva_rating;
        auto forcing = [&, inv_mva](double t) {
            double idx = t * rate;
            std::size_t i0 = std::min(static_cast<std::size_t>(idx), scenario.samples() - 2);
            double w = idx - static_cast<double>(i0);
            double u = 0.0;
            for (std::size_t j = 0; j < scenario.buses.size(); ++j) {
                const auto& s = scenario.series_mw[j];
                double v = s[i0] + w * (s[i0 + 1] - s[i0]);
                u += weights[j] * (v - s.front());
            }
            return u * inv_mva;
        };

        SimulationResult sim;
        try {
            sim = simulate_nonlinear(*ms.shaft, *ms.model, *ms.eq, ms.E, ms.V, ms.X, forcing,
                                     opts.dt, t_end);
        } catch (const SimulationError& e) {
            throw SimulationError(std::string(e.what()) + " [scenario '" + scenario.label +
                                  "', machine " + ms.generator + "]");
        }

        GoodmanEnvelope goodman(*ms.material);
        verdict.pass = true;
        for (int r = 0; r < ms.shaft->num_sections(); ++r) {
            SectionVerdict sv;
            sv.section = ms.shaft->masses[r].label + "-" + ms.shaft->masses[r + 1].label;
            sv.allowable = goodman.allowable_amplitude(ms.eq->sigma_mean[r]);

            auto steady = sim.section_stats(r, steady_t0, t_end);
            sv.steady_amplitude = steady.sigma_a;

            double peak = 0.0;
            for (std::size_t s = 0; s < sim.time.size(); ++s)
                peak = std::max(peak, std::abs(sim.stress(r, s) - ms.eq->sigma_mean[r]));
            sv.transient_peak = peak;

            std::vector<double> series(sim.time.size());
            for (std::size_t s = 0; s < sim.time.size(); ++s) series[s] = sim.stress(r, s);
            sv.damage = miner_damage(rainflow(series), *ms.material);

            if (sv.steady_amplitude > sv.allowable || sv.transient_peak > sv.allowable ||
                sv.damage > 0.0) {
                verdict.pass = false;
                if (verdict.failure_reason.empty())
                    verdict.failure_reason = "section " + sv.section +
                                             (sv.damage > 0.0 ? " accumulates fatigue damage"
                                                              : " exceeds allowable stress");
            }
            verdict.sections.push_back(std::move(sv));
        }

        double fpeak = 0.0;
        for (double f : sim.freq_dev) fpeak = std::max(fpeak, std::abs(f));
        verdict.freq_dev_peak_hz = fpeak;
        if (fpeak > ms.delta_f_max_hz) {
            verdict.pass = false;
            if (verdict.failure_reason.empty())
                verdict.failure_reason = "frequency deviation exceeds limit";
        }

        report.machines[mi] = std::move(verdict);
        if (opts.store_trajectories) report.trajectories[mi] = std::move(sim);
    });

    report.pass = std::all_of(report.machines.begin(), report.machines.end(),
                              [](const MachineVerdict& v) { return v.pass; });
    return report;
}

}  // namespace torsilimit
