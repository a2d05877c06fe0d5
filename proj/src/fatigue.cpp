#include "torsilimit/fatigue.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace torsilimit {

GoodmanEnvelope::GoodmanEnvelope(const MaterialSpec& material) : material_(material) {
    material_.validate();
}

double GoodmanEnvelope::allowable_amplitude(double sigma_m) const {
    const double se = material_.endurance_Se;
    const double sut = material_.ultimate_Sut;
    const double sy = material_.yield_Sy;
    if (std::abs(sigma_m) >= sy)
        throw std::domain_error("mean stress exceeds yield strength; static failure");
    double fatigue = sigma_m >= 0 ? se * (1.0 - sigma_m / sut) : se;
    double yield = sy - std::abs(sigma_m);
    return std::max(0.0, std::min(fatigue, yield));
}

std::vector<double> peak_valley(const std::vector<double>& series) {
    std::vector<double> rev;
    for (double x : series) {
        if (!rev.empty() && x == rev.back()) continue;
        while (rev.size() >= 2) {
            double a = rev[rev.size() - 2], b = rev.back();
            bool keeps_turning = (b > a && x > b) || (b < a && x < b);
            if (keeps_turning) rev.pop_back();  // monotone run, b is not a reversal
            else break;
        }
        rev.push_back(x);
    }
    if (rev.size() == 1) rev.clear();  // constant input: no reversals at all
    return rev;
}

CycleSet rainflow(const std::vector<double>& series) {
    if (series.size() < 2)
        throw std::invalid_argument("rainflow needs at least two samples");

    std::vector<double> rev = peak_valley(series);
    CycleSet out;
    if (rev.size() < 2) return out;

    // ASTM E1049 5.4.4: examine the two most recent ranges X (latest) and Y;
    // when X >= Y, Y closes a full cycle unless it touches the starting point,
    // in which case it is a half cycle and the start advances.
    std::deque<double> pts;
    std::size_t feed = 0;
    bool at_start = true;  // pts.front() is the current starting point S

    auto emit = [&out](double a, double b, double count) {
        out.push_back({std::abs(a - b), 0.5 * (a + b), count});
    };

    while (true) {
        if (pts.size() < 3) {
            if (feed >= rev.size()) break;
            pts.push_back(rev[feed++]);
            continue;
        }
        std::size_t n = pts.size();
        double y = std::abs(pts[n - 2] - pts[n - 3]);
        double x = std::abs(pts[n - 1] - pts[n - 2]);
        if (x < y) {
            if (feed >= rev.size()) break;
            pts.push_back(rev[feed++]);
            continue;
        }
        if (at_start && n == 3) {
            emit(pts[0], pts[1], 0.5);
            pts.pop_front();
        } else {
            emit(pts[n - 3], pts[n - 2], 1.0);
            pts.erase(pts.end() - 3, pts.end() - 1);
        }
    }

    // Residue: each remaining range is a half cycle.
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) emit(pts[i], pts[i + 1], 0.5);
    return out;
}

double sn_cycles_to_failure(double amplitude, const MaterialSpec& m) {
    const auto& pts = m.sn_points;
    if (amplitude >= pts.front().second) return 1.0;  // beyond the curve: one cycle kills
    // Find the segment, extrapolating the last one below its amplitude.
    std::size_t hi = pts.size() - 1;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (amplitude >= pts[i].second) {
            hi = i;
            break;
        }
    }
    double ln1 = std::log(pts[hi - 1].first), ls1 = std::log(pts[hi - 1].second);
    double ln2 = std::log(pts[hi].first), ls2 = std::log(pts[hi].second);
    double t = (std::log(amplitude) - ls1) / (ls2 - ls1);
    return std::exp(ln1 + t * (ln2 - ln1));
}

double miner_damage(const CycleSet& cycles, const MaterialSpec& material) {
    material.validate();
    double damage = 0.0;
    for (const auto& c : cycles) {
        double amp = 0.5 * c.range;
        if (amp <= 0) continue;
        double corrected = amp;
        if (c.mean > 0) {
            double denom = 1.0 - c.mean / material.ultimate_Sut;
            if (denom <= 0) {
                damage += c.count;  // mean at or past Sut: immediate failure
                continue;
            }
            corrected = amp / denom;
        }
        if (corrected <= material.endurance_Se) continue;
        if (corrected >= material.ultimate_Sut) {
            damage += c.count;  // N = 1 sentinel
            continue;
        }
        damage += c.count / sn_cycles_to_failure(corrected, material);
    }
    return damage;
}

}  // namespace torsilimit
