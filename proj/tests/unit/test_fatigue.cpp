#include <doctest.h>

#include <cmath>
#include <random>

#include "torsilimit/fatigue.hpp"

using namespace torsilimit;

namespace {

MaterialSpec test_material() {
    MaterialSpec m;
    m.endurance_Se = 200.0;
    m.ultimate_Sut = 600.0;
    m.yield_Sy = 500.0;
    m.sn_points = {{1e3, 450.0}, {1e4, 340.0}, {1e5, 260.0}, {1e6, 200.0}};
    m.units = "MPa";
    return m;
}

/// Independent accounting oracle: counted range content must equal the total
/// variation of the reversal-reduced series (every traversal belongs to
/// exactly one counted cycle).
double total_variation(const std::vector<double>& series) {
    auto rev = peak_valley(series);
    double tv = 0.0;
    for (std::size_t i = 0; i + 1 < rev.size(); ++i) tv += std::abs(rev[i + 1] - rev[i]);
    return tv;
}

}  // namespace

TEST_SUITE("fatigue") {

TEST_CASE("Goodman envelope") {
    GoodmanEnvelope env(test_material());
    CHECK(env.allowable_amplitude(0.0) == doctest::Approx(200.0));
    // Midpoint of the Goodman line (yield not binding: 500 - 300 = 200 > 100).
    CHECK(env.allowable_amplitude(300.0) == doctest::Approx(100.0));
    // Compressive side is flat at Se until the yield triangle binds.
    CHECK(env.allowable_amplitude(-250.0) == doctest::Approx(200.0));
    CHECK(env.allowable_amplitude(-450.0) == doctest::Approx(50.0));
    // Tensile yield binding: at mean 450, yield leaves 50 < Goodman's 50?
    CHECK(env.allowable_amplitude(450.0) ==
          doctest::Approx(std::min(200.0 * (1 - 450.0 / 600.0), 50.0)));
    CHECK_THROWS_AS(env.allowable_amplitude(500.0), std::domain_error);
    CHECK_THROWS_AS(env.allowable_amplitude(-520.0), std::domain_error);
}

TEST_CASE("Goodman line reaches zero at Sut when yield coincides") {
    MaterialSpec m = test_material();
    m.yield_Sy = m.ultimate_Sut;  // hypothetical: fatigue line governs to the end
    GoodmanEnvelope env(m);
    CHECK(env.allowable_amplitude(m.ultimate_Sut * (1 - 1e-12)) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("allowable amplitude is nonincreasing in tensile mean stress") {
    GoodmanEnvelope env(test_material());
    double prev = env.allowable_amplitude(0.0);
    for (double sm = 10; sm < 500; sm += 10) {
        double a = env.allowable_amplitude(sm);
        CHECK(a <= prev + 1e-12);
        prev = a;
    }
}

TEST_CASE("rainflow reproduces the ASTM nine-point example") {
    std::vector<double> series{-2, 1, -3, 5, -1, 3, -4, 4, -2};
    CycleSet cycles = rainflow(series);

    std::vector<double> halves, fulls;
    for (const auto& c : cycles)
        (c.count == 0.5 ? halves : fulls).push_back(c.range);
    REQUIRE(fulls.size() == 1);
    CHECK(fulls[0] == doctest::Approx(4.0));  // the -1/3 pair
    std::vector<double> expect{3, 4, 8, 9, 8, 6};
    std::sort(halves.begin(), halves.end());
    std::sort(expect.begin(), expect.end());
    REQUIRE(halves.size() == expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i)
        CHECK(halves[i] == doctest::Approx(expect[i]));

    // The full cycle closes between -1 and 3: mean 1.
    for (const auto& c : cycles)
        if (c.count == 1.0) CHECK(c.mean == doctest::Approx(1.0));
}

TEST_CASE("rainflow edge cases") {
    SUBCASE("monotone ramp is a single half cycle") {
        CycleSet c = rainflow({0, 1, 2, 3});
        REQUIRE(c.size() == 1);
        CHECK(c[0].count == 0.5);
        CHECK(c[0].range == doctest::Approx(3.0));
    }
    SUBCASE("constant series counts nothing") {
        CHECK(rainflow({5, 5, 5}).empty());
    }
    SUBCASE("two samples minimum") {
        CHECK_THROWS_AS(rainflow({1.0}), std::invalid_argument);
    }
}

TEST_CASE("rainflow on a pure sinusoid") {
    // The three-point rules close every interior swing as a half cycle, so n
    // periods carry n - 1/2 cycle equivalents of the full range plus two
    // boundary halves of one amplitude.
    const double A = 3.0, offset = 10.0;
    const int periods = 8, per = 64;
    std::vector<double> s;
    for (int i = 0; i <= periods * per; ++i)
        s.push_back(offset + A * std::sin(2 * kPi * i / per));
    CycleSet cycles = rainflow(s);

    double full_range_content = 0.0;
    int boundary = 0;
    for (const auto& c : cycles) {
        if (c.range > 1.5 * A) {
            CHECK(c.range == doctest::Approx(2 * A).epsilon(1e-2));
            CHECK(c.mean == doctest::Approx(offset).epsilon(1e-2));
            full_range_content += c.count;
        } else {
            ++boundary;
        }
    }
    CHECK(full_range_content == doctest::Approx(periods - 0.5));
    CHECK(boundary == 2);
}

TEST_CASE("rainflow accounting properties on random series") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> dist(-10.0, 10.0);
    std::uniform_int_distribution<int> len(2, 60);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> s(len(rng));
        for (auto& v : s) v = dist(rng);

        auto rev = peak_valley(s);
        CycleSet cycles = rainflow(s);

        double tv = total_variation(s);
        double counted = 0.0, half_units = 0.0;
        for (const auto& c : cycles) {
            counted += 2.0 * c.count * c.range;
            half_units += 2.0 * c.count;
        }
        CHECK(counted == doctest::Approx(tv).epsilon(1e-12));
        if (!rev.empty()) CHECK(half_units == doctest::Approx(double(rev.size() - 1)));
    }
}

TEST_CASE("S-N lookup and Miner damage") {
    MaterialSpec m = test_material();

    SUBCASE("exact table point") {
        CycleSet one{{2 * 340.0, 0.0, 1.0}};  // amplitude 340 at N = 1e4
        CHECK(miner_damage(one, m) == doctest::Approx(1e-4).epsilon(1e-9));
    }
    SUBCASE("geometric mean amplitude gives geometric mean life") {
        double amp = std::sqrt(340.0 * 260.0);
        CHECK(sn_cycles_to_failure(amp, m) == doctest::Approx(std::sqrt(1e4 * 1e5)).epsilon(1e-9));
    }
    SUBCASE("below endurance contributes nothing") {
        CycleSet cs{{2 * 150.0, 0.0, 1.0}, {2 * 199.0, -50.0, 0.5}};
        CHECK(miner_damage(cs, m) == 0.0);
    }
    SUBCASE("at or above Sut is immediate failure") {
        CycleSet cs{{2 * 650.0, 0.0, 1.0}};
        CHECK(miner_damage(cs, m) == doctest::Approx(1.0));
    }
    SUBCASE("above the first S-N point clamps to one cycle") {
        CHECK(sn_cycles_to_failure(460.0, m) == doctest::Approx(1.0));
    }
    SUBCASE("Goodman mean correction") {
        // amplitude 170 at mean 300: corrected = 170 / (1 - 0.5) = 340 -> N = 1e4.
        CycleSet cs{{2 * 170.0, 300.0, 1.0}};
        CHECK(miner_damage(cs, m) == doctest::Approx(1e-4).epsilon(1e-9));
        // Compressive mean gets no correction.
        CycleSet neg{{2 * 170.0, -300.0, 1.0}};
        CHECK(miner_damage(neg, m) == 0.0);  // 170 < Se
    }
}

TEST_CASE("Miner damage is additive and monotone") {
    MaterialSpec m = test_material();
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> amp(100.0, 500.0);
    for (int trial = 0; trial < 50; ++trial) {
        CycleSet a, b;
        for (int i = 0; i < 5; ++i) {
            a.push_back({2 * amp(rng), 0.0, 1.0});
            b.push_back({2 * amp(rng), 50.0, 0.5});
        }
        CycleSet both = a;
        both.insert(both.end(), b.begin(), b.end());
        CHECK(miner_damage(both, m) ==
              doctest::Approx(miner_damage(a, m) + miner_damage(b, m)).epsilon(1e-12));

        CycleSet scaled = a;
        for (auto& c : scaled) c.range *= 1.1;
        CHECK(miner_damage(scaled, m) >= miner_damage(a, m));
    }
}

TEST_CASE("compliant sinusoid accumulates zero damage for any duration") {
    MaterialSpec m = test_material();
    GoodmanEnvelope env(m);
    double sm = 150.0;
    double sa = env.allowable_amplitude(sm);
    for (int periods : {3, 50}) {
        std::vector<double> s;
        for (int i = 0; i <= periods * 40; ++i)
            s.push_back(sm + sa * std::sin(2 * kPi * i / 40.0));
        CHECK(miner_damage(rainflow(s), m) == 0.0);
    }
}

}  // TEST_SUITE
