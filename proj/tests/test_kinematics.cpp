#include "fingait/kinematics.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace fingait;

namespace {

std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

Gait random_gait_in(const KinematicSpace& space, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto lo = space.lower.to_array();
    const auto hi = space.upper.to_array();
    std::array<double, 4> x;
    for (std::size_t i = 0; i < 4; ++i) x[i] = lo[i] + (hi[i] - lo[i]) * unit(rng);
    return Gait::from_array(x);
}

} // namespace

TEST_CASE("default space validates and tests membership per axis") {
    KinematicSpace space;
    space.validate();

    CHECK(space.contains(space.lower));
    CHECK(space.contains(space.upper));
    CHECK(space.contains({25.0, 25.0, 1.25, 0.0625}));

    CHECK_FALSE(space.contains({-0.001, 25.0, 1.25, 0.0625}));
    CHECK_FALSE(space.contains({55.001, 25.0, 1.25, 0.0625}));
    CHECK_FALSE(space.contains({25.0, -0.001, 1.25, 0.0625}));
    CHECK_FALSE(space.contains({25.0, 55.001, 1.25, 0.0625}));
    CHECK_FALSE(space.contains({25.0, 25.0, 0.749, 0.0625}));
    CHECK_FALSE(space.contains({25.0, 25.0, 2.001, 0.0625}));
    CHECK_FALSE(space.contains({25.0, 25.0, 1.25, -0.0626}));
    CHECK_FALSE(space.contains({25.0, 25.0, 1.25, 0.1251}));
}

TEST_CASE("space validation rejects inverted bounds and bad steps") {
    KinematicSpace space;
    space.lower.stroke_amplitude = 60.0;
    CHECK_THROWS_AS(space.validate(), std::invalid_argument);

    space = KinematicSpace{};
    space.step_sizes.flap_frequency = 0.0;
    CHECK_THROWS_AS(space.validate(), std::invalid_argument);

    space = KinematicSpace{};
    space.step_sizes.pitch_amplitude = -1.0;
    CHECK_THROWS_AS(space.validate(), std::invalid_argument);
}

TEST_CASE("normalize divides each axis by its step size") {
    KinematicSpace space;
    const NormalizedGait n = space.normalize({25.0, 25.0, 1.25, 0.0625});
    CHECK(n[0] == 2.5);
    CHECK(n[1] == 2.5);
    CHECK(n[2] == 5.0);
    CHECK(n[3] == 1.0);
}

TEST_CASE("denormalize inverts normalize") {
    KinematicSpace space;
    auto rng = make_rng(11);
    for (int i = 0; i < 200; ++i) {
        const Gait g = random_gait_in(space, rng);
        const Gait back = space.denormalize(space.normalize(g));
        CHECK(back.stroke_amplitude == doctest::Approx(g.stroke_amplitude).epsilon(1e-12));
        CHECK(back.pitch_amplitude == doctest::Approx(g.pitch_amplitude).epsilon(1e-12));
        CHECK(back.flap_frequency == doctest::Approx(g.flap_frequency).epsilon(1e-12));
        CHECK(back.stroke_pitch_offset == doctest::Approx(g.stroke_pitch_offset).epsilon(1e-12));
    }
}

TEST_CASE("mirror extension widens every axis except frequency") {
    KinematicSpace space;
    const KinematicSpace ext = space.mirror_extended();

    CHECK(ext.lower.stroke_amplitude == -55.0);
    CHECK(ext.upper.stroke_amplitude == 55.0);
    CHECK(ext.lower.pitch_amplitude == -55.0);
    CHECK(ext.upper.pitch_amplitude == 55.0);
    CHECK(ext.lower.flap_frequency == 0.75);
    CHECK(ext.upper.flap_frequency == 2.0);
    CHECK(ext.lower.stroke_pitch_offset == -0.125);
    CHECK(ext.upper.stroke_pitch_offset == 0.125);

    // steps carry over so normalized coordinates mean the same thing
    CHECK(ext.step_sizes.stroke_amplitude == space.step_sizes.stroke_amplitude);
    CHECK(ext.step_sizes.stroke_pitch_offset == space.step_sizes.stroke_pitch_offset);

    auto rng = make_rng(12);
    for (int i = 0; i < 500; ++i) {
        const Gait g = random_gait_in(space, rng);
        const Gait m{-g.stroke_amplitude, -g.pitch_amplitude, g.flap_frequency,
                     -g.stroke_pitch_offset};
        CHECK(ext.contains(g));
        CHECK(ext.contains(m));
    }
}

TEST_CASE("attainability envelope shrinks with frequency") {
    // at 1 Hz the servo can carry 67 deg of stroke and 49 deg of pitch
    CHECK(is_attainable({67.0, 0.0, 1.0, 0.0}));
    CHECK_FALSE(is_attainable({67.01, 0.0, 1.0, 0.0}));
    CHECK(is_attainable({0.0, 49.0, 1.0, 0.0}));
    CHECK_FALSE(is_attainable({0.0, 49.01, 1.0, 0.0}));

    // at 2 Hz only 37 / 23 remain
    CHECK(is_attainable({37.0, 23.0, 2.0, 0.0}));
    CHECK_FALSE(is_attainable({37.1, 23.0, 2.0, 0.0}));
    CHECK_FALSE(is_attainable({37.0, 23.1, 2.0, 0.0}));

    // amplitude enters by magnitude, so mirrored gaits agree
    auto rng = make_rng(13);
    std::uniform_real_distribution<double> amp(-70.0, 70.0);
    std::uniform_real_distribution<double> freq(0.75, 2.0);
    for (int i = 0; i < 500; ++i) {
        const Gait g{amp(rng), amp(rng), freq(rng), 0.0};
        const Gait m{-g.stroke_amplitude, -g.pitch_amplitude, g.flap_frequency, 0.0};
        CHECK(is_attainable(g) == is_attainable(m));
    }
}

TEST_CASE("time history sampling honors the requested resolution") {
    MotorLimits motor;
    const TimeHistory th = generate_time_history({30.0, 30.0, 1.0, 0.0}, motor, 50);
    CHECK(th.samples_per_cycle() == 50);

    const TimeHistory th2 = generate_time_history({30.0, 30.0, 1.0, 0.0}, motor, 64);
    CHECK(th2.samples_per_cycle() == 64);
}

TEST_CASE("zero amplitude gait produces a motionless history") {
    const TimeHistory th = generate_time_history({0.0, 0.0, 1.0, 0.0}, MotorLimits{}, 50);
    for (const auto& pt : th.points) {
        CHECK(pt.stroke_angle == 0.0);
        CHECK(pt.pitch_angle == 0.0);
    }
}

TEST_CASE("realized angles never exceed the commanded amplitudes") {
    MotorLimits motor;
    auto rng = make_rng(14);
    KinematicSpace space;
    for (int i = 0; i < 20; ++i) {
        const Gait g = random_gait_in(space, rng);
        const TimeHistory th = generate_time_history(g, motor, 50);
        for (const auto& pt : th.points) {
            CHECK(std::abs(pt.stroke_angle) <= std::abs(g.stroke_amplitude) + 1e-9);
            CHECK(std::abs(pt.pitch_angle) <= std::abs(g.pitch_amplitude) + 1e-9);
        }
    }
}

TEST_CASE("default servo tracks a slow gait close to full amplitude") {
    const Gait g{30.0, 30.0, 1.0, 0.0};
    const TimeHistory th = generate_time_history(g, MotorLimits{}, 100);

    double stroke_max = 0.0, pitch_max = 0.0, pitch_min = 0.0;
    for (const auto& pt : th.points) {
        stroke_max = std::max(stroke_max, pt.stroke_angle);
        pitch_max = std::max(pitch_max, pt.pitch_angle);
        pitch_min = std::min(pitch_min, pt.pitch_angle);
    }
    CHECK(stroke_max >= 0.8 * 30.0);
    CHECK(pitch_max >= 0.9 * 30.0);
    CHECK(pitch_min <= -0.9 * 30.0);
}

TEST_CASE("time history generation is deterministic") {
    const Gait g{40.0, 20.0, 1.5, 0.0625};
    const TimeHistory a = generate_time_history(g, MotorLimits{}, 50);
    const TimeHistory b = generate_time_history(g, MotorLimits{}, 50);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].stroke_angle == b.points[i].stroke_angle);
        CHECK(a.points[i].pitch_angle == b.points[i].pitch_angle);
    }
}

TEST_CASE("time history rejects unusable inputs") {
    CHECK_THROWS_AS(generate_time_history({30.0, 30.0, 0.0, 0.0}, MotorLimits{}, 50),
                    std::invalid_argument);
    CHECK_THROWS_AS(generate_time_history({30.0, 30.0, 1.0, 0.0}, MotorLimits{}, 8),
                    std::invalid_argument);
    CHECK_THROWS_AS(generate_time_history({30.0, 30.0, 1.0, 0.0}, {0.0, 4000.0}, 50),
                    std::invalid_argument);
    CHECK_THROWS_AS(generate_time_history({30.0, 30.0, 1.0, 0.0}, {400.0, 0.0}, 50),
                    std::invalid_argument);
}
