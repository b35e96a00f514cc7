#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "wiggle/filters.hpp"
#include "wiggle/units.hpp"

using namespace wiggle;

namespace {

// Steady-state amplitude of the filter driven by a unit sinusoid at f_hz,
// estimated by least-squares projection onto sin/cos after settling.
double measured_gain(FirstOrderFilter f, double f_hz, double fs_hz, double seconds = 120.0) {
    const double dt = 1.0 / fs_hz;
    const int n = int(seconds * fs_hz);
    const int settle = n / 4;
    double ss = 0, sc = 0, cc = 0, ys = 0, yc = 0;
    for (int i = 0; i < n; ++i) {
        const double t = (i + 1) * dt;
        const double x = std::sin(kTwoPi * f_hz * t);
        const double y = f.step(x, dt);
        if (i < settle) continue;
        const double s = std::sin(kTwoPi * f_hz * t);
        const double c = std::cos(kTwoPi * f_hz * t);
        ss += s * s;
        sc += s * c;
        cc += c * c;
        ys += y * s;
        yc += y * c;
    }
    const double det = ss * cc - sc * sc;
    const double a = (ys * cc - yc * sc) / det;
    const double b = (yc * ss - ys * sc) / det;
    return std::hypot(a, b);
}

}  // namespace

TEST(Filters, RejectsNonPositiveDt) {
    FirstOrderFilter f(FilterKind::LowPass, 1.0);
    EXPECT_THROW(f.step(1.0, 0.0), std::invalid_argument);
    EXPECT_THROW(f.step(1.0, -0.1), std::invalid_argument);
}

TEST(Filters, RejectsBadCutoff) {
    EXPECT_THROW(FirstOrderFilter(FilterKind::LowPass, 0.0), std::invalid_argument);
    EXPECT_THROW(FirstOrderFilter(FilterKind::HighPass, -1.0), std::invalid_argument);
}

TEST(Filters, HighPassRejectsDc) {
    FirstOrderFilter f(FilterKind::HighPass, 0.7);
    const double c = 3.7;
    double y = 0.0;
    for (int i = 0; i < 200; ++i) y = f.step(c, 1.0 / 13.0);
    EXPECT_LT(std::abs(y), 1e-6 * std::abs(c));
}

TEST(Filters, LowPassDcUnity) {
    FirstOrderFilter f(FilterKind::LowPass, 1.59);
    const double c = -2.25;
    double y = 0.0;
    for (int i = 0; i < 200; ++i) y = f.step(c, 1.0 / 13.0);
    EXPECT_LT(std::abs(y - c), 1e-6 * std::abs(c));
}

TEST(Filters, LowPassConvergesGeometrically) {
    FirstOrderFilter f(FilterKind::LowPass, 1.59);
    const double dt = 1.0 / 13.0;
    const double a = kTwoPi * 1.59 * dt;
    const double pole = 1.0 / (1.0 + a + 0.5 * a * a);
    double prev_err = 1.0;
    f.step(1.0, dt);
    prev_err = std::abs(f.prev_output - 1.0);
    for (int i = 0; i < 20; ++i) {
        f.step(1.0, dt);
        const double err = std::abs(f.prev_output - 1.0);
        EXPECT_NEAR(err / prev_err, pole, 1e-9);
        prev_err = err;
    }
}

// Oracle: analog prototype magnitude evaluated analytically. The 0.9 Hz
// dither channel through the 0.7 Hz high-pass at the 13 Hz feedback rate
// must come out within 5%.
TEST(Filters, HighPassMagnitudeMatchesAnalogAtDitherFrequency) {
    const double analog = analog_magnitude(FilterKind::HighPass, 0.7, 0.9);
    const double digital = measured_gain(FirstOrderFilter(FilterKind::HighPass, 0.7), 0.9, 13.0);
    EXPECT_NEAR(digital / analog, 1.0, 0.05);
}

TEST(Filters, MagnitudeResponsesTrackAnalogPrototypes) {
    const std::vector<double> freqs{0.2, 0.7, 0.9, 1.59, 3.0};
    for (double f_hz : freqs) {
        const double hp_analog = analog_magnitude(FilterKind::HighPass, 0.7, f_hz);
        const double hp_digital =
            measured_gain(FirstOrderFilter(FilterKind::HighPass, 0.7), f_hz, 13.0);
        EXPECT_NEAR(hp_digital / hp_analog, 1.0, 0.05) << "high-pass at " << f_hz << " Hz";

        const double lp_analog = analog_magnitude(FilterKind::LowPass, 1.59, f_hz);
        const double lp_digital =
            measured_gain(FirstOrderFilter(FilterKind::LowPass, 1.59), f_hz, 13.0);
        EXPECT_NEAR(lp_digital / lp_analog, 1.0, 0.05) << "low-pass at " << f_hz << " Hz";
    }
}

TEST(Filters, VariableDtStaysFiniteAndConsistent) {
    FirstOrderFilter f(FilterKind::HighPass, 0.7);
    double t = 0.0;
    for (int i = 0; i < 500; ++i) {
        const double dt = (i % 2 == 0) ? 1.0 / 10.0 : 1.0 / 16.0;
        t += dt;
        const double y = f.step(std::sin(kTwoPi * 0.9 * t), dt);
        ASSERT_TRUE(std::isfinite(y));
        ASSERT_LT(std::abs(y), 2.0);
    }
}
