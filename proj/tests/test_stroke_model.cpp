#include "support.hpp"

#include <gtest/gtest.h>

using namespace strokeflow;

TEST(Anchor, IsFirstControlPoint) {
    EXPECT_EQ(anchor(Stroke::line(0, {0, 0}, {10, 0})), (Point{0, 0}));
    EXPECT_EQ(anchor(Stroke::cubic(0, {1, 2}, {3, 4}, {5, 6}, {7, 8})), (Point{1, 2}));
    EXPECT_EQ(anchor(Stroke::circular_arc(0, {5, 0}, {0, 5}, {-5, 0})), (Point{5, 0}));
}

TEST(Arity, MatchesKind) {
    EXPECT_EQ(arity(StrokeKind::Line), 2u);
    EXPECT_EQ(arity(StrokeKind::QuadraticBezier), 3u);
    EXPECT_EQ(arity(StrokeKind::CubicBezier), 4u);
    EXPECT_EQ(arity(StrokeKind::CircularArc), 3u);
    EXPECT_EQ(arity(StrokeKind::EllipticalArc), 3u);
}

TEST(Flatten, LineIsItsOwnPolyline) {
    auto poly = flatten(Stroke::line(0, {0, 0}, {10, 0}), 0.5);
    ASSERT_EQ(poly.size(), 2u);
    EXPECT_EQ(poly[0], (Point{0, 0}));
    EXPECT_EQ(poly[1], (Point{10, 0}));
}

TEST(Flatten, QuadraticPassesNearMidpoint) {
    auto poly = flatten(Stroke::quadratic(0, {0, 0}, {5, 10}, {10, 0}), 0.1);
    EXPECT_LE(point_polyline_distance({5, 5}, poly), 0.1);
}

TEST(Flatten, CircularArcVerticesOnCircle) {
    Point c = sftest::bisector_center({5, 0}, {0, 5}, {-5, 0});
    EXPECT_NEAR(c.x, 0.0, 1e-12);
    EXPECT_NEAR(c.y, 0.0, 1e-12);
    auto poly = flatten(Stroke::circular_arc(0, {5, 0}, {0, 5}, {-5, 0}), 0.01);
    EXPECT_GT(poly.size(), 3u);
    for (Point p : poly) EXPECT_NEAR(distance(p, c), 5.0, 0.01);
}

TEST(Flatten, EndpointsAreExactForEveryKind) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 300; ++i) {
        Stroke s = sftest::random_stroke(rng, i, 100, 80);
        auto poly = flatten(s, 0.2);
        EXPECT_EQ(poly.front(), s.start_point());
        EXPECT_EQ(poly.back(), s.end_point());
    }
}

TEST(Flatten, StaysWithinToleranceOfDenseSamples) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        Stroke s = sftest::random_stroke(rng, i, 100, 80);
        const double tol = 0.25;
        auto poly = flatten(s, tol);
        for (Point p : sftest::sample(s, 400)) EXPECT_LE(point_polyline_distance(p, poly), tol + 1e-9);
    }
}

TEST(Flatten, RejectsNonPositiveTolerance) {
    EXPECT_THROW(flatten(Stroke::line(0, {0, 0}, {1, 1}), 0.0), Error);
}

TEST(CircularArc, CollinearPointsBecomeLine) {
    Stroke s = Stroke::circular_arc(3, {0, 0}, {5, 0}, {10, 0});
    EXPECT_EQ(s.kind(), StrokeKind::Line);
    EXPECT_EQ(s.points().size(), 2u);
}

TEST(CircularArc, MiddlePointCanonicalizedOnSameArc) {
    Stroke s = Stroke::circular_arc(0, {5, 0}, {3, 4}, {-5, 0});
    Point mid = s.points()[1];
    EXPECT_NEAR(mid.x, 0.0, 1e-12);
    EXPECT_NEAR(mid.y, 5.0, 1e-12);
    // Canonicalizing again is a fixed point.
    Stroke t = Stroke::circular_arc(0, s.points()[0], s.points()[1], s.points()[2]);
    EXPECT_EQ(s, t);
}

TEST(CircularArc, RandomCentersAgreeWithBisectorOracle) {
    std::mt19937_64 rng(3);
    int checked = 0;
    for (int i = 0; i < 500; ++i) {
        Point a = sftest::random_point(rng, 100, 100), b = sftest::random_point(rng, 100, 100),
              c = sftest::random_point(rng, 100, 100);
        auto ours = circle_center(a, b, c);
        if (!ours) continue;
        Point oracle = sftest::bisector_center(a, b, c);
        double r = distance(oracle, a);
        if (r > 1e4) continue; // nearly collinear: both routes lose precision
        EXPECT_NEAR(ours->x, oracle.x, 1e-7 * std::max(1.0, r));
        EXPECT_NEAR(ours->y, oracle.y, 1e-7 * std::max(1.0, r));
        ++checked;
    }
    EXPECT_GT(checked, 400);
}

TEST(EllipticalArc, EqualRadiiBecomeCircular) {
    Stroke s = Stroke::elliptical_arc(0, {0, 0}, {10, 0}, {5, 5, 0, false, true});
    EXPECT_EQ(s.kind(), StrokeKind::CircularArc);
    auto g = s.arc_geometry();
    EXPECT_NEAR(g.center.x, 5.0, 1e-12);
    EXPECT_NEAR(g.center.y, 0.0, 1e-12);
}

TEST(EllipticalArc, ZeroRadiusBecomesLine) {
    EXPECT_EQ(Stroke::elliptical_arc(0, {0, 0}, {10, 0}, {0, 5, 0, false, true}).kind(), StrokeKind::Line);
}

TEST(EllipticalArc, SmallRadiiAreScaledUp) {
    Stroke s = Stroke::elliptical_arc(0, {0, 0}, {10, 0}, {2, 1, 0, false, true});
    ASSERT_EQ(s.kind(), StrokeKind::EllipticalArc);
    EXPECT_NEAR(s.arc_params().rx / s.arc_params().ry, 2.0, 1e-12);
    EXPECT_EQ(s.evaluate(0.0), (Point{0, 0}));
    EXPECT_EQ(s.evaluate(1.0), (Point{10, 0}));
    Point e = s.arc_geometry().at_fraction(1.0);
    EXPECT_NEAR(e.x, 10.0, 1e-9);
    EXPECT_NEAR(e.y, 0.0, 1e-9);
}

TEST(EllipticalArc, GeometryEndpointsMatchControlPoints) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 300; ++i) {
        Point a = sftest::random_point(rng, 100, 100), b = sftest::random_point(rng, 100, 100);
        std::uniform_real_distribution<double> ur(1, 80), ua(0, 360);
        ArcParams p{ur(rng), ur(rng), ua(rng), bool(rng() & 1), bool(rng() & 1)};
        Stroke s = Stroke::elliptical_arc(0, a, b, p);
        if (s.kind() == StrokeKind::Line) continue;
        auto g = s.arc_geometry();
        EXPECT_LT(distance(g.at_fraction(0), a), 1e-7);
        EXPECT_LT(distance(g.at_fraction(1), b), 1e-7);
        // Radius correction near a half turn is sqrt-sensitive, so the
        // re-derived midpoint may move by a few micro-units.
        EXPECT_LT(distance(g.at_fraction(0.5), s.points()[1]), 1e-5 * std::max(1.0, g.rx));
    }
}

TEST(Stroke, RejectsNonFiniteAndBadWidth) {
    double nan = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(Stroke::line(0, {nan, 0}, {1, 1}), Error);
    StrokeStyle st;
    st.width = 0.0;
    EXPECT_THROW(Stroke::line(0, {0, 0}, {1, 1}, st), Error);
}

TEST(Stroke, FromPointsValidatesArity) {
    EXPECT_THROW(Stroke::from_points(0, StrokeKind::CubicBezier, {{0, 0}, {1, 1}}), Error);
    EXPECT_THROW(Stroke::from_points(0, StrokeKind::EllipticalArc, {{0, 0}, {1, 1}, {2, 0}}), Error);
    EXPECT_EQ(Stroke::from_points(0, StrokeKind::QuadraticBezier, {{0, 0}, {1, 1}, {2, 0}}).kind(),
              StrokeKind::QuadraticBezier);
}

TEST(StrokeSet, ValidateRejectsDuplicateIds) {
    StrokeSet set{{Stroke::line(1, {0, 0}, {1, 1}), Stroke::line(1, {2, 2}, {3, 3})}, 10, 10};
    try {
        set.validate();
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvariantViolation);
        EXPECT_TRUE(e.is_internal());
    }
}

TEST(StrokeSet, BoundsAllowTenPercentMargin) {
    StrokeSet set{{Stroke::line(0, {-5, 0}, {105, 50})}, 100, 100};
    EXPECT_TRUE(set.within_bounds());
    set.strokes.push_back(Stroke::line(1, {0, 0}, {0, 111}));
    EXPECT_FALSE(set.within_bounds());
}

TEST(Color, GrayAndHex) {
    EXPECT_TRUE((Color{7, 7, 7}).is_gray());
    EXPECT_FALSE((Color{7, 8, 7}).is_gray());
    EXPECT_EQ((Color{255, 0, 16}).hex(), "#FF0010");
    EXPECT_EQ((Color{255, 0, 0}).to_gray(), (Color{76, 76, 76}));
    EXPECT_EQ(Color::from_packed((Color{1, 2, 3}).packed()), (Color{1, 2, 3}));
}

TEST(Errors, MessageCarriesCodeName) {
    try {
        fail(ErrorCode::NegativeDistance, "x");
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("NegativeDistance"), std::string::npos);
        EXPECT_FALSE(e.is_internal());
    }
}
