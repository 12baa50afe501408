#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "graspmaps/errors.hpp"
#include "graspmaps/mapbuild.hpp"
#include "oracles.hpp"

using namespace graspmaps;

namespace {

BuilderConfig small_config(int bins = 3, int size = 64) {
    BuilderConfig cfg;
    cfg.bins = bins;
    cfg.out_width = size;
    cfg.out_height = size;
    return cfg;
}

std::size_t idx(const GraspMapStack& s, int x, int y) { return static_cast<std::size_t>(y) * s.width() + x; }

double decoded(const GraspMapStack& s, int bin, std::size_t i) { return decode_angle(s.cos2phi(bin)[i], s.sin2phi(bin)[i]); }

bool plane_nonzero(std::span<const float> p) {
    return std::any_of(p.begin(), p.end(), [](float v) { return v != 0.0f; });
}

AnnotationSet random_scene(std::uint64_t seed, int size = 96) {
    SynthParams p;
    p.seed = seed;
    p.num_rects = 3 + static_cast<int>(seed % 10);
    p.image_width = p.image_height = size;
    p.center_min = 0;
    p.center_max = size;
    p.width_min = 4;
    p.width_max = 40;
    p.height_min = 2;
    p.height_max = 20;
    p.duplicate_center_fraction = 0.4;
    return synth_scene(p);
}

// Checks every structural invariant of a stack built from ground truth.
void check_invariants(const GraspMapStack& s, const AnnotationSet& scene, const BuilderConfig& cfg) {
    const auto gamma = s.gamma();
    for (std::size_t i = 0; i < s.plane_size(); ++i) {
        float any_o = 0.0f;
        for (int b = 0; b < s.bins(); ++b) {
            const float q = s.q(b)[i], o = s.o(b)[i];
            ASSERT_GE(q, 0.0f);
            ASSERT_LE(q, 1.0f);
            ASSERT_TRUE(o == 0.0f || o == 1.0f);
            ASSERT_GE(s.omega(b)[i], 0.0f);
            ASSERT_LE(std::abs(s.cos2phi(b)[i]), 1.0f);
            ASSERT_LE(std::abs(s.sin2phi(b)[i]), 1.0f);
            if (q > 0) ASSERT_EQ(o, 1.0f);
            if (o == 1.0f) {
                const auto [lo, hi] = bin_interval(b, s.bins());
                const double phi = decoded(s, b, i);
                ASSERT_GE(phi, lo - 1e-6);
                ASSERT_LT(phi, hi + 1e-6);
            }
            any_o = std::max(any_o, o);
        }
        ASSERT_EQ(gamma[i], any_o);
    }
    for (const GraspRect& r : select_by_jaw(scene.rects, cfg.jaw_policy)) {
        const int x = static_cast<int>(std::floor(r.cx)), y = static_cast<int>(std::floor(r.cy));
        if (x < 0 || y < 0 || x >= s.width() || y >= s.height()) continue;
        ASSERT_EQ(s.q(bin_index(r.phi, s.bins()))[idx(s, x, y)], 1.0f);
    }
}

}  // namespace

TEST(BinIndex, Examples) {
    EXPECT_EQ(bin_index(0.0, 3), 1);
    EXPECT_EQ(bin_index(-kPi / 2, 3), 0);
    EXPECT_EQ(bin_index(kPi / 6, 3), 2);
    EXPECT_EQ(bin_index(-kPi / 6, 3), 1);
    EXPECT_EQ(bin_index(std::nextafter(kPi / 2, 0.0), 3), 2);
    EXPECT_EQ(bin_index(0.3, 1), 0);
}

TEST(BinIndex, RejectsUnnormalized) {
    EXPECT_THROW(bin_index(kPi / 2, 3), InvalidArgument);
    EXPECT_THROW(bin_index(-2.0, 3), InvalidArgument);
    EXPECT_THROW(bin_index(0.0, 0), InvalidArgument);
}

TEST(AngleCoding, Examples) {
    auto c = encode_angle(0.0);
    EXPECT_DOUBLE_EQ(c.c, 1.0);
    EXPECT_DOUBLE_EQ(c.s, 0.0);
    c = encode_angle(kPi / 4);
    EXPECT_NEAR(c.c, 0.0, 1e-15);
    EXPECT_NEAR(c.s, 1.0, 1e-15);
    c = encode_angle(-kPi / 3);
    EXPECT_NEAR(c.c, -0.5, 1e-15);
    EXPECT_NEAR(c.s, -std::sqrt(3.0) / 2, 1e-15);

    EXPECT_EQ(decode_angle(1, 0), 0.0);
    EXPECT_NEAR(decode_angle(0, 1), kPi / 4, 1e-15);
    EXPECT_NEAR(decode_angle(-0.5, -std::sqrt(3.0) / 2), -kPi / 3, 1e-15);
    EXPECT_THROW(decode_angle(0, 0), UndefinedAngle);
}

TEST(AngleCoding, Roundtrip) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> a(-kPi / 2 + 1e-9, kPi / 2 - 1e-9);
    for (int i = 0; i < 10000; ++i) {
        const double phi = a(rng);
        const AngleCode c = encode_angle(phi);
        ASSERT_NEAR(decode_angle(c.c, c.s), phi, 1e-9);
    }
}

TEST(SoftQuality, Examples) {
    const GraspRect r{10, 10, 0.4, 20, 8};
    EXPECT_DOUBLE_EQ(soft_quality_value({10, 10}, r), 1.0);
    const Point edge{10 + 10 * std::cos(0.4), 10 + 10 * std::sin(0.4)};
    EXPECT_NEAR(soft_quality_value(edge, r), 0.0, 1e-12);
    const Point half{10 + 5 * std::cos(0.4), 10 + 5 * std::sin(0.4)};
    EXPECT_NEAR(soft_quality_value(half, r), 0.5, 1e-12);
    // Along the jaw axis the half-height sets the scale.
    const Point jaw{10 - 2 * std::sin(0.4), 10 + 2 * std::cos(0.4)};
    EXPECT_NEAR(soft_quality_value(jaw, r), 0.5, 1e-12);
    EXPECT_THROW(soft_quality_value({40, 40}, r), InvalidArgument);
}

TEST(SelectByJaw, KeepsMinimumOrMaximumJaw) {
    const std::vector<GraspRect> rects{{10, 10, 0.2, 20, 8}, {10, 10, 0.2, 20, 4}, {10, 10, 0.2, 20, 6},
                                       {30, 10, 0.2, 20, 9}};
    const auto min = select_by_jaw(rects, JawPolicy::minimum);
    ASSERT_EQ(min.size(), 2u);
    EXPECT_EQ(min[0].height, 4);
    EXPECT_EQ(min[1].height, 9);
    const auto max = select_by_jaw(rects, JawPolicy::maximum);
    ASSERT_EQ(max.size(), 2u);
    EXPECT_EQ(max[0].height, 8);
    // Float noise below the 1e-6 grid still groups.
    const auto noisy = select_by_jaw({{10, 10, 0.2, 20, 8}, {10 + 1e-9, 10, 0.2 - 1e-9, 20, 4}}, JawPolicy::minimum);
    EXPECT_EQ(noisy.size(), 1u);
}

TEST(BuildOrangeMaps, SingleRect) {
    const BuilderConfig cfg = small_config();
    const GraspRect r{30.5, 20.5, 0.7, 24, 10};
    const GraspMapStack s = build_orange_maps({"a", 64, 64, {r}}, cfg);
    const int bin = bin_index(r.phi, 3);
    ASSERT_EQ(bin, 2);
    for (int b = 0; b < 3; ++b) {
        EXPECT_EQ(plane_nonzero(s.q(b)) || plane_nonzero(s.o(b)), b == bin);
    }
    const auto q = s.q(bin);
    EXPECT_EQ(*std::max_element(q.begin(), q.end()), 1.0f);
    EXPECT_EQ(q[idx(s, 30, 20)], 1.0f);
    for (std::size_t i = 0; i < s.plane_size(); ++i) {
        if (s.o(bin)[i] == 1.0f) {
            ASSERT_NEAR(decoded(s, bin, i), r.phi, 1e-6);
            ASSERT_EQ(s.omega(bin)[i], 24.0f);
        }
    }
    // The o plane is exactly the rasterized box.
    const PixelRegion region = rasterize_rect(r, 64, 64);
    for (std::size_t i = 0; i < s.plane_size(); ++i) ASSERT_EQ(s.o(bin)[i] == 1.0f, region.mask[i] == 1);
    check_invariants(s, {"a", 64, 64, {r}}, cfg);
}

TEST(BuildOrangeMaps, SameCenterDifferentBins) {
    const BuilderConfig cfg = small_config();
    const GraspRect a{32.5, 32.5, -kPi / 4, 30, 12}, b{32.5, 32.5, kPi / 4, 30, 12};
    const GraspMapStack s = build_orange_maps({"a", 64, 64, {a, b}}, cfg);
    for (const auto& [bin, r] : {std::pair{0, a}, std::pair{2, b}}) {
        const auto q = s.q(bin);
        const auto peak = std::max_element(q.begin(), q.end()) - q.begin();
        EXPECT_EQ(peak, static_cast<long>(idx(s, 32, 32)));
        EXPECT_NEAR(decoded(s, bin, peak), r.phi, 1e-6);
    }
    EXPECT_FALSE(plane_nonzero(s.o(1)));
}

TEST(BuildOrangeMaps, OverlapKeepsSmallestAngle) {
    const BuilderConfig cfg = small_config();
    const GraspRect a{30.5, 30.5, 0.1, 30, 10}, b{34.5, 31.5, 0.2, 30, 10};
    ASSERT_EQ(bin_index(a.phi, 3), bin_index(b.phi, 3));
    for (const auto& order : {std::vector{a, b}, std::vector{b, a}}) {
        const GraspMapStack s = build_orange_maps({"a", 64, 64, order}, cfg);
        int overlapped = 0;
        for (int y = 0; y < 64; ++y) {
            for (int x = 0; x < 64; ++x) {
                const Point c{x + 0.5, y + 0.5};
                if (!contains(a, c) || !contains(b, c)) continue;
                const double phi = decoded(s, 1, idx(s, x, y));
                if (x == 34 && y == 31) {
                    EXPECT_NEAR(phi, 0.2, 1e-6);  // b keeps its own center
                } else {
                    ++overlapped;
                    EXPECT_NEAR(phi, 0.1, 1e-6) << x << "," << y;
                }
            }
        }
        EXPECT_GT(overlapped, 100);
    }
}

TEST(BuildOrangeMaps, EmptySceneIsAllZero) {
    const GraspMapStack s = build_orange_maps({"a", 64, 64, {}}, small_config());
    EXPECT_FALSE(plane_nonzero(s.data()));
    EXPECT_EQ(s.plane_count(), 16u);
}

TEST(BuildOrangeMaps, Errors) {
    EXPECT_THROW(build_orange_maps({"a", 64, 64, {{10, 10, kPi / 2, 10, 5}}}, small_config()), InvalidArgument);
    EXPECT_THROW(build_orange_maps({"a", 64, 64, {{10, 10, 2.0, 10, 5}}}, small_config()), InvalidArgument);
    EXPECT_THROW(build_orange_maps({"a", 100, 64, {}}, small_config()), InvalidArgument);
    BuilderConfig bad = small_config();
    bad.bins = 0;
    EXPECT_THROW(build_orange_maps({"a", 64, 64, {}}, bad), InvalidArgument);
}

TEST(BuildOrangeMaps, MinimumJawPolicyUsesSmallestBox) {
    const BuilderConfig cfg = small_config();
    const GraspRect small{32.5, 32.5, 0.3, 30, 6}, large{32.5, 32.5, 0.3, 30, 20};
    const GraspMapStack both = build_orange_maps({"a", 64, 64, {large, small}}, cfg);
    const GraspMapStack only = build_orange_maps({"a", 64, 64, {small}}, cfg);
    EXPECT_TRUE(both == only);
    BuilderConfig max_cfg = cfg;
    max_cfg.jaw_policy = JawPolicy::maximum;
    EXPECT_TRUE(build_orange_maps({"a", 64, 64, {small, large}}, max_cfg) ==
                build_orange_maps({"a", 64, 64, {large}}, max_cfg));
}

TEST(BuildOrangeMaps, BinaryQualityMode) {
    BuilderConfig cfg = small_config();
    cfg.quality_mode = QualityMode::binary;
    const GraspRect r{30.5, 20.5, 0.35, 24, 10};
    const GraspMapStack s = build_orange_maps({"a", 64, 64, {r}}, cfg);
    for (std::size_t i = 0; i < s.plane_size(); ++i) ASSERT_EQ(s.q(2)[i], s.o(2)[i]);
}

TEST(BuildOrangeMaps, GammaCentersMode) {
    BuilderConfig cfg = small_config();
    cfg.gamma_mode = GammaMode::centers;
    const GraspMapStack s = build_orange_maps({"a", 64, 64, {{30.5, 20.5, 0.35, 24, 10}, {10.2, 50.7, -1, 8, 4}}}, cfg);
    const auto g = s.gamma();
    EXPECT_EQ(std::count(g.begin(), g.end(), 1.0f), 2);
    EXPECT_EQ(g[idx(s, 30, 20)], 1.0f);
    EXPECT_EQ(g[idx(s, 10, 50)], 1.0f);
}

TEST(BuildOrangeMaps, InvariantsOnRandomScenes) {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const AnnotationSet scene = random_scene(seed);
        for (const int bins : {1, 3, 6}) {
            BuilderConfig cfg = small_config(bins, 96);
            check_invariants(build_orange_maps(scene, cfg), scene, cfg);
        }
    }
}

TEST(BuildOrangeMaps, PermutationInvariant) {
    std::mt19937_64 rng(99);
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        AnnotationSet scene = random_scene(seed);
        // Same-grasp jaw duplicates exercise the grouping step too.
        for (std::size_t i = 0, n = scene.rects.size(); i < n; i += 2) {
            GraspRect dup = scene.rects[i];
            dup.height *= 1.7;
            scene.rects.push_back(dup);
        }
        const BuilderConfig cfg = small_config(3, 96);
        const GraspMapStack reference = build_orange_maps(scene, cfg);
        for (int k = 0; k < 5; ++k) {
            std::shuffle(scene.rects.begin(), scene.rects.end(), rng);
            ASSERT_TRUE(build_orange_maps(scene, cfg) == reference) << seed;
        }
    }
}

TEST(BuildOrangeMaps, BinaryModeMatchesLegacyQuality) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        SynthParams p;
        p.seed = seed;
        p.num_rects = 8;
        p.image_width = p.image_height = 96;
        p.center_min = 0;
        p.center_max = 96;
        p.height_min = p.height_max = 6;  // a single jaw size
        p.width_min = 6;
        const AnnotationSet scene = synth_scene(p);
        BuilderConfig cfg = small_config(3, 96);
        cfg.quality_mode = QualityMode::binary;
        cfg.jaw_policy = JawPolicy::maximum;
        const GraspMapStack s = build_orange_maps(scene, cfg);
        const LegacyMapStack legacy = build_legacy_maps(scene, cfg);
        for (std::size_t i = 0; i < s.plane_size(); ++i) {
            float any = 0;
            for (int b = 0; b < 3; ++b) any = std::max(any, s.q(b)[i]);
            ASSERT_EQ(any, legacy.q[i]) << seed << " " << i;
        }
    }
}

TEST(BuildLegacyMaps, SingleRect) {
    const GraspRect r{30.5, 20.5, 0.35, 24, 10};
    const LegacyMapStack m = build_legacy_maps({"a", 64, 64, {r}}, small_config());
    const PixelRegion region = rasterize_rect(r, 64, 64);
    for (std::size_t i = 0; i < m.q.size(); ++i) {
        ASSERT_EQ(m.q[i] == 1.0f, region.mask[i] == 1);
        if (m.q[i] == 1.0f) {
            ASSERT_EQ(m.angle[i], static_cast<float>(r.phi));
        }
    }
}

TEST(BuildLegacyMaps, LastBoxWinsOverlaps) {
    const GraspRect a{30.5, 30.5, 0.1, 30, 10}, b{34.5, 31.5, 0.9, 30, 10};
    const LegacyMapStack ab = build_legacy_maps({"a", 64, 64, {a, b}}, small_config());
    const LegacyMapStack ba = build_legacy_maps({"a", 64, 64, {b, a}}, small_config());
    const std::size_t shared = 31 * 64 + 32;
    ASSERT_TRUE(contains(a, {32.5, 31.5}) && contains(b, {32.5, 31.5}));
    EXPECT_EQ(ab.angle[shared], static_cast<float>(b.phi));
    EXPECT_EQ(ba.angle[shared], static_cast<float>(a.phi));
    EXPECT_EQ(ab.q, ba.q);
    EXPECT_NE(ab.angle, ba.angle);
}

TEST(BuildLegacyMaps, JawDuplicatesEqualMaxJawQuality) {
    const GraspRect small{32.5, 32.5, 0.3, 30, 6}, large{32.5, 32.5, 0.3, 30, 20};
    const LegacyMapStack both = build_legacy_maps({"a", 64, 64, {small, large, small}}, small_config());
    const LegacyMapStack max_only = build_legacy_maps({"a", 64, 64, {large}}, small_config());
    EXPECT_EQ(both.q, max_only.q);
}
