#include <cmath>
#include <cstring>
#include <stdexcept>

#include "doctest.h"

#include "c2m/backend.hpp"
#include "c2m/mask.hpp"
#include "c2m/reference.hpp"
#include "c2m/rng.hpp"

using namespace c2m;

namespace {

bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

Mask random_cell_mask(int w, int h, std::uint64_t seed, double density) {
    Mask m(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::uint64_t k = rng::combine(seed, static_cast<std::uint64_t>(y) * w + x);
            m.set(y, x, rng::unit_uniform(k) < density);
        }
    }
    return m;
}

SyntheticParams small_params() {
    SyntheticParams p;
    p.downscale = 8;
    return p;
}

}  // namespace

TEST_CASE("synthetic_target is deterministic and prompt/seed sensitive") {
    Image a = synthetic_target("red ball", 64, 48, 7);
    Image b = synthetic_target("red ball", 64, 48, 7);
    CHECK(bits_equal(a.v, b.v));
    Image c = synthetic_target("red ball", 64, 48, 8);
    CHECK_FALSE(bits_equal(a.v, c.v));
    Image d = synthetic_target("blue cube", 64, 48, 7);
    CHECK_FALSE(bits_equal(a.v, d.v));
    CHECK_THROWS_AS(synthetic_target("x", 0, 48, 7), std::invalid_argument);
}

TEST_CASE("synthetic_target backgrounds stay low, blobs run bright") {
    Image bg = synthetic_target("", 96, 96, 3);
    for (double v : bg.v) {
        CHECK(v >= 0.099);
        CHECK(v <= 0.501);
    }
    Image with_blob = synthetic_target("red ball", 96, 96, 3);
    double best_min_channel = 0.0;
    for (int y = 0; y < 96; ++y) {
        for (int x = 0; x < 96; ++x) {
            double mc = with_blob.at(y, x, 0);
            for (int c = 1; c < 3; ++c) mc = std::min(mc, with_blob.at(y, x, c));
            best_min_channel = std::max(best_min_channel, mc);
        }
    }
    CHECK(best_min_channel >= 0.7);  // blob core is bright in every channel
    // Away from the blob the image falls back to the plain background.
    int far_pixels_equal = 0;
    int far_pixels = 0;
    for (int y = 0; y < 96; ++y) {
        for (int x = 0; x < 96; ++x) {
            bool same = true;
            for (int c = 0; c < 3; ++c) {
                if (with_blob.at(y, x, c) != bg.at(y, x, c)) same = false;
            }
            double lum = (with_blob.at(y, x, 0) + with_blob.at(y, x, 1) +
                          with_blob.at(y, x, 2)) / 3.0;
            if (lum <= 0.501) {
                ++far_pixels;
                far_pixels_equal += same ? 1 : 0;
            }
        }
    }
    CHECK(far_pixels > 0);
    CHECK(far_pixels_equal > far_pixels * 9 / 10);
}

TEST_CASE("encode/decode reconstructs block means") {
    SyntheticBackend be(small_params());
    Image img = synthetic_target("orb", 64, 64, 2);
    Latent z = be.encode(img);
    CHECK(z.channels == 4);
    CHECK(z.width == 8);
    CHECK(z.height == 8);
    Image rec = be.decode(z);
    // Oracle: block means of the source.
    for (int cy = 0; cy < 8; ++cy) {
        for (int cx = 0; cx < 8; ++cx) {
            for (int c = 0; c < 3; ++c) {
                double mean = 0.0;
                for (int y = cy * 8; y < cy * 8 + 8; ++y) {
                    for (int x = cx * 8; x < cx * 8 + 8; ++x) mean += img.at(y, x, c);
                }
                mean /= 64.0;
                CHECK(rec.at(cy * 8, cx * 8, c) == doctest::Approx(mean).epsilon(1e-12));
                // Constant within the block.
                CHECK(rec.at(cy * 8 + 7, cx * 8 + 3, c) == rec.at(cy * 8, cx * 8, c));
            }
        }
    }
    CHECK_THROWS_AS(be.encode(Image(63, 64, 3)), std::invalid_argument);
}

TEST_CASE("noise_to identities and determinism") {
    SyntheticBackend be(small_params());
    Image img = synthetic_target("", 64, 64, 1);
    Latent z0 = be.encode(img);
    CHECK(bits_equal(be.noise_to(z0, 0, 42).v, z0.v));
    Latent a = be.noise_to(z0, 60, 42);
    Latent b = be.noise_to(z0, 60, 42);
    CHECK(bits_equal(a.v, b.v));
    Latent c = be.noise_to(z0, 60, 43);
    CHECK_FALSE(bits_equal(a.v, c.v));
    CHECK_THROWS_AS(be.noise_to(z0, -1, 42), std::invalid_argument);
    CHECK_THROWS_AS(be.noise_to(z0, 101, 42), std::invalid_argument);

    SyntheticParams silent = small_params();
    silent.noise_scale = 0.0;
    SyntheticBackend quiet(silent);
    // Zero noise scale makes the level deterministic in the seed.
    CHECK(bits_equal(quiet.noise_to(z0, 60, 1).v, quiet.noise_to(z0, 60, 2).v));
}

TEST_CASE("noise_to at full level carries the configured noise scale") {
    SyntheticBackend be(small_params());
    Latent z0(4, 16, 16, 0.0);
    Latent zn = be.noise_to(z0, 100, 9);
    double mean = 0.0;
    for (double v : zn.v) mean += v;
    mean /= static_cast<double>(zn.v.size());
    double var = 0.0;
    for (double v : zn.v) var += (v - mean) * (v - mean);
    var /= static_cast<double>(zn.v.size() - 1);
    CHECK(std::fabs(mean) < 0.01);
    CHECK(var == doctest::Approx(0.05 * 0.05).epsilon(0.2));
}

TEST_CASE("denoise lands exactly on the prompt target at t = 1") {
    SyntheticBackend be(small_params());
    Image img = synthetic_target("", 64, 64, 5);
    Latent z = be.noise_to(be.encode(img), 100, 11);
    for (int t = 100; t >= 1; --t) {
        z = be.denoise(z, "crimson orb", t, 11).first;
    }
    Latent target = be.encode(synthetic_target("crimson orb", 64, 64, 0));
    CHECK(bits_equal(z.v, target.v));
    CHECK_THROWS_AS(be.denoise(z, "p", 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(be.denoise(z, "p", 101, 1), std::invalid_argument);
}

TEST_CASE("denoise foreground prediction interpolates toward the target") {
    SyntheticBackend be(small_params());
    Image img = synthetic_target("", 64, 64, 5);
    Latent z_t = be.noise_to(be.encode(img), 100, 3);
    auto [z_next, fg] = be.denoise(z_t, "blue cube", 100, 3);
    // At the top level the prediction equals the current latent.
    CHECK(bits_equal(fg.v, z_t.v));
    auto [z2, fg1] = be.denoise(z_t, "blue cube", 1, 3);
    Latent target = be.encode(synthetic_target("blue cube", 64, 64, 0));
    for (size_t i = 0; i < fg1.v.size(); ++i) {
        double want = (1.0 - 0.01) * target.v[i] + 0.01 * z_t.v[i];
        CHECK(fg1.v[i] == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("score is exact on the target and silent on empty masks") {
    SyntheticBackend be(small_params());
    Image target = synthetic_target("ruby sphere", 64, 64, 0);
    ScoreResult empty = be.score(target, Mask(64, 64, false), "ruby sphere");
    CHECK(empty.similarity == -1.0);
    for (double v : empty.gradient.v) CHECK(v == 0.0);

    ScoreResult full = be.score(target, Mask(64, 64, true), "ruby sphere");
    CHECK(full.similarity == 1.0);
    for (double v : full.gradient.v) CHECK(v == 0.0);
}

TEST_CASE("score gradient matches finite differences of the weighted relaxation") {
    SyntheticParams p = small_params();
    SyntheticBackend be(p);
    const std::string prompt = "amber blob";
    Image img = synthetic_target("distractor", 64, 64, 17);
    Image target = synthetic_target(prompt, 64, 64, p.target_seed);
    Mask cells = random_cell_mask(8, 8, 23, 0.35);
    ScoreResult sr = be.score(img, upscale_mask(cells, 8), prompt);

    Mask support = dilate(cells, p.scorer_dilation_cells);
    const double h = 1e-4;
    for (int cy = 0; cy < 8; ++cy) {
        for (int cx = 0; cx < 8; ++cx) {
            if (!support.get(cy, cx)) {
                CHECK(sr.gradient.at(cy, cx) == 0.0);
                continue;
            }
            double g = sr.gradient.at(cy, cx);
            if (std::fabs(g) <= 1e-6) continue;
            Field w_plus(8, 8, 0.0);
            Field w_minus(8, 8, 0.0);
            for (int yy = 0; yy < 8; ++yy) {
                for (int xx = 0; xx < 8; ++xx) {
                    double w = support.get(yy, xx) ? 1.0 : 0.0;
                    w_plus.at(yy, xx) = w;
                    w_minus.at(yy, xx) = w;
                }
            }
            w_plus.at(cy, cx) += h;
            w_minus.at(cy, cx) -= h;
            double fd = (reference::weighted_similarity(img, target, w_plus, 8) -
                         reference::weighted_similarity(img, target, w_minus, 8)) /
                        (2.0 * h);
            CHECK(std::fabs(fd - g) <= 1e-3 * std::fabs(g));
        }
    }
}

TEST_CASE("score validates inputs") {
    SyntheticBackend be(small_params());
    Image img = synthetic_target("", 64, 64, 1);
    CHECK_THROWS_AS(be.score(img, Mask(32, 64, true), "p"), std::invalid_argument);
}

TEST_CASE("augment_for_scoring produces identity, flip, then crops") {
    Image img = synthetic_target("dot", 64, 64, 4);
    Mask m = upscale_mask(random_cell_mask(8, 8, 31, 0.4), 8);
    auto views = augment_for_scoring(img, m, 4);
    REQUIRE(views.size() == 4);
    CHECK(bits_equal(views[0].first.v, img.v));
    CHECK(views[0].second == m);
    // Flip.
    for (int y = 0; y < 64; ++y) {
        for (int x = 0; x < 64; ++x) {
            CHECK(views[1].first.at(y, x, 0) == img.at(y, 63 - x, 0));
            CHECK(views[1].second.get(y, x) == m.get(y, 63 - x));
        }
    }
    // Crop entries keep the center and zero the border.
    const double fracs[2] = {0.8, 0.7};
    for (int j = 2; j < 4; ++j) {
        int cw = static_cast<int>(64 * fracs[j - 2]);
        int off = (64 - cw) / 2;
        const Image& v = views[j].first;
        CHECK(v.at(0, 0, 0) == 0.0);
        CHECK_FALSE(views[j].second.get(0, 0));
        CHECK(v.at(32, 32, 1) == img.at(32, 32, 1));
        CHECK(v.at(off, off, 2) == img.at(off, off, 2));
        CHECK(v.at(off - 1, off, 2) == 0.0);
    }
    CHECK_THROWS_AS(augment_for_scoring(img, m, 0), std::invalid_argument);
    CHECK_THROWS_AS(augment_for_scoring(img, Mask(32, 64), 2), std::invalid_argument);
}

TEST_CASE("make_backend resolves the synthetic key only") {
    CHECK(make_backend("synthetic", small_params()) != nullptr);
    CHECK_THROWS_AS(make_backend("diffusion", small_params()), std::invalid_argument);
}

TEST_CASE("backend construction validates params") {
    SyntheticParams p = small_params();
    p.latent_channels = 3;
    CHECK_THROWS_AS(SyntheticBackend{p}, std::invalid_argument);
    SyntheticParams q = small_params();
    q.n = 0;
    CHECK_THROWS_AS(SyntheticBackend{q}, std::invalid_argument);
}
