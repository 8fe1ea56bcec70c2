#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "doctest.h"

#include "c2m/backend.hpp"
#include "c2m/mask.hpp"
#include "c2m/metrics.hpp"

using namespace c2m;

namespace {

Image flat(int w, int h, double v) { return Image(w, h, 3, v); }

void paint_disk(Image& img, int cx, int cy, double r, double add) {
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double dx = x - cx, dy = y - cy;
            if (dx * dx + dy * dy <= r * r) {
                for (int c = 0; c < 3; ++c) {
                    img.at(y, x, c) = std::clamp(img.at(y, x, c) + add, 0.0, 1.0);
                }
            }
        }
    }
}

double mask_iou(const Mask& a, const Mask& b) {
    long inter = 0, uni = 0;
    for (int y = 0; y < a.height; ++y) {
        for (int x = 0; x < a.width; ++x) {
            bool pa = a.get(y, x), pb = b.get(y, x);
            inter += (pa && pb) ? 1 : 0;
            uni += (pa || pb) ? 1 : 0;
        }
    }
    return uni > 0 ? static_cast<double>(inter) / uni : 1.0;
}

}  // namespace

TEST_CASE("extract_edit_mask finds a painted disk") {
    Image in = flat(96, 96, 0.2);
    Image out = in;
    paint_disk(out, 48, 40, 15.0, 0.4);
    Mask m = extract_edit_mask(in, out, ExtractParams{});
    Mask oracle(96, 96);
    for (int y = 0; y < 96; ++y) {
        for (int x = 0; x < 96; ++x) {
            double dx = x - 48, dy = y - 40;
            oracle.set(y, x, dx * dx + dy * dy <= 15.0 * 15.0);
        }
    }
    CHECK(mask_iou(m, oracle) >= 0.85);
}

TEST_CASE("extract_edit_mask is empty for identical inputs") {
    Image in = flat(64, 64, 0.3);
    Mask m = extract_edit_mask(in, in, ExtractParams{});
    CHECK(m.empty_mask());
    CHECK_THROWS_AS(extract_edit_mask(in, flat(32, 64, 0.3), ExtractParams{}),
                    std::invalid_argument);
}

TEST_CASE("extract_edit_mask closes concave difference regions") {
    Image in = flat(80, 80, 0.25);
    Image out = in;
    // C shape: a ring with a bite taken out; the hull closes the bay.
    for (int y = 0; y < 80; ++y) {
        for (int x = 0; x < 80; ++x) {
            double dx = x - 40, dy = y - 40;
            double d = std::sqrt(dx * dx + dy * dy);
            if (d >= 12.0 && d <= 22.0 && !(dx > 0 && std::fabs(dy) < 6.0)) {
                for (int c = 0; c < 3; ++c) out.at(y, x, c) = 0.9;
            }
        }
    }
    Mask m = extract_edit_mask(in, out, ExtractParams{});
    CHECK(m.get(40, 40));  // ring interior captured by the hull
    CHECK(m.get(40, 55));  // the bay too
}

TEST_CASE("extract_edit_mask drops sub-threshold and tiny changes") {
    Image in = flat(64, 64, 0.5);
    Image faint = in;
    paint_disk(faint, 32, 32, 10.0, 0.03);  // below the 0.05 threshold
    CHECK(extract_edit_mask(in, faint, ExtractParams{}).empty_mask());
    Image speck = in;
    paint_disk(speck, 32, 32, 1.0, 0.5);  // eroded away by pooling
    CHECK(extract_edit_mask(in, speck, ExtractParams{}).empty_mask());
}

TEST_CASE("mean_l1 averages absolute differences") {
    Image a = flat(4, 4, 0.25);
    Image b = flat(4, 4, 0.75);
    CHECK(mean_l1(a, b) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(mean_l1(a, a) == 0.0);
    CHECK_THROWS_AS(mean_l1(a, flat(5, 4, 0.0)), std::invalid_argument);
}

TEST_CASE("directional_clip is maximal when deltas coincide") {
    SyntheticEmbedder e;
    // The embeddings of a caption's own procedural target make the image
    // delta equal the text delta exactly.
    Image in = synthetic_target("blue cube", 64, 64, 0);
    Image out = synthetic_target("red ball", 64, 64, 0);
    double v = directional_clip(e, in, out, "blue cube", "red ball");
    CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(directional_clip(e, in, in, "blue cube", "x") == 0.0);  // zero image delta
    CHECK_THROWS_AS(directional_clip(e, in, out, "", "red ball"), std::invalid_argument);
    CHECK_THROWS_AS(directional_clip(e, in, out, "blue cube", ""), std::invalid_argument);
}

TEST_CASE("clip_out is maximal on the caption's own target") {
    SyntheticEmbedder e;
    Image out = synthetic_target("red ball", 64, 64, 0);
    CHECK(clip_out(e, out, "red ball") == doctest::Approx(1.0).epsilon(1e-9));
    double other = clip_out(e, out, "totally different scene");
    CHECK(other <= 1.0 + 1e-12);
    CHECK(other >= -1.0 - 1e-12);
}

TEST_CASE("alpha_clip_edit flags empty extractions and scores real ones") {
    SyntheticParams p;
    SyntheticBackend be(p);
    Image in = synthetic_target("", 64, 64, 0);
    AlphaClipEditResult none = alpha_clip_edit(be, in, in, "crimson orb", ExtractParams{});
    CHECK(none.empty_mask);
    CHECK(none.value == 0.0);

    Image out = in;
    paint_disk(out, 32, 32, 12.0, 0.5);
    AlphaClipEditResult got = alpha_clip_edit(be, in, out, "crimson orb", ExtractParams{});
    CHECK_FALSE(got.empty_mask);
    Mask m = extract_edit_mask(in, out, ExtractParams{});
    CHECK(got.value == be.score(out, m, "crimson orb").similarity);
}
