#include <stdexcept>

#include "doctest.h"

#include "c2m/mask.hpp"
#include "c2m/reference.hpp"
#include "c2m/rng.hpp"
#include "c2m/types.hpp"

using namespace c2m;

namespace {

Mask random_mask(int w, int h, std::uint64_t seed, double density) {
    Mask m(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::uint64_t k = rng::combine(seed, static_cast<std::uint64_t>(y) * w + x);
            m.set(y, x, rng::unit_uniform(k) < density);
        }
    }
    return m;
}

Mask rect_mask(int w, int h, int x0, int y0, int x1, int y1) {
    Mask m(w, h);
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) m.set(y, x, true);
    }
    return m;
}

}  // namespace

TEST_CASE("threshold is strict") {
    Field f(3, 1);
    f.at(0, 0) = 0.5;
    f.at(0, 1) = 0.5 + 1e-12;
    f.at(0, 2) = 0.4;
    Mask m = threshold(f, 0.5);
    CHECK_FALSE(m.get(0, 0));
    CHECK(m.get(0, 1));
    CHECK_FALSE(m.get(0, 2));
}

TEST_CASE("dilate and erode match hand oracles") {
    Mask dot(5, 5);
    dot.set(2, 2, true);
    Mask d = dilate(dot, 1);
    CHECK(d.count() == 9);
    for (int y = 1; y <= 3; ++y) {
        for (int x = 1; x <= 3; ++x) CHECK(d.get(y, x));
    }
    CHECK(erode(d, 1) == dot);

    // A full mask erodes away its border because outside cells count false.
    Mask full(4, 4, true);
    Mask e = erode(full, 1);
    CHECK(e.count() == 4);
    CHECK(e.get(1, 1));
    CHECK(e.get(2, 2));
    CHECK_FALSE(e.get(0, 0));
}

TEST_CASE("dilate and erode agree with the window-scan reference") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        for (double density : {0.1, 0.5, 0.9}) {
            Mask m = random_mask(33, 21, seed, density);
            for (int r : {0, 1, 2, 3}) {
                CHECK(dilate(m, r) == reference::dilate(m, r));
                CHECK(erode(m, r) == reference::erode(m, r));
            }
        }
    }
    Mask m = random_mask(8, 8, 7, 0.4);
    CHECK_THROWS_AS(dilate(m, -1), std::invalid_argument);
    CHECK_THROWS_AS(erode(m, -1), std::invalid_argument);
}

TEST_CASE("contour_ring brackets the mask boundary") {
    Mask m = rect_mask(15, 15, 4, 4, 11, 11);
    Mask ring = contour_ring(m, 1, 2);
    // The ring is the 2-dilation minus the 1-erosion.
    CHECK(ring == [&] {
        Mask d = dilate(m, 2);
        Mask e = erode(m, 1);
        Mask out(m.width, m.height);
        for (int y = 0; y < m.height; ++y) {
            for (int x = 0; x < m.width; ++x) {
                out.set(y, x, d.get(y, x) && !e.get(y, x));
            }
        }
        return out;
    }());
    // Boundary cells of the mask always land inside the ring.
    Mask interior = erode(m, 1);
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            if (m.get(y, x) && !interior.get(y, x)) CHECK(ring.get(y, x));
        }
    }
    // Deep interior stays out of the ring.
    CHECK_FALSE(ring.get(7, 7));
    CHECK_THROWS_AS(contour_ring(m, -1, 2), std::invalid_argument);
    CHECK_THROWS_AS(contour_ring(m, 1, 0), std::invalid_argument);
}

TEST_CASE("postprocess_mask keeps the anchor component and fills holes") {
    // Big blob far away, small blob under the anchor.
    Mask m = rect_mask(24, 24, 1, 1, 9, 9);
    for (int y = 14; y < 17; ++y) {
        for (int x = 14; x < 17; ++x) m.set(y, x, true);
    }
    Mask kept = postprocess_mask(m, {15, 15}, 0, 4);
    CHECK(kept.get(15, 15));
    CHECK_FALSE(kept.get(4, 4));
    CHECK(kept.count() == 9);

    // Anchor off any component: the largest survives.
    Mask largest = postprocess_mask(m, {22, 22}, 0, 4);
    CHECK(largest.get(4, 4));
    CHECK_FALSE(largest.get(15, 15));
}

TEST_CASE("postprocess_mask fills enclosed holes") {
    Mask donut = rect_mask(16, 16, 3, 3, 12, 12);
    for (int y = 6; y < 9; ++y) {
        for (int x = 6; x < 9; ++x) donut.set(y, x, false);
    }
    Mask filled = postprocess_mask(donut, {3, 3}, 0, 4);
    CHECK(filled.get(7, 7));
    CHECK(filled.count() == 81);
}

TEST_CASE("postprocess_mask closing bridges small gaps") {
    Mask two = rect_mask(20, 10, 2, 2, 8, 8);
    for (int y = 2; y < 8; ++y) {
        for (int x = 9; x < 15; ++x) two.set(y, x, true);
    }
    two = [&] {  // punch a one-cell vertical gap between the halves
        Mask m = two;
        for (int y = 2; y < 8; ++y) m.set(y, 8, false);
        return m;
    }();
    Mask closed = postprocess_mask(two, {3, 3}, 1, 4);
    CHECK(closed.get(4, 8));  // gap bridged by the closing
    std::vector<long> sizes;
    label_components(closed, sizes);
    CHECK(sizes.size() == 1);
}

TEST_CASE("postprocess_mask failure modes") {
    Mask empty(8, 8);
    CHECK_THROWS_AS(postprocess_mask(empty, {1, 1}, 1, 4), EvolutionError);
    Mask specks(8, 8);
    specks.set(1, 1, true);
    specks.set(6, 6, true);
    CHECK_THROWS_AS(postprocess_mask(specks, {1, 1}, 0, 4), EvolutionError);
    Mask ok = rect_mask(8, 8, 2, 2, 6, 6);
    CHECK_THROWS_AS(postprocess_mask(ok, {9, 9}, 0, 4), std::invalid_argument);
}

TEST_CASE("label_components uses 8-connectivity") {
    Mask m(6, 6);
    m.set(0, 0, true);
    m.set(1, 1, true);  // diagonal neighbor joins the component
    m.set(4, 4, true);
    std::vector<long> sizes;
    std::vector<int> label = label_components(m, sizes);
    CHECK(sizes.size() == 2);
    CHECK(label[0] == label[7]);
    CHECK(label[0] != label[4 * 6 + 4]);
    long total = 0;
    for (long s : sizes) total += s;
    CHECK(total == 3);
}

TEST_CASE("upscale_mask replicates blocks") {
    Mask m(3, 2);
    m.set(0, 0, true);
    m.set(1, 2, true);
    Mask up = upscale_mask(m, 4);
    CHECK(up.width == 12);
    CHECK(up.height == 8);
    CHECK(up.count() == m.count() * 16);
    for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < 4; ++x) {
            CHECK(up.get(y, x));
            CHECK_FALSE(up.get(y, 4 + x));
        }
    }
    CHECK(up.get(7, 11));
    CHECK(area_fraction(up) == doctest::Approx(area_fraction(m)).epsilon(1e-15));
}

TEST_CASE("feather saturates inside and vanishes far outside") {
    Mask all(32, 16, true);
    SoftMask a = feather(all, 3.0);
    for (double v : a.alpha) CHECK(v == 1.0);
    Mask none(32, 16);
    SoftMask z = feather(none, 3.0);
    for (double v : z.alpha) CHECK(v == 0.0);
    CHECK_THROWS_AS(feather(none, 0.0), std::invalid_argument);
}

TEST_CASE("feather edge profile is a half crossing") {
    Mask half(128, 64);
    for (int y = 0; y < 64; ++y) {
        for (int x = 0; x < 64; ++x) half.set(y, x, true);
    }
    SoftMask a = feather(half, 25.0);
    CHECK(a.at(32, 63) > 0.45);
    CHECK(a.at(32, 63) < 0.55);
    CHECK(a.at(32, 63) + a.at(32, 64) == doctest::Approx(1.0).epsilon(1e-6));
    for (int x = 1; x < 128; ++x) CHECK(a.at(32, x) <= a.at(32, x - 1) + 1e-12);
}

TEST_CASE("composite selects by alpha and clamps") {
    Image e(4, 4, 3, 0.9);
    Image o(4, 4, 3, 0.1);
    SoftMask s(4, 4, 0.0);
    s.at(1, 1) = 1.0;
    s.at(2, 2) = 0.5;
    Image out = composite(e, o, s);
    CHECK(out.at(0, 0, 0) == 0.1);
    CHECK(out.at(1, 1, 2) == 0.9);
    CHECK(out.at(2, 2, 1) == doctest::Approx(0.5).epsilon(1e-15));
    Image hot(4, 4, 3, 1.5);
    SoftMask on(4, 4, 1.0);
    Image clamped = composite(hot, o, on);
    for (double v : clamped.v) CHECK(v == 1.0);
    CHECK_THROWS_AS(composite(e, Image(5, 4, 3), s), std::invalid_argument);
}
