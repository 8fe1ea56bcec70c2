#include <cstring>
#include <stdexcept>

#include "doctest.h"

#include "c2m/latent.hpp"
#include "c2m/rng.hpp"

using namespace c2m;

namespace {

Latent random_latent(int c, int h, int w, std::uint64_t seed) {
    Latent z(c, h, w);
    for (size_t i = 0; i < z.v.size(); ++i) {
        z.v[i] = -1.0 + 2.0 * rng::unit_uniform(rng::combine(seed, i));
    }
    return z;
}

bool bits_equal(const Latent& a, const Latent& b) {
    return a.same_dims(b) &&
           std::memcmp(a.v.data(), b.v.data(), a.v.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("blend_latents returns operands bit-exactly under constant masks") {
    Latent fg = random_latent(4, 4, 4, 1);
    Latent bg = random_latent(4, 4, 4, 2);
    CHECK(bits_equal(blend_latents(fg, bg, Mask(4, 4, true)), fg));
    CHECK(bits_equal(blend_latents(fg, bg, Mask(4, 4, false)), bg));
}

TEST_CASE("blend_latents matches the elementwise oracle on a checkerboard") {
    Latent fg = random_latent(4, 4, 4, 3);
    Latent bg = random_latent(4, 4, 4, 4);
    Mask m(4, 4);
    for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < 4; ++x) m.set(y, x, (x + y) % 2 == 0);
    }
    Latent out = blend_latents(fg, bg, m);
    for (int c = 0; c < 4; ++c) {
        for (int y = 0; y < 4; ++y) {
            for (int x = 0; x < 4; ++x) {
                double want = m.get(y, x) ? fg.at(c, y, x) : bg.at(c, y, x);
                CHECK(out.at(c, y, x) == want);
            }
        }
    }
}

TEST_CASE("predict_blended_final is the same selection") {
    Latent fg = random_latent(4, 3, 5, 5);
    Latent bg = random_latent(4, 3, 5, 6);
    Mask m(5, 3);
    m.set(0, 0, true);
    m.set(2, 4, true);
    CHECK(bits_equal(predict_blended_final(fg, bg, m), blend_latents(fg, bg, m)));
}

TEST_CASE("blend_latents validates dimensions") {
    Latent fg = random_latent(4, 4, 4, 7);
    CHECK_THROWS_AS(blend_latents(fg, random_latent(4, 4, 5, 8), Mask(4, 4, true)),
                    std::invalid_argument);
    CHECK_THROWS_AS(blend_latents(fg, random_latent(4, 4, 4, 9), Mask(5, 4, true)),
                    std::invalid_argument);
}
