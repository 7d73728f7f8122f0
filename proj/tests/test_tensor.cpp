#include <catch2/catch_amalgamated.hpp>

#include "advkit/rng.hpp"
#include "advkit/tensor.hpp"

using namespace advkit;

TEST_CASE("project_linf leaves in-ball candidates unchanged") {
    Image origin(4, 4, 1, 0.5f);
    Image cand = origin;
    cand.at(1, 1, 0) = 0.51f;
    const Image out = project_linf(cand, origin, 0.02f);
    REQUIRE(out.data == cand.data);
}

TEST_CASE("project_linf saturation arithmetic") {
    // candidate = origin + 1 everywhere, eps = 0.02 -> origin + 0.02 where <= 1, else 1
    Rng rng(42);
    Image origin(5, 5, 1);
    for (float& v : origin.data) v = uniform(rng, 0.0f, 1.0f);
    Image cand = origin;
    for (float& v : cand.data) v += 1.0f;
    const Image out = project_linf(cand, origin, 0.02f);
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        const float want = std::min(1.0f, origin.data[i] + 0.02f);
        REQUIRE(out.data[i] == Catch::Approx(want).margin(1e-7));
    }
}

TEST_CASE("project_linf random candidates satisfy both constraints elementwise") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const float eps = uniform(rng, 0.0f, 0.5f);
        Image origin(3, 3, 3), cand(3, 3, 3);
        for (float& v : origin.data) v = uniform(rng, 0.0f, 1.0f);
        for (float& v : cand.data) v = uniform(rng, -1.0f, 2.0f);
        const Image out = project_linf(cand, origin, eps);
        for (std::size_t i = 0; i < out.data.size(); ++i) {
            REQUIRE(out.data[i] >= 0.0f);
            REQUIRE(out.data[i] <= 1.0f);
            REQUIRE(std::abs(out.data[i] - origin.data[i]) <= eps + 1e-6f);
        }
    }
}

TEST_CASE("apply_perturbation identity and saturation") {
    Image x(4, 4, 1, 0.25f);
    std::vector<float> zero(x.size(), 0.0f);
    REQUIRE(apply_perturbation(x, zero).data == x.data);

    Image ones(4, 4, 1, 1.0f);
    std::vector<float> pos(ones.size(), 0.3f);
    const Image sat = apply_perturbation(ones, pos);
    for (float v : sat.data) REQUIRE(v == 1.0f);
}

TEST_CASE("apply then subtract recovers interior pixels") {
    Rng rng(5);
    Image x(4, 4, 1);
    for (float& v : x.data) v = uniform(rng, 0.3f, 0.7f);
    std::vector<float> delta(x.size());
    for (float& d : delta) d = uniform(rng, -0.2f, 0.2f);
    Image fwd = apply_perturbation(x, delta);
    for (float& d : delta) d = -d;
    Image back = apply_perturbation(fwd, delta);
    for (std::size_t i = 0; i < x.size(); ++i)
        REQUIRE(back.data[i] == Catch::Approx(x.data[i]).margin(1e-6));
}

TEST_CASE("content hash is order and value sensitive") {
    Image a(2, 2, 1, 0.1f), b(2, 2, 1, 0.1f);
    REQUIRE(content_hash(a) == content_hash(b));
    b.at(0, 0, 0) = 0.2f;
    REQUIRE(content_hash(a) != content_hash(b));
}
