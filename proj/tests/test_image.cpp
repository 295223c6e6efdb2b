// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "occsim/error.hpp"
#include "occsim/image.hpp"
#include "occsim/random.hpp"

using namespace occsim;
using Catch::Approx;

namespace {

GrayImage random_image(int w, int h, std::uint64_t seed) {
    RandomSource rng(seed);
    GrayImage img(w, h);
    for (double& p : img.pixels()) p = rng.uniform();
    return img;
}

}  // namespace

TEST_CASE("area resampling preserves mean and handles exact 2x", "[image]") {
    GrayImage img(4, 2, std::vector<double>{0, 1, 1, 1, 0, 1, 0, 0});
    const GrayImage half = resample_area(img, 2, 1);
    CHECK(half.at(0, 0) == Approx(0.5));
    CHECK(half.at(1, 0) == Approx(0.5));

    const GrayImage noisy = random_image(37, 23, 5);
    const GrayImage down = resample_area(noisy, 11, 7);
    double a = 0, b = 0;
    for (double p : noisy.pixels()) a += p;
    for (double p : down.pixels()) b += p;
    CHECK(b / down.pixels().size() == Approx(a / noisy.pixels().size()).epsilon(1e-12));
}

TEST_CASE("bilinear resampling at unit scale is the identity", "[image]") {
    const GrayImage img = random_image(19, 13, 9);
    const GrayImage same = resample_bilinear(img, 19, 13);
    for (std::size_t i = 0; i < img.pixels().size(); ++i) {
        CHECK(std::abs(same.pixels()[i] - img.pixels()[i]) <= 1e-12);
    }
    const GrayImage dot(1, 1, 0.3);
    const GrayImage up = resample_bilinear(dot, 8, 5);
    for (double p : up.pixels()) CHECK(p == 0.3);
}

TEST_CASE("box blur keeps constant images constant and averages windows", "[image]") {
    const GrayImage flat(9, 9, 0.7);
    const GrayImage blurred = box_blur(flat, 2);
    for (double p : blurred.pixels()) CHECK(p == Approx(0.7));
    GrayImage spike(5, 5, 0.0);
    spike.at(2, 2) = 9.0;
    const GrayImage b = box_blur(spike, 1);
    CHECK(b.at(2, 2) == Approx(1.0));
    CHECK(b.at(0, 0) == Approx(0.0));
    CHECK(b.at(1, 1) == Approx(1.0));
}

TEST_CASE("gaussian blur conserves total intensity away from edges", "[image]") {
    GrayImage spike(41, 41, 0.0);
    spike.at(20, 20) = 1.0;
    const GrayImage b = gaussian_blur(spike, 2.0);
    double sum = 0.0;
    for (double p : b.pixels()) sum += p;
    CHECK(sum == Approx(1.0).epsilon(1e-12));
    CHECK(b.at(20, 20) > b.at(21, 20));
    CHECK(b.at(21, 20) == Approx(b.at(19, 20)));
}

TEST_CASE("paste clips to the destination", "[image]") {
    GrayImage dst(4, 4, 1.0);
    paste(dst, GrayImage(3, 3, 0.0), 2, -1);
    CHECK(dst.at(2, 0) == 0.0);
    CHECK(dst.at(3, 1) == 0.0);
    CHECK(dst.at(2, 2) == 1.0);
    CHECK(dst.at(1, 0) == 1.0);
}

TEST_CASE("PGM write/read round trip quantizes to 8 bits", "[image][pgm]") {
    const GrayImage img = random_image(17, 11, 3);
    std::stringstream buf;
    write_pgm(img, buf);
    const GrayImage back = read_pgm(buf);
    REQUIRE(back.width() == 17);
    REQUIRE(back.height() == 11);
    for (std::size_t i = 0; i < img.pixels().size(); ++i) {
        CHECK(back.pixels()[i] == std::lround(img.pixels()[i] * 255.0) / 255.0);
    }
}

TEST_CASE("PGM header and body format", "[image][pgm]") {
    GrayImage img(2, 1, std::vector<double>{0.0, 1.0});
    std::stringstream buf;
    write_pgm(img, buf);
    CHECK(buf.str() == std::string("P5\n2 1\n255\n\x00\xff", 13));
}

TEST_CASE("PGM reader handles comments, ASCII and 16-bit data", "[image][pgm]") {
    std::stringstream ascii("P2\n# comment\n3 1\n# another\n10\n0 5 10\n");
    const PgmData data = read_pgm_data(ascii);
    CHECK(data.maxval == 10);
    CHECK(data.samples == std::vector<std::uint16_t>{0, 5, 10});

    std::stringstream wide(std::string("P5 2 1 1000\n\x03\xe8\x00\x01", 16));
    const PgmData w = read_pgm_data(wide);
    CHECK(w.samples == std::vector<std::uint16_t>{1000, 1});
}

TEST_CASE("PGM reader rejects malformed input", "[image][pgm]") {
    std::stringstream bad_magic("P6\n1 1\n255\n\x00");
    CHECK_THROWS_AS(read_pgm(bad_magic), ParseError);
    std::stringstream truncated("P5\n4 4\n255\nab");
    CHECK_THROWS_AS(read_pgm(truncated), ParseError);
    std::stringstream bad_dims("P5\n0 4\n255\n");
    CHECK_THROWS_AS(read_pgm(bad_dims), ParseError);
}
