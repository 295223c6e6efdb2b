// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "occsim/error.hpp"
#include "occsim/frame_codec.hpp"
#include "occsim/threshold.hpp"

using namespace occsim;
using Catch::Approx;

TEST_CASE("default layout geometry", "[codec]") {
    const FrameLayout layout;
    CHECK(layout.capacity_bits() == 182);
    CHECK(layout.grid_width_px() == 192);
    CHECK(layout.grid_height_px() == 180);
    CHECK(layout.grid_box() == PixelBox{4, 10, 192, 180});
    CHECK_NOTHROW(layout.validate());

    FrameLayout too_big = layout;
    too_big.cell_px = 13;
    CHECK_THROWS_AS(too_big.validate(), std::invalid_argument);
}

TEST_CASE("encode_frame pads and enforces capacity", "[codec]") {
    SECTION("full payload") {
        const Bits ones(182, 1);
        const BitFrame f = encode_frame(ones);
        CHECK(f.bits == ones);
        CHECK(f.padding_bits == 0);
    }
    SECTION("single ASCII byte") {
        const BitFrame f = encode_frame(text_to_bits("A"));
        REQUIRE(f.bits.size() == 182);
        CHECK(bits_to_string(std::span(f.bits).first(8)) == "01000001");
        CHECK(std::count(f.bits.begin() + 8, f.bits.end(), 0) == 174);
        CHECK(f.padding_bits == 174);
    }
    SECTION("overflow") {
        const Bits big(183, 0);
        CHECK_THROWS_AS(encode_frame(big), CapacityError);
        try {
            encode_frame(big);
        } catch (const CapacityError& e) {
            CHECK(e.required_bits() == 183);
            CHECK(e.capacity_bits() == 182);
        }
    }
    SECTION("non-binary values") {
        const Bits bad{0, 1, 2};
        CHECK_THROWS_AS(encode_frame(bad), std::invalid_argument);
    }
}

TEST_CASE("rasterize_frame colours", "[codec]") {
    const FrameLayout layout;
    const PixelBox grid = layout.grid_box();
    const int c = layout.cell_px;

    SECTION("all-zero frame: white data, black ring, white margin") {
        const GrayImage img = rasterize_frame(encode_frame(Bits{}));
        REQUIRE(img.width() == 200);
        REQUIRE(img.height() == 200);
        CHECK(img.at(0, 0) == 1.0);
        CHECK(img.at(grid.x - 1, grid.y + 50) == 1.0);
        CHECK(img.at(grid.x, grid.y) == 0.0);
        CHECK(img.at(grid.x + grid.width - 1, grid.y + grid.height - 1) == 0.0);
        for (int y = grid.y + c; y < grid.y + grid.height - c; ++y) {
            for (int x = grid.x + c; x < grid.x + grid.width - c; ++x) {
                REQUIRE(img.at(x, y) == 1.0);
            }
        }
    }
    SECTION("all-one frame: whole grid black") {
        const GrayImage img = rasterize_frame(encode_frame(Bits(182, 1)));
        for (int y = grid.y; y < grid.y + grid.height; ++y) {
            for (int x = grid.x; x < grid.x + grid.width; ++x) {
                REQUIRE(img.at(x, y) == 0.0);
            }
        }
        CHECK(img.at(grid.x - 1, grid.y) == 1.0);
    }
    SECTION("first data bit sits top-left inside the ring") {
        Bits payload{1};
        const GrayImage img = rasterize_frame(encode_frame(payload));
        CHECK(img.at(grid.x + c + 5, grid.y + c + 5) == 0.0);
        CHECK(img.at(grid.x + 2 * c + 5, grid.y + c + 5) == 1.0);
    }
}

TEST_CASE("rasterize then decode is exact with unit margins", "[codec]") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Bits payload = test::random_bits(182, seed);
        const DecodeReport r = decode_frame(rasterize_frame(encode_frame(payload)), {}, payload);
        REQUIRE(r.roi_found);
        REQUIRE(r.bits == payload);
        CHECK(r.threshold == 0.5);
        CHECK(*r.success_rate_vs_reference == 1.0);
        for (double m : r.per_cell_margin) REQUIRE(m == 0.5);
    }
    for (const Bits& payload : {Bits(182, 0), Bits(182, 1)}) {
        const DecodeReport r = decode_frame(rasterize_frame(encode_frame(payload)));
        REQUIRE(r.roi_found);
        CHECK(r.bits == payload);
        CHECK(r.per_cell_margin.size() == 182);
    }
}

TEST_CASE("extract_roi", "[codec]") {
    const FrameLayout layout;
    const GrayImage frame = rasterize_frame(encode_frame(test::random_bits(182, 11)));

    SECTION("unit-scale frame gives the ring box") {
        const auto roi = extract_roi(frame);
        REQUIRE(roi);
        CHECK(roi->box == layout.grid_box());
        CHECK(roi->image.width() == 192);
    }
    SECTION("half-scale frame on a white canvas") {
        const auto placed = test::place_scaled(frame, 0.5, 200, 200);
        const auto roi = extract_roi(placed.image);
        REQUIRE(roi);
        // Ring box (4, 10, 192, 180) halves to (2, 5, 96, 90) inside the placement.
        CHECK(roi->box == PixelBox{placed.placement.x + 2, placed.placement.y + 5, 96, 90});
    }
    SECTION("blank images hold no frame") {
        CHECK_FALSE(extract_roi(GrayImage(200, 200, 1.0)));
        CHECK_FALSE(extract_roi(GrayImage(50, 50, 0.4)));
        CHECK_FALSE(extract_roi(GrayImage()));
    }
    SECTION("isolated specks touching the ring are trimmed") {
        GrayImage speckled = frame;
        const PixelBox g = layout.grid_box();
        speckled.at(g.x - 1, g.y + 40) = 0.0;
        speckled.at(g.x + 60, g.y - 1) = 0.0;
        speckled.at(g.x + 60, g.y - 2) = 0.0;
        const auto roi = extract_roi(speckled);
        REQUIRE(roi);
        CHECK(roi->box == g);
    }
}

TEST_CASE("rescale_roi", "[codec]") {
    const FrameLayout layout;
    const GrayImage frame = rasterize_frame(encode_frame(test::random_bits(182, 4)));
    const GrayImage nominal = frame.crop(layout.grid_box());

    SECTION("identity at nominal size") {
        const GrayImage same = rescale_roi(nominal);
        for (std::size_t i = 0; i < same.pixels().size(); ++i) {
            REQUIRE(std::abs(same.pixels()[i] - nominal.pixels()[i]) <= 1e-12);
        }
    }
    SECTION("2x down then up keeps cell means") {
        const GrayImage down = resample_area(nominal, 96, 90);
        const GrayImage up = rescale_roi(down);
        for (int gy = 0; gy < layout.grid_rows(); ++gy) {
            for (int gx = 0; gx < layout.grid_cols(); ++gx) {
                double a = 0, b = 0;
                for (int y = 0; y < 12; ++y) {
                    for (int x = 0; x < 12; ++x) {
                        a += nominal.at(gx * 12 + x, gy * 12 + y);
                        b += up.at(gx * 12 + x, gy * 12 + y);
                    }
                }
                REQUIRE(std::abs(a - b) / 144.0 < 0.1);
            }
        }
    }
    SECTION("1x1 ROI upscales to a uniform image") {
        const GrayImage up = rescale_roi(GrayImage(1, 1, 0.25));
        CHECK(up.width() == 192);
        for (double p : up.pixels()) REQUIRE(p == 0.25);
    }
    SECTION("zero-area ROI is an error") { CHECK_THROWS_AS(rescale_roi(GrayImage()), std::invalid_argument); }
}

TEST_CASE("decode_frame of a blank capture reports no ROI", "[codec]") {
    const DecodeReport r = decode_frame(GrayImage(300, 300, 1.0));
    CHECK_FALSE(r.roi_found);
    CHECK(r.bits.empty());
    CHECK_FALSE(r.success_rate_vs_reference);
}

TEST_CASE("round trip is exact across downscale factors 0.3 to 1.0", "[codec][property]") {
    std::uint64_t seed = 100;
    for (double scale = 0.3; scale <= 1.0 + 1e-9; scale += 0.05) {
        for (int rep = 0; rep < 5; ++rep) {
            const Bits payload = test::random_bits(182, ++seed);
            const auto placed = test::place_scaled(rasterize_frame(encode_frame(payload)), scale, 260, 240);
            const DecodeReport r = decode_frame(placed.image, {}, payload);
            INFO("scale " << scale << " seed " << seed);
            REQUIRE(r.roi_found);
            REQUIRE(r.bits == payload);
        }
    }
}

TEST_CASE("flipping one cell never changes another cell's bit", "[codec][property]") {
    RandomSource rng(77);
    for (int rep = 0; rep < 40; ++rep) {
        Bits payload = test::random_bits(182, 500 + rep);
        std::size_t target = 0;
        do {
            target = static_cast<std::size_t>(rng.uniform() * 182);
        } while (payload[target] != 0);
        const Bits before = decode_frame(rasterize_frame(encode_frame(payload))).bits;
        payload[target] = 1;
        const Bits after = decode_frame(rasterize_frame(encode_frame(payload))).bits;
        for (std::size_t i = 0; i < 182; ++i) {
            if (i != target) REQUIRE(after[i] == before[i]);
        }
        CHECK(after[target] == 1);
    }
}

TEST_CASE("heavy noise drives decoding to the coin-flip limit", "[codec]") {
    const FrameLayout layout;
    double total = 0.0;
    constexpr int kTrials = 1000;
    for (int t = 0; t < kTrials; ++t) {
        const Bits payload = test::random_bits(182, 9000 + t);
        GrayImage img = rasterize_frame(encode_frame(payload));
        RandomSource rng(static_cast<std::uint64_t>(t));
        for (double& p : img.pixels()) p = std::clamp(p + 10.0 * rng.normal(), 0.0, 1.0);
        const DecodeReport r = decode_frame(img, layout, payload);
        total += r.roi_found ? *r.success_rate_vs_reference : 0.0;
    }
    const double mean = total / kTrials;
    CHECK(mean > 0.45);
    CHECK(mean < 0.55);
}

TEST_CASE("decode compares a short reference against the leading bits", "[codec]") {
    const Bits payload = text_to_bits("Hi");
    const DecodeReport r = decode_frame(rasterize_frame(encode_frame(payload)), {}, payload);
    CHECK(*r.success_rate_vs_reference == 1.0);
    CHECK(bits_to_text(r.bits) == "Hi");
    const Bits too_long(183, 0);
    CHECK_THROWS_AS(decode_frame(GrayImage(10, 10, 1.0), {}, too_long), CapacityError);
}

TEST_CASE("success_rate", "[codec]") {
    const Bits a = test::random_bits(182, 1);
    Bits complement = a;
    for (auto& b : complement) b ^= 1;
    CHECK(success_rate(a, a) == 1.0);
    CHECK(success_rate(a, complement) == 0.0);

    Bits flipped = a;
    for (std::size_t i : {3, 50, 51, 181}) flipped[i] ^= 1;
    CHECK(success_rate(a, flipped) == Approx(178.0 / 182.0));
    CHECK(success_rate(a, flipped) == Approx(0.9780).margin(1e-4));

    CHECK_THROWS_AS(success_rate(a, Bits(10, 0)), std::invalid_argument);
}

TEST_CASE("success_rate is symmetric and equals 1 - Hamming / n", "[codec][property]") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const std::size_t n = 1 + seed % 200;
        const Bits a = test::random_bits(n, seed);
        const Bits b = test::random_bits(n, seed + 1000);
        std::size_t hamming = 0;
        for (std::size_t i = 0; i < n; ++i) hamming += a[i] != b[i];
        CHECK(success_rate(a, b) == success_rate(b, a));
        CHECK(success_rate(a, b) == Approx(1.0 - static_cast<double>(hamming) / n));
    }
}

TEST_CASE("otsu_threshold", "[codec][threshold]") {
    const std::vector<double> two{0.0, 0.0, 1.0, 1.0, 1.0};
    CHECK(otsu_threshold(two) == 0.5);
    const std::vector<double> same{0.3, 0.3, 0.3};
    CHECK(otsu_threshold(same) == 0.3);
    const std::vector<double> clusters{0.1, 0.12, 0.11, 0.8, 0.82, 0.79};
    const double t = otsu_threshold(clusters);
    CHECK(t > 0.12);
    CHECK(t < 0.79);
    // A heavily weighted outlier pulls the split towards itself.
    const std::vector<double> v{0.0, 0.1, 0.2, 0.3, 1.0};
    const std::vector<double> w{1, 1, 1, 1, 50};
    CHECK(otsu_threshold(v, w) == Approx(0.65));
    CHECK_THROWS_AS(otsu_threshold(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("bit string helpers", "[codec][bits]") {
    CHECK(bits_to_string(bits_from_string("0110")) == "0110");
    CHECK_THROWS_AS(bits_from_string("01a"), std::invalid_argument);
    CHECK(bits_to_string(text_to_bits("A")) == "01000001");
    CHECK(bits_to_text(text_to_bits("optical")) == "optical");
    Bits padded = text_to_bits("ok");
    padded.resize(182, 0);
    CHECK(bits_to_text(padded) == "ok");
}
