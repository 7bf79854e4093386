#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>
#include <set>

#include <fuzzmat/fuzzmat.hpp>

#include "helpers.hpp"
#include "oracles.hpp"

using namespace fuzzmat;

namespace {

std::multiset<std::pair<int, int>> gray_size_multiset(const std::vector<FlatZone>& zones) {
    std::multiset<std::pair<int, int>> out;
    for (const auto& z : zones) out.insert({z.gray, z.size});
    return out;
}

std::set<std::vector<int>> partition_of(const std::vector<FlatZone>& zones, int width) {
    std::set<std::vector<int>> out;
    for (const auto& z : zones) {
        std::vector<int> idx;
        for (const auto& p : z.pixels) idx.push_back(p.row * width + p.col);
        std::sort(idx.begin(), idx.end());
        out.insert(idx);
    }
    return out;
}

}  // namespace

TEST_CASE("example texture has the nine 8-connexity zones of the worked example") {
    const auto zones = label_flat_zones(testutil::example_texture(), Connectivity::Eight);
    REQUIRE(zones.size() == 9);
    const auto hist = gray_size_multiset(zones);
    const std::multiset<std::pair<int, int>> expected{
        {1, 1}, {1, 1}, {1, 2}, {2, 1}, {2, 3}, {3, 3}, {4, 1}, {4, 1}, {4, 3}};
    CHECK(hist == expected);
}

TEST_CASE("constant image is a single zone") {
    const GrayImage img(3, 3, 4, std::vector<int>(9, 3));
    const auto zones = label_flat_zones(img, Connectivity::Four);
    REQUIRE(zones.size() == 1);
    CHECK(zones[0].gray == 3);
    CHECK(zones[0].size == 9);
    CHECK(zones[0].firstPixel == PixelCoord{0, 0});
}

TEST_CASE("2x2 checker: four zones under 4-connexity, two under 8") {
    const GrayImage img(2, 2, 2, {1, 0, 0, 1});
    CHECK(label_flat_zones(img, Connectivity::Four).size() == 4);
    const auto z8 = label_flat_zones(img, Connectivity::Eight);
    REQUIRE(z8.size() == 2);
    CHECK(z8[0].size == 2);
    CHECK(z8[1].size == 2);
}

TEST_CASE("zones partition the inside pixels and come in raster order") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 30; ++t) {
        const GrayImage img = testutil::random_image(rng, 8, 8, 3);
        const auto zones = label_flat_zones(img, Connectivity::Eight);
        long long total = 0;
        int prevFirst = -1;
        std::set<int> seen;
        for (const auto& z : zones) {
            total += z.size;
            CHECK(z.size == static_cast<int>(z.pixels.size()));
            const int first = z.firstPixel.row * img.width() + z.firstPixel.col;
            CHECK(first > prevFirst);
            prevFirst = first;
            for (const auto& p : z.pixels) {
                CHECK(img.at(p.row, p.col) == z.gray);
                CHECK(seen.insert(p.row * img.width() + p.col).second);
            }
        }
        CHECK(total == img.pixelCount());
    }
}

TEST_CASE("union-find labeling equals the pairwise-merge oracle") {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 200; ++t) {
        const int levels = 2 + static_cast<int>(t % 3);
        const GrayImage img = testutil::random_image(rng, 8, 8, levels);
        for (Connectivity conn : {Connectivity::Four, Connectivity::Eight}) {
            const auto zones = label_flat_zones(img, conn);
            CHECK(partition_of(zones, img.width()) ==
                  testoracle::naive_flat_zone_partition(img, conn));
        }
    }
}

TEST_CASE("rotating the image preserves the (gray, size) multiset") {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 20; ++t) {
        const GrayImage img = testutil::random_image(rng, 7, 5, 4);
        GrayImage r = img;
        for (int k = 0; k < 3; ++k) {
            r = rotate90(r);
            CHECK(gray_size_multiset(label_flat_zones(r, Connectivity::Eight)) ==
                  gray_size_multiset(label_flat_zones(img, Connectivity::Eight)));
        }
    }
}

TEST_CASE("8-connexity never yields more zones than 4-connexity") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 50; ++t) {
        const GrayImage img = testutil::random_image(rng, 8, 8, 3);
        CHECK(label_flat_zones(img, Connectivity::Eight).size() <=
              label_flat_zones(img, Connectivity::Four).size());
    }
}
