#include "doctest.h"
#include "slung/tokenizer.hpp"

#include <random>
#include <stdexcept>

using namespace slung;

TEST_CASE("encode maps bytes to their own ids") {
    CHECK(encode("").empty());
    CHECK(encode("A") == std::vector<TokenId>{65});
    CHECK(encode("hi") == std::vector<TokenId>{104, 105});
    for (TokenId id : encode("any text at all")) CHECK(id < 256);
}

TEST_CASE("decode maps ids back and strips specials") {
    CHECK(decode({65}) == "A");
    CHECK(decode({104, 105}) == "hi");
    CHECK(decode({Vocab::kBos, 65, Vocab::kEos}) == "A");
    CHECK(decode({Vocab::kPad, Vocab::kPad}) == "");
}

TEST_CASE("decode rejects out-of-vocab ids") {
    CHECK_THROWS_AS(decode({Vocab::kSize}), std::out_of_range);
    CHECK_THROWS_AS(decode({65, 100000}), std::out_of_range);
}

TEST_CASE("special ids never collide with byte ids") {
    CHECK(Vocab::kSize == 259);
    CHECK_FALSE(Vocab::is_special(0));
    CHECK_FALSE(Vocab::is_special(255));
    CHECK(Vocab::is_special(Vocab::kBos));
    CHECK(Vocab::is_special(Vocab::kEos));
    CHECK(Vocab::is_special(Vocab::kPad));
}

TEST_CASE("roundtrip over random byte strings") {
    std::mt19937 gen(1234);
    std::uniform_int_distribution<int> byte(0, 255);
    std::uniform_int_distribution<int> len(0, 300);
    for (int trial = 0; trial < 200; ++trial) {
        std::string s;
        const int n = len(gen);
        for (int i = 0; i < n; ++i) s.push_back(static_cast<char>(byte(gen)));
        CHECK(decode(encode(s)) == s);
    }
}
