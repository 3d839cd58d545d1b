#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace slung {

using TokenId = std::uint32_t;

// Byte-level vocabulary: ids 0-255 are the bytes themselves, plus three
// special ids that never collide with byte ids.
struct Vocab {
    static constexpr TokenId kBos = 256;
    static constexpr TokenId kEos = 257;
    static constexpr TokenId kPad = 258;
    static constexpr std::uint32_t kSize = 259;

    static constexpr bool is_special(TokenId id) { return id >= 256 && id < kSize; }
};

// Bytes in, ids in [0,255] out. Never inserts specials.
std::vector<TokenId> encode(std::string_view text);

// Specials are skipped. Throws std::out_of_range for ids >= Vocab::kSize.
std::string decode(const std::vector<TokenId>& ids);

}  // namespace slung
