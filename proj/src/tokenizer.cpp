#include "slung/tokenizer.hpp"

#include <stdexcept>

namespace slung {

std::vector<TokenId> encode(std::string_view text) {
    std::vector<TokenId> ids;
    ids.reserve(text.size());
    for (unsigned char c : text) ids.push_back(static_cast<TokenId>(c));
    return ids;
}

std::string decode(const std::vector<TokenId>& ids) {
    std::string out;
    out.reserve(ids.size());
    for (TokenId id : ids) {
        if (id >= Vocab::kSize) {
            throw std::out_of_range("decode: invalid token id " + std::to_string(id));
        }
        if (Vocab::is_special(id)) continue;
        out.push_back(static_cast<char>(static_cast<unsigned char>(id)));
    }
    return out;
}

}  // namespace slung
