#include "slung/common.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace slung {

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

static bool is_word_byte(unsigned char c) { return std::isalnum(c) != 0; }

bool contains_word_ci(std::string_view haystack, std::string_view word) {
    if (word.empty() || haystack.size() < word.size()) return false;
    const std::string h = to_lower(haystack);
    const std::string w = to_lower(word);
    std::size_t pos = 0;
    while ((pos = h.find(w, pos)) != std::string::npos) {
        const bool left_ok = pos == 0 || !is_word_byte(static_cast<unsigned char>(h[pos - 1]));
        const std::size_t end = pos + w.size();
        const bool right_ok = end == h.size() || !is_word_byte(static_cast<unsigned char>(h[end]));
        if (left_ok && right_ok) return true;
        ++pos;
    }
    return false;
}

bool contains_ci(std::string_view haystack, std::string_view needle) {
    if (needle.empty()) return true;
    return to_lower(haystack).find(to_lower(needle)) != std::string::npos;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

}  // namespace slung
