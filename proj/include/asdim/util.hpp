#ifndef ASDIM_UTIL_HPP
#define ASDIM_UTIL_HPP

#include <chrono>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "asdim/error.hpp"

namespace asdim {

// FNV-1a, used for content hashes in certificates.
inline std::uint64_t fnv64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) { out[i] = digits[v & 0xf]; v >>= 4; }
    return out;
}

// Wall-clock deadline checked inside long searches.
class Deadline {
  public:
    Deadline() : has_(false) {}
    explicit Deadline(double seconds)
        : has_(seconds > 0),
          end_(std::chrono::steady_clock::now() +
               std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                   std::chrono::duration<double>(seconds))) {}

    bool expired() const {
        return has_ && std::chrono::steady_clock::now() > end_;
    }
    void check(const char* what) const {
        if (expired()) throw TimeoutError(what);
    }

  private:
    bool has_;
    std::chrono::steady_clock::time_point end_;
};

inline std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline bool starts_with(const std::string& s, const std::string& p) {
    return s.rfind(p, 0) == 0;
}

} // namespace asdim

#endif
