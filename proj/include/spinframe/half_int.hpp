// Copyright 2026 The spinframe Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <charconv>
#include <compare>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace spinframe {

/**
 * @brief Exact half-integer angular-momentum label.
 *
 * Stored as twice its value so that parity tests such as "is j - m an
 * integer" are exact integer arithmetic.
 */
class HalfInt {
  public:
    constexpr HalfInt() = default;
    /// Whole-number label, e.g. HalfInt{2} is j = 2.
    constexpr explicit HalfInt(int whole) : twice_(2 * whole) {}

    [[nodiscard]] static constexpr HalfInt from_twice(int twice) {
        HalfInt h;
        h.twice_ = twice;
        return h;
    }

    [[nodiscard]] constexpr int twice() const noexcept { return twice_; }
    [[nodiscard]] constexpr double value() const noexcept {
        return 0.5 * static_cast<double>(twice_);
    }
    [[nodiscard]] constexpr bool is_integer() const noexcept {
        return twice_ % 2 == 0;
    }
    /// Integer value; only meaningful when is_integer().
    [[nodiscard]] constexpr int whole() const noexcept { return twice_ / 2; }

    constexpr HalfInt operator-() const { return from_twice(-twice_); }
    constexpr HalfInt operator+(HalfInt o) const {
        return from_twice(twice_ + o.twice_);
    }
    constexpr HalfInt operator-(HalfInt o) const {
        return from_twice(twice_ - o.twice_);
    }
    constexpr auto operator<=>(const HalfInt &) const = default;

    /// "1/2", "-3/2", "2", "2.5". Returns nullopt for anything that is not
    /// an exact multiple of 1/2.
    [[nodiscard]] static std::optional<HalfInt> parse(std::string_view s) {
        if (s.empty())
            return std::nullopt;
        auto slash = s.find('/');
        if (slash != std::string_view::npos) {
            int num = 0;
            auto num_part = s.substr(0, slash);
            auto den_part = s.substr(slash + 1);
            if (den_part != "2" && den_part != "1")
                return std::nullopt;
            if (!parse_int(num_part, num))
                return std::nullopt;
            return den_part == "2" ? from_twice(num) : from_twice(2 * num);
        }
        int whole_part = 0;
        if (parse_int(s, whole_part))
            return from_twice(2 * whole_part);
        std::string copy(s);
        char *end = nullptr;
        double v = std::strtod(copy.c_str(), &end);
        if (end != copy.c_str() + copy.size())
            return std::nullopt;
        double t = 2.0 * v;
        long rounded = std::lround(t);
        if (static_cast<double>(rounded) != t)
            return std::nullopt;
        return from_twice(static_cast<int>(rounded));
    }

    [[nodiscard]] std::string str() const {
        if (is_integer())
            return std::to_string(whole());
        return std::to_string(twice_) + "/2";
    }

  private:
    static bool parse_int(std::string_view s, int &out) {
        if (!s.empty() && s.front() == '+')
            s.remove_prefix(1);
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        return ec == std::errc{} && ptr == s.data() + s.size();
    }

    int twice_ = 0;
};

/// True when (j, m) labels a state: j >= 0, |m| <= j, j - m integral.
[[nodiscard]] constexpr bool is_valid_pair(HalfInt j, HalfInt m) noexcept {
    return j.twice() >= 0 && m.twice() <= j.twice() && -m.twice() <= j.twice() &&
           (j.twice() - m.twice()) % 2 == 0;
}

inline void require_valid_pair(HalfInt j, HalfInt m) {
    if (!is_valid_pair(j, m))
        throw InvalidIndex("invalid angular momentum pair (j=" + j.str() +
                           ", m=" + m.str() + ")");
}

} // namespace spinframe
