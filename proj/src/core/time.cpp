// SPDX-License-Identifier: Apache-2.0
#include "mnemo/core/time.hpp"

#include "mnemo/core/error.hpp"

#include <fmt/format.h>

#include <cctype>

namespace mnemo {
namespace {

class Cursor {
public:
    explicit Cursor(std::string_view text) : text_(text) {}

    bool done() const { return pos_ >= text_.size(); }
    char peek() const { return done() ? '\0' : text_[pos_]; }

    int digits(std::size_t count) {
        int value = 0;
        for (std::size_t i = 0; i < count; ++i) {
            if (done() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) bad();
            value = value * 10 + (text_[pos_++] - '0');
        }
        return value;
    }

    void expect(char c) {
        if (peek() != c) bad();
        ++pos_;
    }

    bool accept(char c) {
        if (peek() != c) return false;
        ++pos_;
        return true;
    }

    [[noreturn]] void bad() const {
        fail(ErrorCode::invalid_input, fmt::format("invalid ISO-8601 timestamp with offset: '{}'", text_));
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

Instant parse_instant(std::string_view text) {
    using namespace std::chrono;
    Cursor in(text);
    const int y = in.digits(4);
    in.expect('-');
    const int mo = in.digits(2);
    in.expect('-');
    const int d = in.digits(2);
    if (!in.accept('T') && !in.accept('t') && !in.accept(' ')) in.bad();
    const int hh = in.digits(2);
    in.expect(':');
    const int mm = in.digits(2);
    int ss = 0;
    int millis = 0;
    if (in.accept(':')) {
        ss = in.digits(2);
        if (in.accept('.') || in.accept(',')) {
            int scale = 100;
            bool any = false;
            while (std::isdigit(static_cast<unsigned char>(in.peek()))) {
                millis += scale * in.digits(1);
                scale /= 10;
                any = true;
            }
            if (!any) in.bad();
        }
    }
    int offset_minutes = 0;
    if (in.accept('Z') || in.accept('z')) {
    } else if (in.peek() == '+' || in.peek() == '-') {
        const int sign = in.peek() == '-' ? -1 : 1;
        in.accept(in.peek());
        const int oh = in.digits(2);
        in.accept(':');
        const int om = in.done() ? 0 : in.digits(2);
        offset_minutes = sign * (oh * 60 + om);
    } else {
        in.bad();
    }
    if (!in.done()) in.bad();

    const year_month_day date{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!date.ok() || hh > 23 || mm > 59 || ss > 60) in.bad();
    const auto local = sys_days{date} + hours{hh} + minutes{mm} + seconds{ss} + milliseconds{millis};
    return time_point_cast<milliseconds>(local - minutes{offset_minutes});
}

std::string format_instant(Instant instant) {
    using namespace std::chrono;
    const auto days = floor<std::chrono::days>(instant);
    const year_month_day date{days};
    const hh_mm_ss<milliseconds> tod{instant - days};
    return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}.{:03}Z", static_cast<int>(date.year()),
                       static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()),
                       tod.hours().count(), tod.minutes().count(), tod.seconds().count(),
                       tod.subseconds().count());
}

Instant SystemClock::now() {
    return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

}  // namespace mnemo
